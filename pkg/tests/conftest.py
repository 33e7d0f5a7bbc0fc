import os
import random
from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from auction_elr.model import make_distribution

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@st.composite
def distributions(draw, k_max=4):
    """Rational priors on small grids; denominators stay at most 60."""
    k = draw(st.integers(1, k_max))
    q = draw(st.sampled_from([1, 2, 3, 4, 5, 6, 10, 12]))
    nums = sorted(draw(st.sets(st.integers(1, 8 * q), min_size=k, max_size=k)))
    den = draw(st.integers(max(k, 2), 60))
    cuts = sorted(draw(st.sets(st.integers(1, den - 1), min_size=k - 1, max_size=k - 1)))
    parts = [b - a for a, b in zip([0] + cuts, cuts + [den])]
    return make_distribution([Fraction(a, q) for a in nums], [Fraction(v, den) for v in parts])


def seeded(seed):
    return random.Random(seed)


_CRITERIA = {}


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        ok, detail = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
