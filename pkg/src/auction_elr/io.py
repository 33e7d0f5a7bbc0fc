"""JSON instance files.

Numbers may be JSON integers, JSON decimals (read exactly), or strings such
as ``"8/5"`` or ``"0.25"``. Written files use ``"a/b"`` strings throughout.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .errors import AuctionError, ParseError
from .model import (
    AuctionInstance,
    FeasibilitySystem,
    feasibility_explicit,
    feasibility_identical_items,
    feasibility_single_item,
    feasibility_single_minded,
    make_distribution,
    make_instance,
    to_fraction,
)


def _number(value, path: str) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (int, str, Fraction)):
        raise ParseError(f"{path}: expected a number or 'a/b' string, got {value!r}")
    try:
        return to_fraction(value)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"{path}: cannot read {value!r} as a rational") from None


def _list(value, path: str) -> list:
    if not isinstance(value, list):
        raise ParseError(f"{path}: expected a list")
    return value


def loads_instance(text: str) -> AuctionInstance:
    try:
        # parse_float sees the literal text, so decimals stay exact
        doc = json.loads(text, parse_float=Fraction)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object with 'buyers' and 'feasibility'")
    if "buyers" not in doc:
        raise ParseError("buyers: missing")
    buyers = []
    for n, entry in enumerate(_list(doc["buyers"], "buyers")):
        path = f"buyers[{n}]"
        if not isinstance(entry, dict) or "support" not in entry or "probs" not in entry:
            raise ParseError(f"{path}: expected an object with 'support' and 'probs'")
        support = [_number(v, f"{path}.support[{i}]") for i, v in enumerate(_list(entry["support"], f"{path}.support"))]
        probs = [_number(v, f"{path}.probs[{i}]") for i, v in enumerate(_list(entry["probs"], f"{path}.probs"))]
        try:
            buyers.append(make_distribution(support, probs))
        except (AuctionError, ValueError) as exc:
            raise ParseError(f"{path} (buyer {n + 1}): {exc}") from None
    if not buyers:
        raise ParseError("buyers: at least one buyer is required")
    feas = _feasibility(doc.get("feasibility", {"kind": "single_item"}), len(buyers))
    try:
        return make_instance(buyers, feas)
    except AuctionError as exc:
        raise ParseError(f"feasibility: {exc}") from None


def _feasibility(spec, n: int) -> FeasibilitySystem:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ParseError("feasibility: expected an object with 'kind'")
    kind = spec["kind"]
    try:
        if kind == "single_item":
            return feasibility_single_item(n)
        if kind == "identical_items":
            count = spec.get("count")
            if not isinstance(count, int) or isinstance(count, bool):
                raise ParseError("feasibility.count: expected an integer")
            return feasibility_identical_items(n, count)
        if kind == "single_minded":
            bundles = _list(spec.get("bundles"), "feasibility.bundles")
            if len(bundles) != n:
                raise ParseError(f"feasibility.bundles: {len(bundles)} bundles for {n} buyers")
            return feasibility_single_minded([_list(b, f"feasibility.bundles[{i}]") for i, b in enumerate(bundles)])
        if kind == "explicit":
            sets = _list(spec.get("sets"), "feasibility.sets")
            autoclose = spec.get("autoclose", True)
            return feasibility_explicit(n, [_list(s, f"feasibility.sets[{i}]") for i, s in enumerate(sets)], bool(autoclose))
    except ParseError:
        raise
    except AuctionError as exc:
        raise ParseError(f"feasibility: {exc}") from None
    raise ParseError(f"feasibility.kind: unknown kind {kind!r}")


def load_instance(path) -> AuctionInstance:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from None
    return loads_instance(text)


def instance_to_dict(instance: AuctionInstance) -> dict:
    feas = instance.feasibility
    if feas.kind == "single_item":
        fdoc = {"kind": "single_item"}
    elif feas.kind == "identical_items":
        fdoc = {"kind": "identical_items", "count": feas.count}
    elif feas.kind == "single_minded":
        fdoc = {"kind": "single_minded", "bundles": [list(b) for b in feas.bundles]}
    else:
        fdoc = {"kind": "explicit", "sets": [list(s) for s in feas.maximal_sets()], "autoclose": True}
    return {
        "buyers": [{"support": [str(x) for x in b.support], "probs": [str(p) for p in b.probs]} for b in instance.buyers],
        "feasibility": fdoc,
    }


def dumps_instance(instance: AuctionInstance) -> str:
    return json.dumps(instance_to_dict(instance), indent=2) + "\n"


def save_instance(instance: AuctionInstance, path) -> None:
    Path(path).write_text(dumps_instance(instance))
