"""Vector dominance and Pareto filtering."""

from __future__ import annotations

from typing import Callable, Hashable, Sequence, TypeVar

from .errors import ValidationError
from .model import DIRECTIONS, MAXIMIZE, MINIMIZE

T = TypeVar("T")


def _directions(directions: str | Sequence[str], dim: int) -> tuple[str, ...]:
    if isinstance(directions, str):
        directions = (directions,) * dim
    directions = tuple(directions)
    if len(directions) != dim:
        raise ValidationError(f"{len(directions)} directions for {dim} components")
    for d in directions:
        if d not in DIRECTIONS:
            raise ValidationError(f"unknown direction {d!r}")
    return directions


def dominates(a: Sequence, b: Sequence, directions: str | Sequence[str] = MINIMIZE) -> bool:
    """True iff ``a`` is no worse than ``b`` everywhere and better somewhere."""
    if len(a) != len(b):
        raise ValidationError(f"dimension mismatch: {len(a)} vs {len(b)}")
    dirs = _directions(directions, len(a))
    strict = False
    for x, y, d in zip(a, b, dirs):
        if d == MAXIMIZE:
            x, y = y, x
        if x > y:
            return False
        if x < y:
            strict = True
    return strict


def nondominated(items: Sequence[T], dominates_fn: Callable[[T, T], bool]) -> list[int]:
    """Indices of items not dominated by any other item, in input order."""
    return [
        i for i, x in enumerate(items)
        if not any(dominates_fn(y, x) for j, y in enumerate(items) if j != i)
    ]


def _sweep_2d(vectors: Sequence[Sequence], dirs: tuple[str, ...]) -> list[int]:
    keyed = [
        tuple(-v if d == MAXIMIZE else v for v, d in zip(vec, dirs)) for vec in vectors
    ]
    order = sorted(range(len(keyed)), key=lambda i: keyed[i])
    keep = []
    best_before = None  # minimum y among strictly smaller x
    pos = 0
    while pos < len(order):
        x = keyed[order[pos]][0]
        end = pos
        while end < len(order) and keyed[order[end]][0] == x:
            end += 1
        group_min = keyed[order[pos]][1]
        for i in order[pos:end]:
            y = keyed[i][1]
            if y == group_min and (best_before is None or y < best_before):
                keep.append(i)
        if best_before is None or group_min < best_before:
            best_before = group_min
        pos = end
    return sorted(keep)


def pareto_filter(
    items: Sequence[tuple[Hashable, Sequence]],
    directions: str | Sequence[str] = MINIMIZE,
    method: str = "auto",
) -> list[Hashable]:
    """Ids of the non-dominated items, input order preserved.

    Every copy of a surviving vector is kept.  ``method`` picks the
    pairwise ``"scan"``, the 2-D ``"sweep"`` or ``"auto"`` (sweep when the
    vectors have two components).
    """
    if not items:
        raise ValidationError("pareto_filter needs at least one item")
    dim = len(items[0][1])
    for _, vec in items:
        if len(vec) != dim:
            raise ValidationError("all vectors must have the same dimension")
    dirs = _directions(directions, dim)
    if method not in ("auto", "scan", "sweep"):
        raise ValidationError(f"unknown method {method!r}")
    if method == "sweep" and dim != 2:
        raise ValidationError("the sweep path handles two components only")
    vectors = [vec for _, vec in items]
    if method == "sweep" or (method == "auto" and dim == 2):
        idx = _sweep_2d(vectors, dirs)
    else:
        idx = nondominated(vectors, lambda a, b: dominates(a, b, dirs))
    return [items[i][0] for i in idx]
