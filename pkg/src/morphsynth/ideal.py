"""Closeness to an ideal point.

Compositions are scored by the distance between their estimate vector and
an ideal vector.  Two keyings are supported: ``priority`` (one component
per part, the selected DA's priority) and ``criteria`` (the selected DAs'
estimates flattened in part then criterion order).  A third keying,
``selection``, keeps raw DA ids and only supports the hamming metric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterator, Sequence

from .errors import ValidationError
from .model import MAXIMIZE, Composition, Morphology, make_composition, to_fraction

PRIORITY = "priority"
CRITERIA = "criteria"
SELECTION = "selection"
KEYINGS = (PRIORITY, CRITERIA, SELECTION)

BEST_OF_ALTERNATIVES = "best_of_alternatives"
BEST_OF_SCALE = "best_of_scale"
EXPERT_SUPPLIED = "expert_supplied"
STRATEGIES = (BEST_OF_ALTERNATIVES, BEST_OF_SCALE, EXPERT_SUPPLIED)

METRICS = ("l2", "l1", "chebyshev", "hamming")


@dataclass(frozen=True)
class EstimateVector:
    components: tuple[Any, ...]
    keying: str = PRIORITY
    labels: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.keying not in KEYINGS:
            raise ValidationError(f"unknown keying {self.keying!r}")
        if self.labels and len(self.labels) != len(self.components):
            raise ValidationError("labels and components differ in length")

    def __len__(self) -> int:
        return len(self.components)

    def __iter__(self) -> Iterator[Any]:
        return iter(self.components)

    def __getitem__(self, i: int) -> Any:
        return self.components[i]


def _labels(m: Morphology, scope: str, keying: str) -> tuple[str, ...]:
    parts = m.leaves(scope)
    if keying == CRITERIA:
        return tuple(f"{p.id}.{c.id}" for p in parts for c in p.criteria)
    return tuple(p.id for p in parts)


def estimate_vector(m: Morphology, comp: Composition, keying: str = PRIORITY) -> EstimateVector:
    """The vector a composition is judged by."""
    values: list[Any] = []
    for part_id, da_id in comp.selection:
        da = m.alternative(da_id)
        if keying == PRIORITY:
            if da.priority is None:
                raise ValidationError(f"{da_id} has no priority")
            values.append(da.priority)
        elif keying == CRITERIA:
            part = m.part(part_id)
            if not part.criteria or not da.estimates:
                raise ValidationError(f"{da_id} has no estimates")
            values.extend(da.estimate(c.id) for c in part.criteria)
        elif keying == SELECTION:
            values.append(da_id)
        else:
            raise ValidationError(f"unknown keying {keying!r}")
    return EstimateVector(tuple(values), keying, _labels(m, comp.scope, keying))


def _expert_from_config(m: Morphology, scope: str, keying: str) -> Sequence[Any]:
    cfg = m.config.get("ideal") or {}
    if keying == SELECTION and "selection" in cfg:
        sel = cfg["selection"]
        return [sel[p.id] for p in m.leaves(scope) if p.id in sel]
    if keying in cfg:
        return cfg[keying]
    raise ValidationError(f"no expert ideal for keying {keying!r} in the instance")


def generate_ideal(
    m: Morphology,
    scope: str | None = None,
    strategy: str = BEST_OF_ALTERNATIVES,
    keying: str = PRIORITY,
    expert: Sequence[Any] | None = None,
) -> EstimateVector:
    """Build an ideal vector for ``scope``.

    ``best_of_alternatives`` takes the per-component best over the DAs,
    ``best_of_scale`` the optimum of each declared scale (priority 1 for the
    priority keying) and ``expert_supplied`` echoes ``expert`` (or the
    instance's ``ideal`` block) after a dimension check.
    """
    scope = scope or m.root.id
    if strategy not in STRATEGIES:
        raise ValidationError(f"unknown strategy {strategy!r}")
    if keying not in KEYINGS:
        raise ValidationError(f"unknown keying {keying!r}")
    parts = m.leaves(scope)
    labels = _labels(m, scope, keying)
    if strategy == EXPERT_SUPPLIED:
        raw = list(expert) if expert is not None else list(_expert_from_config(m, scope, keying))
        if len(raw) != len(labels):
            raise ValidationError(f"expert vector has {len(raw)} components, expected {len(labels)}")
        values = tuple(raw) if keying == SELECTION else tuple(to_fraction(v) for v in raw)
        return EstimateVector(values, keying, labels)
    if keying == SELECTION:
        raise ValidationError("selection keying only supports expert_supplied ideals")
    values: list[Any] = []
    for part in parts:
        if keying == PRIORITY:
            if strategy == BEST_OF_SCALE:
                values.append(1)
                continue
            prios = [a.priority for a in part.alternatives]
            if any(p is None for p in prios):
                raise ValidationError(f"part {part.id} has DAs without priority")
            values.append(min(prios))
        else:
            if not part.criteria:
                raise ValidationError(f"part {part.id} has no criteria")
            for c in part.criteria:
                if strategy == BEST_OF_SCALE:
                    values.append(c.scale_optimum())
                    continue
                column = [a.estimate(c.id) for a in part.alternatives]
                values.append(max(column) if c.direction == MAXIMIZE else min(column))
    return EstimateVector(tuple(values), keying, labels)


def ideal_composition(m: Morphology, scope: str | None = None, strategy: str = BEST_OF_ALTERNATIVES) -> Composition:
    """The (possibly inadmissible) composition of per-part best DAs.

    With ``expert_supplied`` the instance's ``ideal.selection`` block is
    used; otherwise the first DA of minimal priority in each part.
    """
    scope = scope or m.root.id
    if strategy == EXPERT_SUPPLIED:
        return make_composition(m, _expert_from_config(m, scope, SELECTION), scope)
    das = []
    for part in m.leaves(scope):
        if any(a.priority is None for a in part.alternatives):
            raise ValidationError(f"part {part.id} has DAs without priority")
        das.append(min(part.alternatives, key=lambda a: a.priority).id)
    return make_composition(m, das, scope)


def _as_tuple(v: EstimateVector | Sequence[Any]) -> tuple[Any, ...]:
    return tuple(v.components) if isinstance(v, EstimateVector) else tuple(v)


def _check(a: EstimateVector | Sequence[Any], b: EstimateVector | Sequence[Any]) -> tuple[tuple, tuple]:
    if isinstance(a, EstimateVector) and isinstance(b, EstimateVector) and a.keying != b.keying:
        raise ValidationError(f"keying mismatch: {a.keying} vs {b.keying}")
    x, y = _as_tuple(a), _as_tuple(b)
    if len(x) != len(y):
        raise ValidationError(f"dimension mismatch: {len(x)} vs {len(y)}")
    return x, y


def _exact_key(x: tuple, y: tuple, metric: str) -> Fraction | int:
    """Exact monotone surrogate of the distance (squared for l2)."""
    if metric == "hamming":
        return sum(1 for p, q in zip(x, y) if p != q)
    if metric not in METRICS:
        raise ValidationError(f"unknown metric {metric!r}; choose from {', '.join(METRICS)}")
    if any(isinstance(v, str) for v in x + y):
        raise ValidationError(f"metric {metric} needs numeric components; use hamming")
    diffs = [abs(Fraction(p) - Fraction(q)) for p, q in zip(x, y)]
    if metric == "l2":
        return sum((d * d for d in diffs), Fraction(0))
    if metric == "l1":
        return sum(diffs, Fraction(0))
    return max(diffs, default=Fraction(0))


def proximity(a: EstimateVector | Sequence[Any], b: EstimateVector | Sequence[Any], metric: str = "l2"):
    """Distance between two estimate vectors.

    ``l2`` returns a float (the square root of an exact rational), ``l1``
    and ``chebyshev`` an exact :class:`~fractions.Fraction` and ``hamming``
    the number of differing components.
    """
    x, y = _check(a, b)
    key = _exact_key(x, y, metric)
    if metric == "l2":
        return math.sqrt(key)
    return key


@dataclass(frozen=True)
class Ranked:
    composition: Composition
    distance: Any
    tied: bool
    key: Any = None  # exact comparison key (squared distance for l2)


def select_closest(
    candidates: Sequence[Composition],
    m: Morphology,
    ideal: EstimateVector,
    metric: str = "l2",
) -> list[Ranked]:
    """Candidates in ascending distance from ``ideal``.

    The sort is stable, so equal distances keep input order; every entry
    sharing its distance with another one is flagged ``tied``.
    """
    if not candidates:
        raise ValidationError("select_closest needs at least one candidate")
    ideal_t = _as_tuple(ideal)
    keying = ideal.keying if isinstance(ideal, EstimateVector) else PRIORITY
    scored = []
    for comp in candidates:
        vec, _ = _check(estimate_vector(m, comp, keying), ideal)
        key = _exact_key(vec, ideal_t, metric)
        scored.append((key, comp))
    counts: dict[Any, int] = {}
    for key, _ in scored:
        counts[key] = counts.get(key, 0) + 1
    scored.sort(key=lambda t: t[0])
    return [
        Ranked(comp, math.sqrt(key) if metric == "l2" else key, counts[key] > 1, key)
        for key, comp in scored
    ]


def closest_set(ranked: Sequence[Ranked]) -> list[Composition]:
    """The minimizers of a ranked list."""
    if not ranked:
        return []
    best = ranked[0].key
    return [r.composition for r in ranked if r.key == best]


def select_closest_multi(
    candidates: Sequence[Composition],
    m: Morphology,
    ideals: Sequence[EstimateVector],
    metric: str = "l2",
) -> list[Composition]:
    """Union of the minimizers for several ideal points, in candidate order."""
    if not ideals:
        raise ValidationError("at least one ideal point is required")
    winners: set[Composition] = set()
    for ideal in ideals:
        winners.update(closest_set(select_closest(candidates, m, ideal, metric)))
    return [c for c in candidates if c in winners]
