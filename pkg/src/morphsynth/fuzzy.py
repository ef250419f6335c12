"""Morphological design with fuzzy priorities and compatibilities.

Crisp aggregation takes the level of maximal membership and resolves ties
toward the worse level (larger priority number, lower compatibility).
Joint memberships follow the extension principle with ``min`` as t-norm;
identical quality vectors combine by ``max``.

Four solve cases decide which estimates are aggregated before solving:

====  ===================  =======================
case  priorities           compatibilities
====  ===================  =======================
1     aggregated           aggregated
2     aggregated           fuzzy
3     fuzzy                aggregated
4     fuzzy                fuzzy
====  ===================  =======================
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import InfeasibleError, ValidationError
from .hmmd import QualityVector, admissible_with_quality
from .model import Composition, Morphology, to_fraction
from .pareto import nondominated

CASES = (1, 2, 3, 4)
PREFERENCES = ("maxmem", "pessimistic")
NORM_TOL = 1e-9


def _memberships(values: Sequence) -> tuple[Fraction, ...]:
    out = tuple(to_fraction(v) for v in values)
    if not out:
        raise ValidationError("empty membership vector")
    for v in out:
        if not 0 <= v <= 1:
            raise ValidationError(f"membership {v} outside [0,1]")
    return out


@dataclass(frozen=True)
class FuzzyPriority:
    """Memberships of priority levels 1..k, best level first."""

    memberships: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "memberships", _memberships(self.memberships))

    @property
    def normalized(self) -> bool:
        return abs(float(sum(self.memberships)) - 1.0) <= NORM_TOL

    def support(self) -> dict[int, Fraction]:
        return {r: mu for r, mu in enumerate(self.memberships, start=1) if mu > 0}


@dataclass(frozen=True)
class FuzzyCompatibility:
    """Memberships of compatibility levels l..0, best level first."""

    memberships: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "memberships", _memberships(self.memberships))

    @property
    def max_level(self) -> int:
        return len(self.memberships) - 1

    def support(self) -> dict[int, Fraction]:
        top = self.max_level
        return {top - i: mu for i, mu in enumerate(self.memberships) if mu > 0}


def _argmax_worst(levels: dict[int, Fraction], worse) -> int:
    if not levels:
        raise ValidationError("all memberships are zero")
    best = max(levels.values())
    return worse(lv for lv, mu in levels.items() if mu == best)


def aggregate_priority(f: FuzzyPriority | Sequence) -> int:
    """Priority of maximal membership; ties go to the larger (worse) level."""
    f = f if isinstance(f, FuzzyPriority) else FuzzyPriority(tuple(f))
    return _argmax_worst(f.support(), max)


def aggregate_compatibility(f: FuzzyCompatibility | Sequence) -> int:
    """Compatibility of maximal membership; ties go to the lower level."""
    f = f if isinstance(f, FuzzyCompatibility) else FuzzyCompatibility(tuple(f))
    return _argmax_worst(f.support(), min)


def _case_flags(case: int) -> tuple[bool, bool]:
    """(fuzzy priorities kept, fuzzy compatibilities kept)."""
    if case not in CASES:
        raise ValidationError(f"case must be one of {CASES}")
    return case in (3, 4), case in (2, 4)


def _convolve(dists: list[dict], combine, start) -> dict:
    """Max-min convolution of independent fuzzy quantities."""
    acc = {start: Fraction(1)}
    for dist in dists:
        nxt: dict = {}
        for x, mx in acc.items():
            for y, my in dist.items():
                z = combine(x, y)
                mu = min(mx, my)
                if mu > nxt.get(z, Fraction(0)):
                    nxt[z] = mu
        acc = nxt
    return acc


def quality_support(
    m: Morphology,
    c: Composition,
    alpha: Fraction | float | str = 0,
    fuzzy_priorities: bool = True,
    fuzzy_compat: bool = True,
) -> list[tuple[QualityVector, Fraction]]:
    """Fuzzy set of quality vectors a composition may take.

    Estimates without a fuzzy form (or with their fuzzy form switched off)
    act as crisp singletons.  Points below ``alpha`` are dropped; zero
    memberships are never kept.  Sorted by descending membership, then by
    vector.
    """
    alpha = to_fraction(alpha)
    if not 0 <= alpha <= 1:
        raise ValidationError("alpha must lie in [0, 1]")
    k = m.k
    prio_dists = []
    for da_id in c.das:
        da = m.alternative(da_id)
        if fuzzy_priorities and da.fuzzy_priority is not None:
            dist = FuzzyPriority(da.fuzzy_priority).support()
        elif da.priority is not None:
            dist = {da.priority: Fraction(1)}
        else:
            raise ValidationError(f"{da_id} has no priority")
        prio_dists.append({tuple(int(i == r - 1) for i in range(k)): mu for r, mu in dist.items()})
    w_dists = []
    das, parts = c.das, c.parts
    for i in range(len(das)):
        for j in range(i + 1, len(das)):
            if not m.compat.covers(parts[i], parts[j]):
                continue
            fz = m.compat.fuzzy(das[i], das[j]) if fuzzy_compat else None
            if fz is not None:
                w_dists.append(FuzzyCompatibility(fz).support())
            else:
                level = m.compat.level(das[i], das[j])
                if level is None:
                    raise ValidationError(f"no compatibility declared for ({das[i]}, {das[j]})")
                w_dists.append({level: Fraction(1)})
    censuses = _convolve(prio_dists, lambda x, y: tuple(a + b for a, b in zip(x, y)), (0,) * k)
    ws = _convolve(w_dists, min, m.l)
    points = []
    for n, mn in censuses.items():
        for w, mw in ws.items():
            mu = min(mn, mw)
            if mu > 0 and mu >= alpha:
                points.append((QualityVector(w, n), mu))
    if not points:
        raise InfeasibleError(f"support of {c} is empty after the alpha cut at {alpha}")
    points.sort(key=lambda t: (-t[1], t[0]))
    return points


def pessimistic_corner(support: Sequence[tuple[QualityVector, Fraction]]) -> tuple[int, ...]:
    """(min w, elementwise min of census prefix sums) over a support set."""
    vecs = [q for q, _ in support]
    w = min(q.w for q in vecs)
    prefixes = [q.prefix() for q in vecs]
    return (w,) + tuple(min(col) for col in zip(*prefixes))


def _tuple_dominates(a: tuple[int, ...], b: tuple[int, ...]) -> bool:
    return all(x >= y for x, y in zip(a, b)) and a != b


def _rep_key(q: QualityVector) -> tuple[int, ...]:
    return (q.w,) + q.prefix()


@dataclass(frozen=True)
class FuzzyDecision:
    composition: Composition
    representative: QualityVector
    support: tuple[tuple[QualityVector, Fraction], ...]
    corner: tuple[int, ...]


def _crisp(m: Morphology, c: Composition) -> QualityVector:
    """Quality vector of the aggregated estimates (a maximal-membership point)."""
    return quality_support(m, c, 0, False, False)[0][0]


def solve_fuzzy(
    m: Morphology,
    case: int = 1,
    alpha: Fraction | float | str = 0,
    pref: str = "maxmem",
    scope: str | None = None,
    min_w: int = 1,
    cap: int | None = None,
) -> list[FuzzyDecision]:
    """Feasible, non-dominated decisions under fuzzy estimates.

    A composition is feasible when the w of its aggregated estimates
    reaches ``min_w``.  Under ``pref="maxmem"`` a decision is preferred
    when its aggregated quality vector dominates, with the pessimistic
    corner of the support breaking exact ties; ``"pessimistic"`` swaps the
    two roles.
    """
    if pref not in PREFERENCES:
        raise ValidationError(f"pref must be one of {PREFERENCES}")
    fp, fc = _case_flags(case)
    decisions = []
    for comp, _ in admissible_with_quality(m, scope, 0, cap):
        rep = _crisp(m, comp)
        if rep.w < min_w:
            continue
        support = tuple(quality_support(m, comp, alpha, fp, fc))
        decisions.append(FuzzyDecision(comp, rep, support, pessimistic_corner(support)))

    def keys(d: FuzzyDecision) -> tuple[tuple[int, ...], tuple[int, ...]]:
        rep = _rep_key(d.representative)
        return (rep, d.corner) if pref == "maxmem" else (d.corner, rep)

    def better(a: FuzzyDecision, b: FuzzyDecision) -> bool:
        (a1, a2), (b1, b2) = keys(a), keys(b)
        if _tuple_dominates(a1, b1):
            return True
        return a1 == b1 and _tuple_dominates(a2, b2)

    return [decisions[i] for i in nondominated(decisions, better)]
