"""Quadratic assignment form of morphological choice.

Objective: linear item profits plus a nonnegative profit ``d`` for every
pair of selected items from different groups.  Selections respect a
shared weight budget and pick one item per group, or at most one when
``at_most_one`` is set.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import prod
from typing import Any, Mapping, Sequence

from .errors import CapExceededError, InfeasibleError, ValidationError
from .mcp import McpInstance, derive_mcp_instance
from .model import Morphology, env_cap, pair_key, to_fraction
from .pareto import nondominated

SPACE_CAP = 10**6


@dataclass(frozen=True)
class QapItem:
    id: str
    profit: Any  # Fraction, or a tuple for the multicriteria variant
    weight: Fraction


@dataclass(frozen=True)
class QapInstance:
    groups: tuple[tuple[QapItem, ...], ...]
    budget: Fraction
    pair_profit: Mapping[frozenset[str], Fraction] = field(default_factory=dict)
    at_most_one: bool = False
    group_ids: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.groups or any(not g for g in self.groups):
            raise ValidationError("QAP groups must be nonempty")
        group_of: dict[str, int] = {}
        for gi, g in enumerate(self.groups):
            for it in g:
                if it.id in group_of:
                    raise ValidationError(f"duplicate item id {it.id!r}")
                if it.weight < 0:
                    raise ValidationError(f"item {it.id} has negative weight")
                group_of[it.id] = gi
        d = {}
        for key, value in dict(self.pair_profit).items():
            key = frozenset(key)
            ids = sorted(key)
            if len(ids) != 2 or any(i not in group_of for i in ids):
                raise ValidationError(f"pair profit key {ids} must name two known items")
            if group_of[ids[0]] == group_of[ids[1]]:
                raise ValidationError(f"pair profit {ids} joins items of one group")
            value = to_fraction(value)
            if value < 0:
                raise ValidationError(f"pair profit {ids} is negative")
            d[key] = value
        object.__setattr__(self, "pair_profit", d)
        object.__setattr__(self, "budget", to_fraction(self.budget))
        object.__setattr__(self, "_group_of", group_of)

    def group_of(self, item_id: str) -> int:
        try:
            return self._group_of[item_id]  # type: ignore[attr-defined]
        except KeyError:
            raise ValidationError(f"unknown item {item_id!r}") from None

    def item(self, item_id: str) -> QapItem:
        for it in self.groups[self.group_of(item_id)]:
            if it.id == item_id:
                return it
        raise ValidationError(f"unknown item {item_id!r}")

    def d(self, a: str, b: str) -> Fraction:
        return self.pair_profit.get(pair_key(a, b), Fraction(0))


@dataclass(frozen=True)
class QapSolution:
    selection: tuple[str | None, ...]
    objective: Any
    weight: Fraction


def from_mcp(inst: McpInstance, pair_profit: Mapping[frozenset[str], Any] | None = None,
             at_most_one: bool = False) -> QapInstance:
    groups = tuple(tuple(QapItem(it.id, it.profit, it.weight) for it in g) for g in inst.groups)
    return QapInstance(groups, inst.budget, dict(pair_profit or {}), at_most_one, inst.group_ids)


def derive_qap_instance(m: Morphology, budget: Fraction | int | str, at_most_one: bool = False,
                        scope: str | None = None, profit_vector: bool = False) -> QapInstance:
    """Profits and weights as for the knapsack; ``d`` is the compatibility level."""
    base = derive_mcp_instance(m, budget, scope, profit_vector)
    d = {key: Fraction(level) for key, level in m.compat.entries.items() if level > 0}
    ids = {it.id for g in base.groups for it in g}
    d = {k: v for k, v in d.items() if k <= ids}
    return from_mcp(base, d, at_most_one)


def _selected(inst: QapInstance, sel: Sequence[str | None] | Mapping[Any, str]) -> list[str]:
    ids = list(sel.values()) if isinstance(sel, Mapping) else list(sel)
    ids = [i for i in ids if i is not None]
    seen: set[int] = set()
    for i in ids:
        g = inst.group_of(i)
        if g in seen:
            raise ValidationError(f"two items selected from group {g}")
        seen.add(g)
    return ids


def qap_objective(inst: QapInstance, sel: Sequence[str | None] | Mapping[Any, str]) -> Fraction:
    """Linear profit plus the pair profit of every selected cross-group pair."""
    ids = _selected(inst, sel)
    total = sum((Fraction(inst.item(i).profit) for i in ids), Fraction(0))
    for x in range(len(ids)):
        for y in range(x + 1, len(ids)):
            total += inst.d(ids[x], ids[y])
    return total


def _check_space(inst: QapInstance, cap: int | None) -> None:
    cap = env_cap(SPACE_CAP) if cap is None else cap
    extra = 1 if inst.at_most_one else 0
    space = prod(len(g) + extra for g in inst.groups)
    if space > cap:
        raise CapExceededError(f"selection space {space} exceeds cap {cap}")


def _choices(inst: QapInstance, gi: int) -> list[QapItem | None]:
    out: list[QapItem | None] = list(inst.groups[gi])
    if inst.at_most_one:
        out.append(None)
    return out


def _search(inst: QapInstance, first: QapItem | None, visit, score: bool = True) -> None:
    """Depth-first walk of feasible selections, item order then ``None``.

    With ``score`` the running scalar objective is passed to ``visit``.
    """
    n = len(inst.groups)
    rest_min = [Fraction(0)] * (n + 1)
    for gi in range(n - 1, -1, -1):
        lightest = Fraction(0) if inst.at_most_one else min(it.weight for it in inst.groups[gi])
        rest_min[gi] = rest_min[gi + 1] + lightest
    chosen: list[QapItem | None] = []

    def dfs(gi: int, weight: Fraction, value: Fraction) -> None:
        if gi == n:
            visit(tuple(chosen), value, weight)
            return
        options = [first] if gi == 0 else _choices(inst, gi)
        for it in options:
            if it is None:
                if weight + rest_min[gi + 1] <= inst.budget:
                    chosen.append(None)
                    dfs(gi + 1, weight, value)
                    chosen.pop()
                continue
            nw = weight + it.weight
            if nw + rest_min[gi + 1] > inst.budget:
                continue
            gain = Fraction(0)
            if score:
                gain = Fraction(it.profit) + sum(
                    (inst.d(it.id, prev.id) for prev in chosen if prev is not None), Fraction(0)
                )
            chosen.append(it)
            dfs(gi + 1, nw, value + gain)
            chosen.pop()

    dfs(0, Fraction(0), Fraction(0))


def solve_qap_exact(inst: QapInstance, cap: int | None = None, threads: int = 1) -> QapSolution:
    """Objective-maximal feasible selection by pruned exhaustive search.

    The first maximum in search order wins (items in declaration order,
    the empty choice last).
    """
    _check_space(inst, cap)

    def branch(first: QapItem | None) -> tuple | None:
        best: list[tuple | None] = [None]

        def visit(chosen, value, weight):
            if best[0] is None or value > best[0][1]:
                best[0] = (chosen, value, weight)

        _search(inst, first, visit)
        return best[0]

    firsts = _choices(inst, 0)
    if threads > 1 and len(firsts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(branch, firsts))
    else:
        results = [branch(f) for f in firsts]
    best = None
    for r in results:
        if r is not None and (best is None or r[1] > best[1]):
            best = r
    if best is None:
        raise InfeasibleError("no selection fits the budget")
    chosen, value, weight = best
    return QapSolution(tuple(it.id if it else None for it in chosen), value, weight)


def _ratio(gain: Fraction, weight: Fraction) -> Fraction | float:
    if weight == 0:
        return float("inf") if gain > 0 else (0 if gain == 0 else float("-inf"))
    return gain / weight


def solve_qap_greedy(inst: QapInstance) -> QapSolution:
    """Walk the groups in order, taking the item with the best marginal gain per unit weight.

    The marginal gain is the item's profit plus its pair profits with the
    items already taken.  Weight is reserved for the lightest items of the
    groups still ahead.  Ties go to lower weight, then declaration order.
    Under ``at_most_one`` a group is skipped when nothing fits or no item
    has positive gain.
    """
    n = len(inst.groups)
    rest_min = [Fraction(0)] * (n + 1)
    for gi in range(n - 1, -1, -1):
        lightest = Fraction(0) if inst.at_most_one else min(it.weight for it in inst.groups[gi])
        rest_min[gi] = rest_min[gi + 1] + lightest
    if rest_min[0] > inst.budget:
        raise InfeasibleError("even the lightest items exceed the budget")
    chosen: list[QapItem | None] = []
    weight = Fraction(0)
    for gi, g in enumerate(inst.groups):
        best = None
        best_key = None
        for it in g:
            if weight + it.weight + rest_min[gi + 1] > inst.budget:
                continue
            gain = Fraction(it.profit) + sum(
                (inst.d(it.id, p.id) for p in chosen if p is not None), Fraction(0)
            )
            if inst.at_most_one and gain <= 0:
                continue
            key = (_ratio(gain, it.weight), -it.weight)
            if best_key is None or key > best_key:
                best, best_key = it, key
        if best is None and not inst.at_most_one:
            raise InfeasibleError(f"nothing fits in group {gi}")
        chosen.append(best)
        if best is not None:
            weight += best.weight
    sel = tuple(it.id if it else None for it in chosen)
    return QapSolution(sel, qap_objective(inst, sel), weight)


def _vector(profit: Any) -> tuple[Fraction, ...]:
    if isinstance(profit, tuple):
        return tuple(Fraction(x) for x in profit)
    return (Fraction(profit),)


def solve_qap_pareto(inst: QapInstance, cap: int | None = None,
                     pair_component: bool = True) -> list[tuple[QapSolution, tuple[Fraction, ...]]]:
    """Pareto-efficient selections for vector profits, by exhaustive search.

    The objective vector holds one linear sum per profit component and, if
    ``pair_component``, the total pair profit as a last component.  All
    selections sharing a frontier vector are reported, in search order.
    """
    _check_space(inst, cap)
    dims = {len(_vector(it.profit)) for g in inst.groups for it in g}
    if len(dims) != 1:
        raise ValidationError("all profit vectors must share one dimension")
    dim = dims.pop()
    found: list[tuple[QapSolution, tuple[Fraction, ...]]] = []

    def visit(chosen, _value, weight):
        picked = [it for it in chosen if it is not None]
        vec = [Fraction(0)] * dim
        for it in picked:
            vec = [a + b for a, b in zip(vec, _vector(it.profit))]
        if pair_component:
            pairs = sum((inst.d(picked[i].id, picked[j].id)
                         for i in range(len(picked)) for j in range(i + 1, len(picked))), Fraction(0))
            vec.append(pairs)
        sel = tuple(it.id if it else None for it in chosen)
        found.append((QapSolution(sel, tuple(vec), weight), tuple(vec)))

    for first in _choices(inst, 0):
        _search(inst, first, visit, score=False)
    if not found:
        raise InfeasibleError("no selection fits the budget")

    def dom(a, b):
        return all(x >= y for x, y in zip(a, b)) and a != b

    keep = nondominated([v for _, v in found], dom)
    return [found[i] for i in keep]
