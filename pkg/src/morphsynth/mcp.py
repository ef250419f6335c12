"""Multiple choice knapsack: pick one item per group under a shared budget.

Instances can be derived from a morphology: profit ``c = base - r`` from
DA priority and weight ``a = resource_base - z`` from a designated
resource criterion, with literal per-part overrides.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import floor, lcm
from typing import Any, Sequence

from .errors import CapExceededError, InfeasibleError, ValidationError
from .model import Morphology, env_cap, to_fraction

DP_CELL_CAP = 10**7
LABEL_CAP = 10**6


@dataclass(frozen=True)
class McpItem:
    id: str
    profit: Any  # Fraction, or a tuple of Fractions for the multicriteria variant
    weight: Fraction


@dataclass(frozen=True)
class McpInstance:
    groups: tuple[tuple[McpItem, ...], ...]
    budget: Fraction
    group_ids: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.groups:
            raise ValidationError("an MCP instance needs at least one group")
        for g in self.groups:
            if not g:
                raise ValidationError("every MCP group needs at least one item")
            for it in g:
                if it.weight < 0:
                    raise ValidationError(f"item {it.id} has negative weight")
        if self.group_ids and len(self.group_ids) != len(self.groups):
            raise ValidationError("group_ids and groups differ in length")
        object.__setattr__(self, "budget", to_fraction(self.budget))

    def item(self, item_id: str) -> McpItem:
        for g in self.groups:
            for it in g:
                if it.id == item_id:
                    return it
        raise ValidationError(f"unknown item {item_id!r}")


@dataclass(frozen=True)
class McpSolution:
    selection: tuple[str, ...]
    profit: Any
    weight: Fraction


def _resource_spec(cfg: dict, part_id: str) -> dict:
    spec = (cfg.get("resource") or {}).get(part_id)
    if not isinstance(spec, dict) or not ({"criterion", "override"} & set(spec)):
        raise ValidationError(f"no resource rule for part {part_id!r}")
    return spec


def _override(spec: dict, da_id: str) -> Fraction:
    value = spec["override"]
    if isinstance(value, dict):
        if da_id not in value:
            raise ValidationError(f"resource override lacks {da_id!r}")
        value = value[da_id]
    return to_fraction(value)


def derive_mcp_instance(
    m: Morphology,
    budget: Fraction | int | str,
    scope: str | None = None,
    profit_vector: bool = False,
) -> McpInstance:
    """Knapsack instance from a morphology and its ``mcp`` config block.

    The block holds ``profit_base`` (default ``k + 1``), ``resource_base``
    and per-part ``resource`` rules: ``{"criterion": id}`` gives
    ``a = resource_base - z``; ``{"override": value}`` (or a per-DA map)
    sets ``a`` literally.  With ``profit_vector`` each profit becomes
    ``(c, z)`` where ``z`` is the resource estimate, or the override value
    for overridden parts.
    """
    cfg = dict(m.config.get("mcp") or {})
    profit_base = to_fraction(cfg.get("profit_base", m.k + 1))
    groups = []
    ids = []
    for part in m.leaves(scope):
        spec = _resource_spec(cfg, part.id)
        items = []
        for da in part.alternatives:
            if da.priority is None:
                raise ValidationError(f"{da.id} has no priority")
            c = profit_base - da.priority
            if "override" in spec:
                a = _override(spec, da.id)
                z = a
            else:
                if "resource_base" not in cfg:
                    raise ValidationError("mcp config lacks resource_base")
                z = da.estimate(spec["criterion"])
                a = to_fraction(cfg["resource_base"]) - z
            if a < 0:
                raise ValidationError(f"derived weight of {da.id} is negative")
            items.append(McpItem(da.id, (c, z) if profit_vector else c, a))
        groups.append(tuple(items))
        ids.append(part.id)
    return McpInstance(tuple(groups), to_fraction(budget), tuple(ids))


def ratio(item: McpItem) -> Fraction | float:
    return float("inf") if item.weight == 0 else Fraction(item.profit) / item.weight


def truncated(x: Fraction, places: int = 2) -> Fraction:
    """``x`` cut (not rounded) to ``places`` decimals, as ratios are printed."""
    q = 10**places
    return Fraction(floor(Fraction(x) * q), q)


def _solution(items: Sequence[McpItem]) -> McpSolution:
    profit = sum((Fraction(it.profit) for it in items), Fraction(0))
    return McpSolution(tuple(it.id for it in items), profit, sum((it.weight for it in items), Fraction(0)))


def _min_weight_base(inst: McpInstance) -> list[McpItem]:
    base = []
    for g in inst.groups:
        base.append(min(g, key=lambda it: (it.weight, -Fraction(it.profit))))
    if sum(it.weight for it in base) > inst.budget:
        raise InfeasibleError("even the lightest items exceed the budget")
    return base


def _greedy_priority(inst: McpInstance) -> list[McpItem]:
    chosen = _min_weight_base(inst)
    slack = inst.budget - sum(it.weight for it in chosen)
    for gi, g in enumerate(inst.groups):
        room = slack + chosen[gi].weight
        fits = [it for it in g if it.weight <= room]
        best = min(fits, key=lambda it: (-Fraction(it.profit), it.weight))
        slack = room - best.weight
        chosen[gi] = best
    return chosen


def _greedy_ratio(inst: McpInstance) -> list[McpItem]:
    _min_weight_base(inst)  # feasibility check
    chosen = [min(g, key=lambda it: (-ratio(it), it.weight)) for g in inst.groups]
    while True:
        weight = sum(it.weight for it in chosen)
        over = weight > inst.budget
        best = None
        best_key = None
        for gi, g in enumerate(inst.groups):
            cur = chosen[gi]
            for it in g:
                dw = it.weight - cur.weight
                dp = Fraction(it.profit) - Fraction(cur.profit)
                if over:
                    if dw >= 0:
                        continue
                    key = (dp / -dw,)  # least profit lost per unit of weight saved
                else:
                    if dp <= 0 or weight + dw > inst.budget:
                        continue
                    key = (float("inf") if dw <= 0 else dp / dw,)
                if best_key is None or key > best_key:
                    best, best_key = (gi, it), key
        if best is None:
            if over:
                raise InfeasibleError("repair could not meet the budget")
            return chosen
        chosen[best[0]] = best[1]


GREEDY_STRATEGIES = ("priority", "ratio")


def solve_mcp_greedy(inst: McpInstance, strategy: str = "priority") -> McpSolution:
    """Heuristic selection.

    ``priority`` (default) starts from each group's lightest item (ties to
    higher profit, then input order) and walks the groups in order,
    upgrading each to the most profitable item the remaining slack allows
    (ties to lower weight, then input order).  ``ratio`` starts from each
    group's best profit/weight item and applies single swaps: while over
    budget the one losing least profit per unit of weight saved, then
    profit-raising swaps with the best gain per unit of weight.
    """
    if strategy == "priority":
        chosen = _greedy_priority(inst)
    elif strategy == "ratio":
        chosen = _greedy_ratio(inst)
    else:
        raise ValidationError(f"unknown greedy strategy {strategy!r}")
    return _solution(chosen)


def _scale(inst: McpInstance, cap: int) -> tuple[list[list[int]], int]:
    den = 1
    for g in inst.groups:
        for it in g:
            den = lcm(den, it.weight.denominator)
    den = lcm(den, inst.budget.denominator)
    weights = [[int(it.weight * den) for it in g] for g in inst.groups]
    budget = int(inst.budget * den) if inst.budget >= 0 else -1
    if (budget + 1) * len(inst.groups) > cap:
        raise CapExceededError(f"DP grid of {(budget + 1) * len(inst.groups)} cells exceeds {cap}")
    return weights, budget


def solve_mcp_exact(inst: McpInstance, cap: int | None = None) -> McpSolution:
    """Profit-optimal selection by dynamic programming over integer-scaled weights.

    Ties go to lower total weight, then to the lexicographically first
    selection in item order.
    """
    cap = env_cap(DP_CELL_CAP) if cap is None else cap
    weights, budget = _scale(inst, cap)
    # state: scaled weight -> (profit, index tuple)
    states: dict[int, tuple[Fraction, tuple[int, ...]]] = {0: (Fraction(0), ())}
    for gi, g in enumerate(inst.groups):
        nxt: dict[int, tuple[Fraction, tuple[int, ...]]] = {}
        for w, (p, sel) in states.items():
            for ii, it in enumerate(g):
                nw = w + weights[gi][ii]
                if nw > budget:
                    continue
                cand = (p + Fraction(it.profit), sel + (ii,))
                old = nxt.get(nw)
                if old is None or cand[0] > old[0] or (cand[0] == old[0] and cand[1] < old[1]):
                    nxt[nw] = cand
        states = nxt
        if not states:
            raise InfeasibleError("no selection fits the budget")
    w, (p, sel) = min(states.items(), key=lambda kv: (-kv[1][0], kv[0], kv[1][1]))
    return _solution([inst.groups[gi][ii] for gi, ii in enumerate(sel)])


def _vec(profit: Any) -> tuple[Fraction, ...]:
    if isinstance(profit, tuple):
        return tuple(Fraction(x) for x in profit)
    return (Fraction(profit),)


def _vec_dominates(a: tuple, b: tuple) -> bool:
    return all(x >= y for x, y in zip(a, b)) and a != b


def solve_mcp_multicriteria(inst: McpInstance, cap: int | None = None) -> list[McpSolution]:
    """Exact Pareto frontier of profit vectors over feasible selections.

    A label DP keeps, per group prefix, the (weight, profit) labels not
    dominated by a lighter-or-equal label with no lower profit.  Each
    frontier vector is reported once, by its lightest and then
    lexicographically first selection; output is sorted by descending
    profit vector.
    """
    cap = env_cap(LABEL_CAP) if cap is None else cap
    dims = {len(_vec(it.profit)) for g in inst.groups for it in g}
    if len(dims) != 1:
        raise ValidationError("all profit vectors must share one dimension")
    labels: list[tuple[Fraction, tuple[Fraction, ...], tuple[int, ...]]] = [
        (Fraction(0), (Fraction(0),) * dims.pop(), ())
    ]
    for g in inst.groups:
        cands = []
        for w, p, sel in labels:
            for ii, it in enumerate(g):
                nw = w + it.weight
                if nw > inst.budget:
                    continue
                cands.append((nw, tuple(a + b for a, b in zip(p, _vec(it.profit))), sel + (ii,)))
        if not cands:
            raise InfeasibleError("no selection fits the budget")
        cands.sort(key=lambda t: (t[0], tuple(-x for x in t[1]), t[2]))
        kept: list[tuple[Fraction, tuple[Fraction, ...], tuple[int, ...]]] = []
        for cand in cands:
            # sorted by weight, so only earlier labels can dominate
            if any(all(x >= y for x, y in zip(k[1], cand[1])) for k in kept):
                continue
            kept.append(cand)
            if len(kept) > cap:
                raise CapExceededError(f"more than {cap} DP labels")
        labels = kept
    front: dict[tuple[Fraction, ...], tuple[Fraction, tuple[int, ...]]] = {}
    for w, p, sel in labels:
        if p not in front or (w, sel) < front[p]:
            front[p] = (w, sel)
    vectors = [p for p in front if not any(_vec_dominates(q, p) for q in front)]
    vectors.sort(reverse=True)
    out = []
    for p in vectors:
        w, sel = front[p]
        items = [inst.groups[gi][ii] for gi, ii in enumerate(sel)]
        out.append(McpSolution(tuple(it.id for it in items), p, w))
    return out
