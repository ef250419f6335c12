"""Hierarchical morphological design with ordinal quality vectors.

A composition S is judged by N(S) = (w; n_1..n_k): w is the minimum
compatibility over its covered DA pairs and n_r counts the selected DAs
of priority r.  Censuses are ordered by prefix sums (more DAs in the best
t levels, for every t, is better).  That order is the one drawn as a
lattice for k = 3 and three parts.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import CapExceededError, ValidationError
from .model import Composition, Morphology, SystemNode, composition_level, env_cap
from .pareto import nondominated

DEFAULT_CAP = 10**6


@dataclass(frozen=True, order=True)
class QualityVector:
    w: int
    n: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.n)

    @property
    def m(self) -> int:
        return sum(self.n)

    def prefix(self) -> tuple[int, ...]:
        out, acc = [], 0
        for c in self.n:
            acc += c
            out.append(acc)
        return tuple(out)

    def __str__(self) -> str:
        return f"({self.w}; {','.join(str(c) for c in self.n)})"

    @classmethod
    def parse(cls, text: str) -> "QualityVector":
        """Inverse of ``str``: ``"(3; 2,0,0)"`` -> QualityVector(3, (2, 0, 0))."""
        body = text.strip().strip("()")
        w, _, rest = body.partition(";")
        return cls(int(w), tuple(int(x) for x in rest.split(",")))


def census(priorities: Iterable[int], k: int) -> tuple[int, ...]:
    n = [0] * k
    for r in priorities:
        if not 1 <= r <= k:
            raise ValidationError(f"priority {r} outside 1..{k}")
        n[r - 1] += 1
    return tuple(n)


def quality_vector(m: Morphology, c: Composition) -> QualityVector:
    """N(S) of a composition.  Scopes without covered pairs get w = l."""
    prios = []
    for da_id in c.das:
        r = m.alternative(da_id).priority
        if r is None:
            raise ValidationError(f"{da_id} has no priority")
        prios.append(r)
    w = composition_level(m, c)
    return QualityVector(m.l if w is None else w, census(prios, m.k))


def quality_dominates(a: QualityVector, b: QualityVector) -> bool:
    """Strict lattice dominance: w no lower, every prefix sum no lower, one strict."""
    if a.k != b.k:
        raise ValidationError(f"census lengths differ: {a.k} vs {b.k}")
    if a.m != b.m:
        raise ValidationError(f"census totals differ: {a.m} vs {b.m}")
    if a.w < b.w:
        return False
    pa, pb = a.prefix(), b.prefix()
    if any(x < y for x, y in zip(pa, pb)):
        return False
    return a.w > b.w or pa != pb


def integrate_quality(a: QualityVector, b: QualityVector) -> QualityVector:
    """Quality of a composite made of two disjoint components."""
    if a.k != b.k:
        raise ValidationError(f"census lengths differ: {a.k} vs {b.k}")
    return QualityVector(min(a.w, b.w), tuple(x + y for x, y in zip(a.n, b.n)))


def covers(a: QualityVector, b: QualityVector) -> bool:
    """True iff ``a`` dominates ``b`` with nothing strictly in between.

    Within one w level that means the prefix sums differ by one in a single
    position; across levels it means equal censuses and w one apart.
    """
    if not quality_dominates(a, b):
        return False
    diff = sum(x - y for x, y in zip(a.prefix(), b.prefix()))
    return (a.w - b.w) + diff == 1


def lattice_below(q: QualityVector) -> list[QualityVector]:
    """Vectors one lattice step below ``q`` (never below w = 0)."""
    out = []
    if q.w > 0:
        out.append(QualityVector(q.w - 1, q.n))
    for r in range(q.k - 1):
        if q.n[r] > 0:
            n = list(q.n)
            n[r] -= 1
            n[r + 1] += 1
            out.append(QualityVector(q.w, tuple(n)))
    return out


Solution = tuple[Composition, QualityVector]


def _frontier(items: Sequence[Solution]) -> list[Solution]:
    keep = nondominated([q for _, q in items], quality_dominates)
    return [items[i] for i in keep]


def _leaf_options(m: Morphology, node: SystemNode) -> list[Solution]:
    out = []
    for da in node.part.alternatives:
        if da.priority is None:
            raise ValidationError(f"{da.id} has no priority")
        out.append((Composition(node.id, ((node.part.id, da.id),)),
                    QualityVector(m.l, census([da.priority], m.k))))
    return out


def _cross(m: Morphology, scope: str, options: list[list[Solution]], min_w: int,
           cap: int, threads: int = 1) -> list[Solution]:
    """Cross product of option lists with incremental w pruning.

    Each option is a composition over a disjoint group of parts.  Covered
    DA pairs across groups lower w; groups inside one option already carry
    their own w.
    """
    compat = m.compat
    group_parts = [opts[0][0].parts if opts else () for opts in options]

    def link(i: int, j: int) -> list[tuple[int, int]]:
        return [(a, b) for a, pa in enumerate(group_parts[i]) for b, pb in enumerate(group_parts[j])
                if compat.covers(pa, pb)]

    links = [[(j, link(j, i)) for j in range(i) if link(j, i)] for i in range(len(options))]

    def dfs(depth: int, chosen: list[Solution], w: int, out: list[Solution]) -> None:
        if depth == len(options):
            sel = tuple(x for comp, _ in chosen for x in comp.selection)
            n = tuple(sum(col) for col in zip(*(q.n for _, q in chosen)))
            out.append((Composition(scope, sel), QualityVector(w, n)))
            if len(out) > cap:
                raise CapExceededError(f"more than {cap} candidate composites")
            return
        for comp, q in options[depth]:
            cw = min(w, q.w)
            if cw < min_w:
                continue
            for j, pairs in links[depth]:
                prev = chosen[j][0].das
                for a, b in pairs:
                    cw = min(cw, compat.level(prev[a], comp.das[b]))
                if cw < min_w:
                    break
            if cw < min_w:
                continue
            chosen.append((comp, q))
            dfs(depth + 1, chosen, cw, out)
            chosen.pop()

    if not options or any(not opts for opts in options):
        return []

    def branch(first: Solution) -> list[Solution]:
        out: list[Solution] = []
        if first[1].w >= min_w:
            dfs(1, [first], first[1].w, out)
        return out

    if threads > 1 and len(options[0]) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(branch, options[0]))
    else:
        chunks = [branch(f) for f in options[0]]
    merged = [s for chunk in chunks for s in chunk]
    if len(merged) > cap:
        raise CapExceededError(f"more than {cap} candidate composites")
    return merged


def _check_min_w(m: Morphology, min_w: int) -> None:
    if not 0 <= min_w <= m.l:
        raise ValidationError(f"min_w {min_w} outside 0..{m.l}")


def admissible_with_quality(m: Morphology, scope: str | None = None, min_w: int = 1,
                            cap: int | None = None, threads: int = 1) -> list[Solution]:
    """Every composition of ``scope`` with w >= min_w, flat over its leaves."""
    scope = scope or m.root.id
    _check_min_w(m, min_w)
    node = m.node(scope)
    leaves = [n for n in node.walk() if n.is_leaf]
    cap = env_cap(DEFAULT_CAP) if cap is None else cap
    return _cross(m, scope, [_leaf_options(m, n) for n in leaves], min_w, cap, threads)


def solve_morphological_clique(m: Morphology, scope: str | None = None, min_w: int = 1,
                               cap: int | None = None, threads: int = 1) -> list[Solution]:
    """Pareto-efficient compositions of ``scope`` among those with w >= min_w.

    An empty admissible set yields an empty list.
    """
    return _frontier(admissible_with_quality(m, scope, min_w, cap, threads))


def _isolated(m: Morphology, node: SystemNode) -> bool:
    """No covered pair links a part under ``node`` with a part outside it."""
    inside = {p.id for p in node.leaves()}
    for pair in m.compat.part_pairs:
        if len(pair & inside) == 1:
            return False
    return True


def solve_hierarchical(m: Morphology, min_w: int = 1, prune: bool = True,
                       cap: int | None = None, threads: int = 1) -> list[Solution]:
    """Bottom-up composition over the system tree.

    Each internal node crosses its children's surviving composites,
    integrating quality by (min, +) and lowering w by any covered pair
    between children, then keeps the Pareto-efficient ones.  With
    ``prune=False`` inner nodes keep every admissible composite and only
    the root is filtered.  A child linked by compatibility to parts
    outside itself is never pruned, since its dominated composites may
    still pair better across the link.
    """
    _check_min_w(m, min_w)
    cap = env_cap(DEFAULT_CAP) if cap is None else cap

    def solve(node: SystemNode, is_root: bool) -> list[Solution]:
        if node.is_leaf:
            return _leaf_options(m, node)
        options = []
        for child in node.children:
            opts = solve(child, False)
            if prune and not child.is_leaf and _isolated(m, child):
                opts = _frontier(opts)
            options.append(opts)
        merged = _cross(m, node.id, options, min_w, cap, threads if is_root else 1)
        return _frontier(merged) if is_root else merged

    root = m.root
    if root.is_leaf:
        return _leaf_options(m, root)
    return solve(root, True)


def neighborhood(m: Morphology, frontier: Sequence[Solution], scope: str | None = None,
                 min_w: int = 1, cap: int | None = None) -> list[Solution]:
    """Admissible compositions sitting one lattice step below a frontier vector."""
    targets = {q2 for _, q in frontier for q2 in lattice_below(q)}
    on_frontier = {c for c, _ in frontier}
    return [
        (c, q) for c, q in admissible_with_quality(m, scope, min_w, cap)
        if q in targets and c not in on_frontier
    ]


def hasse_edges(k: int, total: int) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Covering pairs among all censuses of ``total`` DAs over ``k`` levels."""
    def compositions_of(n: int, parts: int) -> list[tuple[int, ...]]:
        if parts == 1:
            return [(n,)]
        return [(i,) + rest for i in range(n, -1, -1) for rest in compositions_of(n - i, parts - 1)]

    vecs = [QualityVector(0, c) for c in compositions_of(total, k)]
    return [(a.n, b.n) for a in vecs for b in vecs if covers(a, b)]
