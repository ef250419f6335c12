"""Brute-force reference implementations and random instance strategies.

Nothing here calls the search code under test; every oracle walks the full
product space directly.
"""

from fractions import Fraction
from itertools import product

from hypothesis import strategies as st

from morphsynth.hmmd import QualityVector, census, quality_dominates
from morphsynth.mcp import McpInstance, McpItem
from morphsynth.model import Composition, validate_morphology


def all_compositions(m, scope=None):
    parts = m.leaves(scope)
    scope = scope or m.root.id
    for das in product(*(p.ids for p in parts)):
        yield Composition(scope, tuple(zip((p.id for p in parts), das)))


def brute_level(m, comp):
    """Min level over sibling-table pairs, straight from the raw entries."""
    levels = []
    das = comp.das
    for i in range(len(das)):
        for j in range(i + 1, len(das)):
            v = m.compat.entries.get(frozenset((das[i], das[j])))
            if v is not None:
                levels.append(v)
    return min(levels) if levels else None


def brute_admissible(m, min_level, scope=None):
    out = []
    for c in all_compositions(m, scope):
        w = brute_level(m, c)
        if w is None or w >= min_level:
            out.append(c)
    return out


def brute_quality(m, comp):
    w = brute_level(m, comp)
    return QualityVector(m.l if w is None else w,
                         census((m.alternative(d).priority for d in comp.das), m.k))


def brute_clique(m, min_w=1, scope=None):
    cands = [(c, brute_quality(m, c)) for c in all_compositions(m, scope)]
    cands = [(c, q) for c, q in cands if q.w >= min_w]
    return [(c, q) for c, q in cands if not any(quality_dominates(q2, q) for _, q2 in cands)]


def brute_pareto(vectors, sense=min):
    """Indices of vectors not dominated; ``sense`` min means smaller is better."""
    def better(a, b):
        if sense is min:
            return all(x <= y for x, y in zip(a, b)) and a != b
        return all(x >= y for x, y in zip(a, b)) and a != b
    return [i for i, v in enumerate(vectors) if not any(better(u, v) for u in vectors)]


def brute_mcp(inst):
    """(best profit, feasible count) over all selections, or (None, 0)."""
    best = None
    feasible = 0
    for combo in product(*inst.groups):
        if sum(it.weight for it in combo) <= inst.budget:
            feasible += 1
            p = sum(Fraction(it.profit) for it in combo)
            if best is None or p > best:
                best = p
    return best, feasible


# ---------------------------------------------------------------------------
# Strategies
# ---------------------------------------------------------------------------

LEVELS = st.integers(0, 3)


@st.composite
def mcp_instances(draw, max_groups=4, max_items=5, vector=False):
    n = draw(st.integers(1, max_groups))
    groups = []
    for g in range(n):
        size = draw(st.integers(1, max_items))
        items = []
        for i in range(size):
            weight = Fraction(draw(st.integers(0, 20)), draw(st.sampled_from([1, 2, 5, 10])))
            if vector:
                profit = (Fraction(draw(st.integers(0, 9))), Fraction(draw(st.integers(0, 9))))
            else:
                profit = Fraction(draw(st.integers(0, 9)))
            items.append(McpItem(f"g{g}i{i}", profit, weight))
        groups.append(tuple(items))
    budget = Fraction(draw(st.integers(0, 60)), 2)
    return McpInstance(tuple(groups), budget, tuple(f"g{g}" for g in range(n)))


def _one_hot(size, index):
    return ["1" if i == index else "0" for i in range(size)]


@st.composite
def morphology_docs(draw, max_parts=4, max_das=4, nested=None, fuzzy=False, singleton=False):
    """A random valid instance document.

    ``nested`` forces (True) or forbids (False) a two-level tree.  With
    ``fuzzy`` the priorities and compatibilities get membership vectors;
    ``singleton`` makes every vector one-hot.
    """
    n = draw(st.integers(2, max_parts))
    sizes = [draw(st.integers(1, max_das)) for _ in range(n)]
    names = [f"P{i}" for i in range(n)]
    if nested is None:
        nested = n >= 4 and draw(st.booleans())
    nested = nested and n >= 4
    if nested:
        cut = draw(st.integers(2, n - 2))
        groups = [names[:cut], names[cut:]]
        system = {"id": "S", "children": [
            {"id": f"G{g}", "children": [{"id": p} for p in grp]} for g, grp in enumerate(groups)
        ]}
        tables = {f"G{g}": grp for g, grp in enumerate(groups)}
    else:
        system = {"id": "S", "children": [{"id": p} for p in names]}
        tables = {"S": names}
    alternatives = {}
    for p, size in zip(names, sizes):
        das = []
        for i in range(size):
            r = draw(st.integers(1, 3))
            da = {"id": f"{p}_{i}"}
            if fuzzy and singleton:
                da["fuzzy_priority"] = _one_hot(3, r - 1)
            elif fuzzy:
                raw = [draw(st.integers(0, 4)) for _ in range(3)]
                if not any(raw):
                    raw[r - 1] = 1
                da["fuzzy_priority"] = [str(Fraction(x, sum(raw))) for x in raw]
            else:
                da["priority"] = r
            das.append(da)
        alternatives[p] = das
    compatibility = {}
    for node, parts in tables.items():
        rows = []
        for x in range(len(parts)):
            for y in range(x + 1, len(parts)):
                for i in range(sizes[names.index(parts[x])]):
                    for j in range(sizes[names.index(parts[y])]):
                        entry = {"a": f"{parts[x]}_{i}", "b": f"{parts[y]}_{j}"}
                        level = draw(LEVELS)
                        if fuzzy and singleton:
                            entry["fuzzy"] = _one_hot(4, 3 - level)
                        elif fuzzy:
                            raw = [draw(st.integers(0, 4)) for _ in range(4)]
                            if not any(raw):
                                raw[3 - level] = 1
                            entry["fuzzy"] = [str(Fraction(v, sum(raw))) for v in raw]
                        else:
                            entry["level"] = level
                        rows.append(entry)
        compatibility[node] = rows
    return {"name": "random", "scales": {"k": 3, "l": 3}, "system": system,
            "alternatives": alternatives, "compatibility": compatibility}


def morphologies(**kwargs):
    return morphology_docs(**kwargs).map(validate_morphology)
