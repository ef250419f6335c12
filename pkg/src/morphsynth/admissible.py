"""Exhaustive generation of compatibility-admissible compositions."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Iterator

from .errors import CapExceededError, ValidationError
from .model import Composition, Morphology, env_cap

DEFAULT_CAP = 10**6


def _checks(m: Morphology, scope: str) -> tuple[list[str], list[list[int]]]:
    """Part ids in scope and, per part, the earlier parts it must be checked against."""
    parts = [p.id for p in m.leaves(scope)]
    earlier = [[j for j in range(i) if m.compat.covers(parts[j], parts[i])] for i in range(len(parts))]
    return parts, earlier


def _dfs(m: Morphology, parts: list[str], earlier: list[list[int]], min_level: int,
         prefix: list[str]) -> Iterator[tuple[str, ...]]:
    depth = len(prefix)
    if depth == len(parts):
        yield tuple(prefix)
        return
    level = m.compat.level
    for da in m.part(parts[depth]).ids:
        ok = True
        for j in earlier[depth]:
            v = level(prefix[j], da)
            if v is None:
                raise ValidationError(f"no compatibility declared for ({prefix[j]}, {da})")
            if v < min_level:
                ok = False
                break
        if ok:
            prefix.append(da)
            yield from _dfs(m, parts, earlier, min_level, prefix)
            prefix.pop()


def enumerate_admissible(
    m: Morphology,
    scope: str | None = None,
    min_level: int | None = None,
    cap: int | None = None,
    threads: int = 1,
) -> list[Composition]:
    """All compositions of ``scope`` whose covered pairs all reach ``min_level``.

    Output is in lexicographic order of (part order, DA order).  ``min_level``
    defaults to the top of the compatibility scale, which is the same as
    running on the binarized tables.  ``threads > 1`` splits the search by
    the first part's alternatives; the merge order does not depend on the
    schedule.
    """
    scope = scope or m.root.id
    m.node(scope)
    if min_level is None:
        min_level = m.l
    if not 1 <= min_level <= m.l:
        raise ValidationError(f"min_level {min_level} outside 1..{m.l}")
    cap = env_cap(DEFAULT_CAP) if cap is None else cap
    parts, earlier = _checks(m, scope)

    def branch(first: str) -> list[tuple[str, ...]]:
        out = []
        for das in _dfs(m, parts, earlier, min_level, [first]):
            out.append(das)
            if len(out) > cap:
                raise CapExceededError(f"more than {cap} admissible compositions")
        return out

    firsts = list(m.part(parts[0]).ids)
    if threads > 1 and len(firsts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(branch, firsts))
    else:
        chunks = [branch(f) for f in firsts]
    total = sum(len(c) for c in chunks)
    if total > cap:
        raise CapExceededError(f"more than {cap} admissible compositions")
    return [Composition(scope, tuple(zip(parts, das))) for chunk in chunks for das in chunk]


def is_admissible(m: Morphology, comp: Composition, min_level: int | None = None) -> bool:
    """Direct pairwise check, independent of the search above."""
    if min_level is None:
        min_level = m.l
    das = comp.das
    parts = comp.parts
    for i in range(len(das)):
        for j in range(i + 1, len(das)):
            if m.compat.covers(parts[i], parts[j]) and m.compat.level(das[i], das[j]) < min_level:
                return False
    return True
