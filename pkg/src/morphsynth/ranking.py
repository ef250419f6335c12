"""Ordinal priorities for a part's design alternatives.

Two rankers are offered.  ``dominance_layers`` peels off successive
non-dominated layers.  ``weighted_outranking`` builds a concordance
digraph (x outranks y when the weights of the criteria on which x is at
least as good as y reach a majority threshold), condenses its strongly
connected components and numbers the condensation by source layers.
Layers beyond ``k`` are clamped to ``k``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import networkx as nx

from .errors import ValidationError
from .model import MAXIMIZE, DesignAlternative, Morphology, Part, SystemNode, to_fraction
from .pareto import dominates

DOMINANCE_LAYERS = "dominance_layers"
WEIGHTED_OUTRANKING = "weighted_outranking"
METHODS = (DOMINANCE_LAYERS, WEIGHTED_OUTRANKING)


@dataclass(frozen=True)
class RankingConfig:
    method: str = DOMINANCE_LAYERS
    concordance_threshold: Fraction = Fraction(2, 3)
    k: int = 3

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ValidationError(f"unknown ranking method {self.method!r}")
        t = to_fraction(self.concordance_threshold)
        object.__setattr__(self, "concordance_threshold", t)
        if not Fraction(1, 2) < t <= 1:
            raise ValidationError("concordance threshold must lie in (0.5, 1]")
        if self.k < 1:
            raise ValidationError("k must be at least 1")


def _matrix(part: Part) -> list[tuple[Fraction, ...]]:
    if not part.criteria:
        raise ValidationError(f"part {part.id} declares no criteria to rank on")
    rows = []
    for a in part.alternatives:
        if not a.estimates:
            raise ValidationError(f"{a.id} has no estimates")
        rows.append(tuple(a.estimate(c.id) for c in part.criteria))
    return rows


def _layers_by_dominance(rows: list[tuple[Fraction, ...]], directions: list[str]) -> list[int]:
    layer = [0] * len(rows)
    remaining = list(range(len(rows)))
    current = 1
    while remaining:
        front = [
            i for i in remaining
            if not any(dominates(rows[j], rows[i], directions) for j in remaining if j != i)
        ]
        for i in front:
            layer[i] = current
        remaining = [i for i in remaining if i not in front]
        current += 1
    return layer


def concordance(x: tuple, y: tuple, part: Part) -> Fraction:
    """Total weight of the criteria on which ``x`` is at least as good as ``y``."""
    total = Fraction(0)
    for a, b, c in zip(x, y, part.criteria):
        if (a >= b) if c.direction == MAXIMIZE else (a <= b):
            total += c.weight
    return total


def _layers_by_outranking(part: Part, rows: list[tuple[Fraction, ...]], threshold: Fraction) -> list[int]:
    g = nx.DiGraph()
    g.add_nodes_from(range(len(rows)))
    for i, x in enumerate(rows):
        for j, y in enumerate(rows):
            if i != j and concordance(x, y, part) >= threshold:
                g.add_edge(i, j)
    cond = nx.condensation(g)
    layer = [0] * len(rows)
    for depth, generation in enumerate(nx.topological_generations(cond), start=1):
        for comp in generation:
            for i in cond.nodes[comp]["members"]:
                layer[i] = depth
    return layer


def rank_alternatives(part: Part, cfg: RankingConfig | None = None) -> dict[str, int]:
    """Map each DA id of ``part`` to a priority in ``1..cfg.k`` (1 is best).

    If x dominates y after direction normalization then x never gets a
    worse priority than y.
    """
    cfg = cfg or RankingConfig()
    rows = _matrix(part)
    if cfg.method == DOMINANCE_LAYERS:
        layers = _layers_by_dominance(rows, [c.direction for c in part.criteria])
    else:
        layers = _layers_by_outranking(part, rows, cfg.concordance_threshold)
    if not layers or min(layers) < 1:
        raise ValidationError(f"ranking of {part.id} produced no levels")
    return {a.id: min(r, cfg.k) for a, r in zip(part.alternatives, layers)}


def rank_morphology(m: Morphology, cfg: RankingConfig | None = None, override: bool = False) -> Morphology:
    """Fill missing priorities from estimates.

    Priorities already present in the instance win unless ``override``.
    """
    cfg = cfg or RankingConfig(k=m.k)
    computed: dict[str, int] = {}
    for part in m.parts:
        if not override and all(a.priority is not None for a in part.alternatives):
            continue
        computed.update(rank_alternatives(part, cfg))
    if override:
        def strip(node: SystemNode) -> SystemNode:
            if node.part is not None:
                alts = tuple(
                    DesignAlternative(a.id, a.part_id, a.estimates, None, a.label, a.fuzzy_priority)
                    for a in node.part.alternatives
                )
                return SystemNode(node.id, node.label, Part(node.part.id, node.part.label, alts, node.part.criteria))
            return SystemNode(node.id, node.label, None, tuple(strip(c) for c in node.children))

        m = Morphology(strip(m.root), m.compat, m.k, m.name, m.config)
    return m.with_priorities(computed)
