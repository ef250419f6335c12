"""Morphology data model, instance validation and compatibility tables.

A morphology is an ordered tree whose leaves are system parts.  Each part
owns a list of design alternatives (DAs).  Compatibility estimates are
ordinal levels ``0..l`` attached to unordered pairs of DAs from distinct
parts.  Tables are declared under an internal node and cover the pairs of
parts that sit in different children of that node.

Estimates and weights are kept as :class:`fractions.Fraction` so that
weighted sums and distances are reproducible bit for bit.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from itertools import combinations
from math import prod
from types import MappingProxyType
from typing import Any, Iterable, Iterator, Mapping

from .errors import ValidationError

DEFAULT_K = 3
DEFAULT_L = 3
MAXIMIZE = "maximize"
MINIMIZE = "minimize"
DIRECTIONS = (MAXIMIZE, MINIMIZE)
WEIGHT_TOL = 1e-9

FIXTURES = ("gsm", "toy_xyz", "fuzzy_abc", "ma_demo", "ma_demo_ideal", "ma_demo_pareto")


def to_fraction(value: Any) -> Fraction:
    """Parse an exact rational from a decimal string, integer or fraction.

    Floats are routed through ``str`` so that ``0.1`` becomes ``1/10``
    rather than its binary expansion.
    """
    if isinstance(value, bool):
        raise ValidationError(f"expected a number, got {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(str(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            pass
    raise ValidationError(f"expected a number, got {value!r}")


def format_fraction(x: Fraction) -> str:
    """Exact decimal text when one exists, ``p/q`` otherwise."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    d = x.denominator
    twos = fives = 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return f"{x.numerator}/{x.denominator}"
    places = max(twos, fives)
    scaled = x * 10**places
    sign = "-" if scaled < 0 else ""
    digits = str(abs(scaled.numerator)).rjust(places + 1, "0")
    return f"{sign}{digits[:-places]}.{digits[-places:]}"


def env_cap(default: int) -> int:
    """Search cap, overridable through ``MORPHSYNTH_CAP``."""
    raw = os.environ.get("MORPHSYNTH_CAP")
    if not raw:
        return default
    try:
        cap = int(raw)
    except ValueError:
        raise ValidationError(f"MORPHSYNTH_CAP must be an integer, got {raw!r}") from None
    if cap < 1:
        raise ValidationError("MORPHSYNTH_CAP must be positive")
    return cap


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Criterion:
    id: str
    weight: Fraction
    direction: str = MAXIMIZE
    scale_note: str = ""
    scale: tuple[Fraction, Fraction] | None = None

    def scale_optimum(self) -> Fraction:
        if self.scale is None:
            raise ValidationError(f"criterion {self.id} has no declared scale")
        return self.scale[1] if self.direction == MAXIMIZE else self.scale[0]


@dataclass(frozen=True)
class DesignAlternative:
    id: str
    part_id: str
    estimates: tuple[tuple[str, Fraction], ...] = ()
    priority: int | None = None
    label: str = ""
    fuzzy_priority: tuple[Fraction, ...] | None = None

    def estimate(self, criterion_id: str) -> Fraction:
        for cid, value in self.estimates:
            if cid == criterion_id:
                return value
        raise ValidationError(f"{self.id} has no estimate for {criterion_id}")

    @property
    def estimate_map(self) -> dict[str, Fraction]:
        return dict(self.estimates)


@dataclass(frozen=True)
class Part:
    id: str
    label: str
    alternatives: tuple[DesignAlternative, ...]
    criteria: tuple[Criterion, ...] = ()

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(a.id for a in self.alternatives)

    def alternative(self, da_id: str) -> DesignAlternative:
        for a in self.alternatives:
            if a.id == da_id:
                return a
        raise ValidationError(f"part {self.id} has no alternative {da_id}")


@dataclass(frozen=True)
class SystemNode:
    id: str
    label: str = ""
    part: Part | None = None
    children: tuple["SystemNode", ...] = ()

    @property
    def is_leaf(self) -> bool:
        return self.part is not None

    def walk(self) -> Iterator["SystemNode"]:
        yield self
        for child in self.children:
            yield from child.walk()

    def leaves(self) -> tuple[Part, ...]:
        return tuple(n.part for n in self.walk() if n.part is not None)


def pair_key(a: str, b: str) -> frozenset[str]:
    return frozenset((a, b))


class CompatibilityTable:
    """Symmetric ordinal compatibility estimates.

    ``entries`` maps unordered DA pairs to a level in ``0..max_level``.
    ``part_pairs`` lists the unordered part pairs the table covers; a
    composition is only checked on covered pairs.  ``fuzzy`` optionally
    keeps membership vectors ordered from level ``max_level`` down to 0.
    """

    __slots__ = ("max_level", "_entries", "_part_pairs", "_fuzzy")

    def __init__(
        self,
        max_level: int,
        entries: Mapping[frozenset[str], int],
        part_pairs: Iterable[frozenset[str]],
        fuzzy: Mapping[frozenset[str], tuple[Fraction, ...]] | None = None,
    ):
        if max_level < 1:
            raise ValidationError("compatibility scale needs max_level >= 1")
        self.max_level = int(max_level)
        self._entries = MappingProxyType(dict(entries))
        self._part_pairs = frozenset(part_pairs)
        self._fuzzy = MappingProxyType(dict(fuzzy or {}))

    def level(self, a: str, b: str) -> int | None:
        return self._entries.get(pair_key(a, b))

    def fuzzy(self, a: str, b: str) -> tuple[Fraction, ...] | None:
        return self._fuzzy.get(pair_key(a, b))

    @property
    def entries(self) -> Mapping[frozenset[str], int]:
        return self._entries

    @property
    def fuzzy_entries(self) -> Mapping[frozenset[str], tuple[Fraction, ...]]:
        return self._fuzzy

    @property
    def part_pairs(self) -> frozenset[frozenset[str]]:
        return self._part_pairs

    def covers(self, part_a: str, part_b: str) -> bool:
        return pair_key(part_a, part_b) in self._part_pairs

    def __len__(self) -> int:
        return len(self._entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CompatibilityTable):
            return NotImplemented
        return (
            self.max_level == other.max_level
            and dict(self._entries) == dict(other._entries)
            and self._part_pairs == other._part_pairs
            and dict(self._fuzzy) == dict(other._fuzzy)
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"CompatibilityTable(max_level={self.max_level}, entries={len(self)})"


@dataclass(frozen=True, order=True)
class Composition:
    """One DA per in-scope part, kept in part order."""

    scope: str
    selection: tuple[tuple[str, str], ...]

    def __getitem__(self, part_id: str) -> str:
        for p, da in self.selection:
            if p == part_id:
                return da
        raise KeyError(part_id)

    @property
    def parts(self) -> tuple[str, ...]:
        return tuple(p for p, _ in self.selection)

    @property
    def das(self) -> tuple[str, ...]:
        return tuple(da for _, da in self.selection)

    def as_dict(self) -> dict[str, str]:
        return dict(self.selection)

    def label(self, sep: str = "*") -> str:
        return sep.join(self.das)

    def __str__(self) -> str:
        return self.label()


class Morphology:
    """Validated, immutable instance.  Build it with :func:`validate_morphology`."""

    def __init__(
        self,
        root: SystemNode,
        compat: CompatibilityTable,
        k: int = DEFAULT_K,
        name: str = "",
        config: Mapping[str, Any] | None = None,
    ):
        self._root = root
        self._compat = compat
        self._k = int(k)
        self._name = name
        self._config = MappingProxyType(dict(config or {}))
        self._nodes: dict[str, SystemNode] = {}
        self._parent: dict[str, str] = {}
        for node in root.walk():
            self._nodes[node.id] = node
            for child in node.children:
                self._parent[child.id] = node.id
        self._parts = root.leaves()
        self._part_index = {p.id: i for i, p in enumerate(self._parts)}
        self._da: dict[str, DesignAlternative] = {}
        for part in self._parts:
            for da in part.alternatives:
                self._da[da.id] = da

    # structure -----------------------------------------------------------
    @property
    def root(self) -> SystemNode:
        return self._root

    @property
    def compat(self) -> CompatibilityTable:
        return self._compat

    @property
    def k(self) -> int:
        return self._k

    @property
    def l(self) -> int:  # noqa: E743
        return self._compat.max_level

    @property
    def name(self) -> str:
        return self._name

    @property
    def config(self) -> Mapping[str, Any]:
        return self._config

    @property
    def parts(self) -> tuple[Part, ...]:
        return self._parts

    def node(self, node_id: str) -> SystemNode:
        try:
            return self._nodes[node_id]
        except KeyError:
            raise ValidationError(f"unknown node {node_id!r}") from None

    def part(self, part_id: str) -> Part:
        node = self.node(part_id)
        if node.part is None:
            raise ValidationError(f"{part_id!r} is an internal node, not a part")
        return node.part

    def alternative(self, da_id: str) -> DesignAlternative:
        try:
            return self._da[da_id]
        except KeyError:
            raise ValidationError(f"unknown design alternative {da_id!r}") from None

    def part_of(self, da_id: str) -> str:
        return self.alternative(da_id).part_id

    def part_order(self, part_id: str) -> int:
        return self._part_index[part_id]

    def leaves(self, scope: str | None = None) -> tuple[Part, ...]:
        return self.node(scope or self._root.id).leaves()

    def internal_nodes(self) -> tuple[SystemNode, ...]:
        return tuple(n for n in self._root.walk() if not n.is_leaf)

    def space_size(self, scope: str | None = None) -> int:
        return prod(len(p.alternatives) for p in self.leaves(scope))

    def covered_pairs(self, scope: str | None = None) -> list[tuple[str, str]]:
        """Part pairs in scope that the compatibility table covers, in part order."""
        ids = [p.id for p in self.leaves(scope)]
        return [(a, b) for a, b in combinations(ids, 2) if self._compat.covers(a, b)]

    # derived copies --------------------------------------------------------
    def with_compat(self, compat: CompatibilityTable) -> "Morphology":
        return Morphology(self._root, compat, self._k, self._name, self._config)

    def with_priorities(self, priorities: Mapping[str, int]) -> "Morphology":
        """Copy with the given DA priorities filled in where none were set."""

        def rebuild(node: SystemNode) -> SystemNode:
            if node.part is not None:
                alts = []
                for a in node.part.alternatives:
                    if a.priority is None and a.id in priorities:
                        r = int(priorities[a.id])
                        if not 1 <= r <= self._k:
                            raise ValidationError(f"priority {r} of {a.id} outside 1..{self._k}")
                        a = DesignAlternative(a.id, a.part_id, a.estimates, r, a.label, a.fuzzy_priority)
                    alts.append(a)
                part = Part(node.part.id, node.part.label, tuple(alts), node.part.criteria)
                return SystemNode(node.id, node.label, part)
            return SystemNode(node.id, node.label, None, tuple(rebuild(c) for c in node.children))

        return Morphology(rebuild(self._root), self._compat, self._k, self._name, self._config)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Morphology):
            return NotImplemented
        return (
            self._root == other._root
            and self._compat == other._compat
            and self._k == other._k
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"Morphology({self._name or self._root.id!r}, parts={[p.id for p in self._parts]})"


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ValidationError(message)


def _parse_node(raw: Any, alternatives: Mapping[str, Any], criteria: Mapping[str, Any],
                k: int, seen: set[str]) -> SystemNode:
    _require(isinstance(raw, dict) and isinstance(raw.get("id"), str), f"malformed system node {raw!r}")
    node_id = raw["id"]
    _require(node_id not in seen, f"duplicate id {node_id!r}")
    seen.add(node_id)
    label = str(raw.get("label", ""))
    children = raw.get("children")
    if children is None:
        return SystemNode(node_id, label, _parse_part(node_id, label, alternatives, criteria, k, seen))
    _require(isinstance(children, list) and len(children) >= 2,
             f"internal node {node_id!r} must list at least 2 children")
    return SystemNode(node_id, label, None,
                      tuple(_parse_node(c, alternatives, criteria, k, seen) for c in children))


def _parse_criteria(part_id: str, raw: Any) -> tuple[Criterion, ...]:
    if not raw:
        return ()
    _require(isinstance(raw, list), f"criteria of {part_id!r} must be a list")
    out = []
    ids: set[str] = set()
    for c in raw:
        cid = c.get("id")
        _require(isinstance(cid, str), f"criterion of {part_id!r} lacks an id")
        _require(cid not in ids, f"duplicate criterion id {cid!r} in {part_id!r}")
        ids.add(cid)
        weight = to_fraction(c.get("weight"))
        _require(0 <= weight <= 1, f"weight of {cid!r} outside [0,1]")
        direction = c.get("direction")
        _require(direction in DIRECTIONS, f"criterion {cid!r} needs direction maximize|minimize")
        scale = c.get("scale")
        if scale is not None:
            _require(isinstance(scale, list) and len(scale) == 2, f"scale of {cid!r} must be [lo, hi]")
            lo, hi = to_fraction(scale[0]), to_fraction(scale[1])
            _require(lo <= hi, f"scale of {cid!r} is empty")
            scale = (lo, hi)
        out.append(Criterion(cid, weight, direction, str(c.get("scale_note", "")), scale))
    total = sum(c.weight for c in out)
    _require(abs(float(total) - 1.0) <= WEIGHT_TOL, f"criteria weights of {part_id!r} sum to {float(total)}, not 1")
    return tuple(out)


def _parse_part(part_id: str, label: str, alternatives: Mapping[str, Any],
                criteria: Mapping[str, Any], k: int, seen: set[str]) -> Part:
    crits = _parse_criteria(part_id, criteria.get(part_id))
    crit_ids = {c.id for c in crits}
    raw_alts = alternatives.get(part_id) or []
    _require(isinstance(raw_alts, list) and len(raw_alts) > 0, f"part {part_id!r} has no design alternatives")
    alts = []
    for a in raw_alts:
        da_id = a.get("id") if isinstance(a, dict) else None
        _require(isinstance(da_id, str), f"alternative of {part_id!r} lacks an id")
        _require(da_id not in seen, f"duplicate id {da_id!r}")
        seen.add(da_id)
        estimates = ()
        if a.get("estimates"):
            est = a["estimates"]
            _require(set(est) == crit_ids,
                     f"estimates of {da_id!r} must cover exactly the criteria of {part_id!r}")
            estimates = tuple((c.id, to_fraction(est[c.id])) for c in crits)
        fuzzy = a.get("fuzzy_priority")
        if fuzzy is not None:
            _require(isinstance(fuzzy, list) and len(fuzzy) == k,
                     f"fuzzy priority of {da_id!r} needs {k} memberships")
            fuzzy = tuple(to_fraction(v) for v in fuzzy)
            _require(all(0 <= v <= 1 for v in fuzzy), f"membership of {da_id!r} outside [0,1]")
        priority = a.get("priority")
        if priority is None and fuzzy is not None:
            from .fuzzy import aggregate_priority

            priority = aggregate_priority(fuzzy)
        if priority is not None:
            _require(isinstance(priority, int) and not isinstance(priority, bool) and 1 <= priority <= k,
                     f"priority of {da_id!r} must be an integer in 1..{k}")
        alts.append(DesignAlternative(da_id, part_id, estimates, priority, str(a.get("label", "")), fuzzy))
    return Part(part_id, label, tuple(alts), crits)


def _child_of(root: SystemNode, node_id: str) -> dict[str, str]:
    """Map each part under ``node_id`` to the direct child containing it."""
    for node in root.walk():
        if node.id == node_id:
            return {p.id: child.id for child in node.children for p in child.leaves()}
    return {}


def _parse_compat(doc: Mapping[str, Any], root: SystemNode, l: int,
                  fill_missing: int | None) -> CompatibilityTable:
    raw = doc.get("compatibility") or {}
    _require(isinstance(raw, dict), "compatibility must map node ids to entry lists")
    owner: dict[str, str] = {}
    parts: dict[str, Part] = {p.id: p for p in root.leaves()}
    for p in parts.values():
        for a in p.alternatives:
            owner[a.id] = p.id
    internal = {n.id for n in root.walk() if not n.is_leaf}
    entries: dict[frozenset[str], int] = {}
    fuzzy: dict[frozenset[str], tuple[Fraction, ...]] = {}
    part_pairs: set[frozenset[str]] = set()
    for node_id, items in raw.items():
        _require(node_id in internal, f"compatibility declared under unknown internal node {node_id!r}")
        _require(isinstance(items, list), f"compatibility of {node_id!r} must be a list")
        child = _child_of(root, node_id)
        node = next(n for n in root.walk() if n.id == node_id)
        leaf_children = [c.id for c in node.children if c.is_leaf]
        part_pairs.update(pair_key(a, b) for a, b in combinations(leaf_children, 2))
        for e in items:
            a, b = e.get("a"), e.get("b")
            _require(a in owner, f"compatibility entry references unknown DA {a!r}")
            _require(b in owner, f"compatibility entry references unknown DA {b!r}")
            pa, pb = owner[a], owner[b]
            _require(pa != pb, f"compatibility entry ({a}, {b}) relates two DAs of part {pa!r}")
            _require(pa in child and pb in child and child[pa] != child[pb],
                     f"pair ({a}, {b}) does not span two children of {node_id!r}")
            key = pair_key(a, b)
            _require(key not in entries and key not in fuzzy, f"duplicate compatibility entry ({a}, {b})")
            level = e.get("level")
            memb = e.get("fuzzy")
            if memb is not None:
                _require(isinstance(memb, list) and len(memb) == l + 1,
                         f"fuzzy compatibility ({a}, {b}) needs {l + 1} memberships")
                memb = tuple(to_fraction(v) for v in memb)
                _require(all(0 <= v <= 1 for v in memb), f"membership of ({a}, {b}) outside [0,1]")
                fuzzy[key] = memb
                if level is None:
                    from .fuzzy import aggregate_compatibility

                    level = aggregate_compatibility(memb)
            _require(isinstance(level, int) and not isinstance(level, bool) and 0 <= level <= l,
                     f"level of ({a}, {b}) must be an integer in 0..{l}")
            entries[key] = level
            part_pairs.add(pair_key(pa, pb))
    for pp in sorted(part_pairs, key=sorted):
        pa, pb = sorted(pp)
        for x in parts[pa].alternatives:
            for y in parts[pb].alternatives:
                key = pair_key(x.id, y.id)
                if key in entries:
                    continue
                if fill_missing is None:
                    raise ValidationError(f"missing compatibility entry ({x.id}, {y.id})")
                entries[key] = fill_missing
    return CompatibilityTable(l, entries, part_pairs, fuzzy)


def validate_morphology(document: Mapping[str, Any], fill_missing: int | None = None) -> Morphology:
    """Validate an instance document and build a :class:`Morphology`.

    Parameters
    ----------
    document:
        Parsed JSON instance (see the README for the format).
    fill_missing:
        When set, missing compatibility entries of covered part pairs take
        this level instead of raising.

    Raises
    ------
    ValidationError
        On any structural or range problem.
    """
    _require(isinstance(document, Mapping), "instance must be a JSON object")
    scales = document.get("scales") or {}
    k = scales.get("k", DEFAULT_K)
    l = scales.get("l", DEFAULT_L)
    _require(isinstance(k, int) and k >= 1, "scales.k must be a positive integer")
    _require(isinstance(l, int) and l >= 1, "scales.l must be a positive integer")
    if fill_missing is not None:
        _require(0 <= fill_missing <= l, f"fill level must lie in 0..{l}")
    _require("system" in document, "instance lacks a system tree")
    alternatives = document.get("alternatives") or {}
    criteria = document.get("criteria") or {}
    seen: set[str] = set()
    root = _parse_node(document["system"], alternatives, criteria, k, seen)
    leaf_ids = {p.id for p in root.leaves()}
    for pid in alternatives:
        _require(pid in leaf_ids, f"alternatives given for unknown part {pid!r}")
    for pid in criteria:
        _require(pid in leaf_ids, f"criteria given for unknown part {pid!r}")
    compat = _parse_compat(document, root, l, fill_missing)
    config = {key: document[key] for key in ("mcp", "ideal", "description") if key in document}
    return Morphology(root, compat, k, str(document.get("name", "")), config)


def to_document(m: Morphology) -> dict[str, Any]:
    """Serialize a morphology back into the instance format."""

    def node_doc(node: SystemNode) -> dict[str, Any]:
        out: dict[str, Any] = {"id": node.id}
        if node.label:
            out["label"] = node.label
        if node.children:
            out["children"] = [node_doc(c) for c in node.children]
        return out

    criteria: dict[str, Any] = {}
    alternatives: dict[str, Any] = {}
    for part in m.parts:
        if part.criteria:
            criteria[part.id] = [
                {"id": c.id, "weight": format_fraction(c.weight), "direction": c.direction,
                 "scale_note": c.scale_note,
                 **({"scale": [format_fraction(c.scale[0]), format_fraction(c.scale[1])]} if c.scale else {})}
                for c in part.criteria
            ]
        rows = []
        for a in part.alternatives:
            row: dict[str, Any] = {"id": a.id}
            if a.label:
                row["label"] = a.label
            if a.estimates:
                row["estimates"] = {cid: format_fraction(v) for cid, v in a.estimates}
            if a.priority is not None:
                row["priority"] = a.priority
            if a.fuzzy_priority is not None:
                row["fuzzy_priority"] = [format_fraction(v) for v in a.fuzzy_priority]
            rows.append(row)
        alternatives[part.id] = rows
    compatibility: dict[str, list[dict[str, Any]]] = {}
    for node in m.internal_nodes():
        child = {p.id: c.id for c in node.children for p in c.leaves()}
        items = []
        for pa, pb in combinations([p.id for p in node.leaves()], 2):
            if child[pa] == child[pb] or not m.compat.covers(pa, pb):
                continue
            for x in m.part(pa).alternatives:
                for y in m.part(pb).alternatives:
                    entry: dict[str, Any] = {"a": x.id, "b": y.id, "level": m.compat.level(x.id, y.id)}
                    f = m.compat.fuzzy(x.id, y.id)
                    if f is not None:
                        entry["fuzzy"] = [format_fraction(v) for v in f]
                    items.append(entry)
        if items or any(c.is_leaf for c in node.children) and any(
            m.compat.covers(a.id, b.id) for a, b in combinations([c for c in node.children if c.is_leaf], 2)
        ):
            compatibility[node.id] = items
    doc: dict[str, Any] = {
        "name": m.name,
        "scales": {"k": m.k, "l": m.l},
        "system": node_doc(m.root),
        "criteria": criteria,
        "alternatives": alternatives,
        "compatibility": compatibility,
    }
    doc.update(dict(m.config))
    return doc


def load_instance(path: str | os.PathLike[str], fill_missing: int | None = None) -> Morphology:
    try:
        with open(path, encoding="utf-8") as fh:
            document = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON ({exc})") from None
    return validate_morphology(document, fill_missing)


def fixture_document(name: str) -> dict[str, Any]:
    if name.endswith(".json"):
        name = name[:-5]
    if name not in FIXTURES:
        raise ValidationError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}")
    text = resources.files("morphsynth.fixtures").joinpath(f"{name}.json").read_text(encoding="utf-8")
    return json.loads(text)


def load_fixture(name: str, fill_missing: int | None = None) -> Morphology:
    """Load one of the bundled instances by name, e.g. ``"gsm"``."""
    return validate_morphology(fixture_document(name), fill_missing)


# ---------------------------------------------------------------------------
# Compatibility operations
# ---------------------------------------------------------------------------


def compatibility(m: Morphology, a: str, b: str) -> int:
    """Ordinal compatibility of two DAs from distinct parts."""
    pa, pb = m.part_of(a), m.part_of(b)
    if pa == pb:
        raise ValidationError(f"{a} and {b} belong to the same part {pa!r}")
    level = m.compat.level(a, b)
    if level is None:
        raise ValidationError(f"no compatibility declared for ({a}, {b})")
    return level


def binarize_compatibility(t: CompatibilityTable, threshold: int) -> CompatibilityTable:
    """Map levels ``>= threshold`` to 1 and everything else to 0."""
    if not 1 <= threshold <= t.max_level:
        raise ValidationError(f"threshold {threshold} outside 1..{t.max_level}")
    entries = {key: int(v >= threshold) for key, v in t.entries.items()}
    return CompatibilityTable(1, entries, t.part_pairs)


def make_composition(m: Morphology, das: Iterable[str], scope: str | None = None) -> Composition:
    """Build a composition from DA ids, checking one DA per in-scope part."""
    scope = scope or m.root.id
    chosen: dict[str, str] = {}
    for da in das:
        part = m.part_of(da)
        if part in chosen:
            raise ValidationError(f"two alternatives chosen for part {part!r}")
        chosen[part] = da
    expected = [p.id for p in m.leaves(scope)]
    if set(chosen) != set(expected):
        raise ValidationError(f"composition must pick exactly one DA for each of {expected}")
    return Composition(scope, tuple((p, chosen[p]) for p in expected))


def composition_level(m: Morphology, comp: Composition) -> int | None:
    """Minimum level over the covered pairs of a composition (None if no pair is covered)."""
    das = comp.das
    parts = comp.parts
    worst = None
    for i in range(len(das)):
        for j in range(i + 1, len(das)):
            if m.compat.covers(parts[i], parts[j]):
                v = m.compat.level(das[i], das[j])
                if v is None:
                    raise ValidationError(f"no compatibility declared for ({das[i]}, {das[j]})")
                worst = v if worst is None else min(worst, v)
    return worst
