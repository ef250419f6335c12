"""0-1 linear formulations written in LP file format, plus a small reader.

Variables are named ``x_<part>_<da>`` (``x_<group>_<item>`` for plain
knapsack or QAP instances) and pair products ``y_<a>_<b>``.  Sections are
always emitted in the order Maximize, Subject To, Bounds, Binary, End.
"""

from __future__ import annotations

import io
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, TextIO

from .errors import ValidationError
from .mcp import McpInstance
from .model import Morphology, format_fraction
from .qap import QapInstance, from_mcp

KINDS = ("ma", "mcp", "qap")
TERMS_PER_LINE = 8
_NAME_BAD = re.compile(r"[^A-Za-z0-9_.]")


def _name(*parts: str) -> str:
    return "_".join(_NAME_BAD.sub("_", p) for p in parts)


def _num(x: Any) -> str:
    x = Fraction(x)
    text = format_fraction(x)
    return repr(float(x)) if "/" in text else text


@dataclass
class LpSummary:
    variables: int
    constraints: int
    binaries: int
    rows: dict[str, int] = field(default_factory=dict)


class _Writer:
    def __init__(self) -> None:
        self.objective: list[tuple[Fraction, str]] = []
        self.rows: list[tuple[str, str, list[tuple[Fraction, str]], str, Fraction]] = []
        self.variables: list[str] = []
        self.comments: list[str] = []

    def var(self, name: str) -> str:
        if name in self.variables:
            raise ValidationError(f"variable name clash: {name}")
        self.variables.append(name)
        return name

    def row(self, group: str, name: str, terms: list[tuple[Fraction, str]], op: str, rhs: Any) -> None:
        self.rows.append((group, name, terms, op, Fraction(rhs)))

    @staticmethod
    def _expr(terms: list[tuple[Fraction, str]]) -> list[str]:
        pieces = []
        for i, (coef, var) in enumerate(terms):
            sign = "-" if coef < 0 else "+"
            mag = abs(coef)
            body = var if mag == 1 else f"{_num(mag)} {var}"
            pieces.append(f"- {body}" if i == 0 and sign == "-" else (body if i == 0 else f"{sign} {body}"))
        lines = []
        for start in range(0, len(pieces), TERMS_PER_LINE):
            lines.append(" ".join(pieces[start:start + TERMS_PER_LINE]))
        return lines

    def render(self) -> str:
        out = [f"\\ {c}" for c in self.comments]
        out.append("Maximize")
        obj = [t for t in self.objective if t[0] != 0]
        if obj:
            first, *rest = self._expr(obj)
            out.append(f" obj: {first}")
            out.extend(f"   {line}" for line in rest)
        else:
            out.append(f" obj: 0 {self.variables[0]}")
        out.append("Subject To")
        for _, name, terms, op, rhs in self.rows:
            first, *rest = self._expr(terms)
            if rest:
                out.append(f" {name}: {first}")
                out.extend(f"   {line}" for line in rest[:-1])
                out.append(f"   {rest[-1]} {op} {_num(rhs)}")
            else:
                out.append(f" {name}: {first} {op} {_num(rhs)}")
        out.append("Bounds")
        out.extend(f" 0 <= {v} <= 1" for v in self.variables)
        out.append("Binary")
        for start in range(0, len(self.variables), TERMS_PER_LINE):
            out.append(" " + " ".join(self.variables[start:start + TERMS_PER_LINE]))
        out.append("End")
        return "\n".join(out) + "\n"

    def summary(self) -> LpSummary:
        rows: dict[str, int] = {}
        for group, *_ in self.rows:
            rows[group] = rows.get(group, 0) + 1
        return LpSummary(len(self.variables), len(self.rows), len(self.variables), rows)


def _ma(w: _Writer, m: Morphology, threshold: int | None, scope: str | None) -> None:
    threshold = m.l if threshold is None else threshold
    if not 1 <= threshold <= m.l:
        raise ValidationError(f"threshold {threshold} outside 1..{m.l}")
    scope = scope or m.root.id
    parts = m.leaves(scope)
    w.comments.append(f"admissibility threshold {threshold}")
    names: dict[str, str] = {}
    for part in parts:
        for da in part.alternatives:
            names[da.id] = w.var(_name("x", part.id, da.id))
            if da.priority is not None:
                w.objective.append((Fraction(m.k + 1 - da.priority), names[da.id]))
    for part in parts:
        w.row("group", _name("g", part.id), [(Fraction(1), names[a.id]) for a in part.alternatives], "=", 1)
    count = 0
    ids = [p.id for p in parts]
    for i, pa in enumerate(ids):
        for pb in ids[i + 1:]:
            if not m.compat.covers(pa, pb):
                continue
            for x in m.part(pa).alternatives:
                for y in m.part(pb).alternatives:
                    if m.compat.level(x.id, y.id) < threshold:
                        count += 1
                        w.row("incompatible", f"inc_{count}",
                              [(Fraction(1), names[x.id]), (Fraction(1), names[y.id])], "<=", 1)


def _groups(w: _Writer, inst: McpInstance | QapInstance, at_most_one: bool) -> dict[str, str]:
    names: dict[str, str] = {}
    gids = inst.group_ids or tuple(f"g{i + 1}" for i in range(len(inst.groups)))
    for gid, g in zip(gids, inst.groups):
        for it in g:
            names[it.id] = w.var(_name("x", gid, it.id))
            w.objective.append((Fraction(it.profit), names[it.id]))
    for gid, g in zip(gids, inst.groups):
        w.row("group", _name("g", gid), [(Fraction(1), names[it.id]) for it in g],
              "<=" if at_most_one else "=", 1)
    w.row("budget", "budget", [(it.weight, names[it.id]) for g in inst.groups for it in g], "<=", inst.budget)
    return names


def _qap(w: _Writer, inst: QapInstance) -> None:
    names = _groups(w, inst, inst.at_most_one)
    order = {it.id: (gi, ii) for gi, g in enumerate(inst.groups) for ii, it in enumerate(g)}
    pairs = [(tuple(sorted(key, key=order.__getitem__)), d) for key, d in inst.pair_profit.items() if d > 0]
    pairs.sort(key=lambda t: (order[t[0][0]], order[t[0][1]]))
    for n, ((a, b), d) in enumerate(pairs, start=1):
        y = w.var(_name("y", a, b))
        w.objective.append((d, y))
        xa, xb = names[a], names[b]
        w.row("mccormick", f"mc{n}_a", [(Fraction(1), y), (Fraction(-1), xa)], "<=", 0)
        w.row("mccormick", f"mc{n}_b", [(Fraction(1), y), (Fraction(-1), xb)], "<=", 0)
        w.row("mccormick", f"mc{n}_c", [(Fraction(1), xa), (Fraction(1), xb), (Fraction(-1), y)], "<=", 1)


def export_lp(kind: str, instance: Any, out: TextIO | None = None, *,
              threshold: int | None = None, scope: str | None = None) -> LpSummary:
    """Write the 0-1 formulation of ``instance`` to ``out`` (a text sink).

    ``kind`` is ``"ma"`` (a :class:`Morphology`; one incompatibility row per
    covered pair below ``threshold``), ``"mcp"`` (an :class:`McpInstance`)
    or ``"qap"`` (a :class:`QapInstance`; McCormick rows per positive pair
    profit).  Returns the variable and row counts.
    """
    if kind not in KINDS:
        raise ValidationError(f"unsupported kind {kind!r}; choose from {', '.join(KINDS)}")
    w = _Writer()
    w.comments.append("0-1 formulation written by morphsynth")
    if kind == "ma":
        if not isinstance(instance, Morphology):
            raise ValidationError("kind 'ma' needs a Morphology")
        _ma(w, instance, threshold, scope)
    elif kind == "mcp":
        if not isinstance(instance, McpInstance):
            raise ValidationError("kind 'mcp' needs an McpInstance")
        _groups(w, instance, False)
    else:
        if isinstance(instance, McpInstance):
            instance = from_mcp(instance)
        if not isinstance(instance, QapInstance):
            raise ValidationError("kind 'qap' needs a QapInstance")
        _qap(w, instance)
    text = w.render()
    if out is not None:
        try:
            out.write(text)
        except OSError as exc:
            raise ValidationError(f"could not write LP file: {exc}") from None
    return w.summary()


def lp_text(kind: str, instance: Any, **kwargs: Any) -> str:
    buf = io.StringIO()
    export_lp(kind, instance, buf, **kwargs)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Reader (the subset this module writes, checked strictly)
# ---------------------------------------------------------------------------

_SECTIONS = ("maximize", "subject to", "bounds", "binary", "end")
_TERM = re.compile(r"\s*([+-])?\s*(\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)?\s*([A-Za-z_][A-Za-z0-9_.]*)\s*")
_ROW = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_.]*)\s*:\s*(.*?)\s*(<=|>=|=)\s*(-?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)\s*$")
_BOUND = re.compile(r"^\s*(-?\d+(?:\.\d+)?)\s*<=\s*([A-Za-z_][A-Za-z0-9_.]*)\s*<=\s*(-?\d+(?:\.\d+)?)\s*$")


@dataclass
class LpModel:
    objective: dict[str, Fraction]
    constraints: list[tuple[str, dict[str, Fraction], str, Fraction]]
    bounds: dict[str, tuple[Fraction, Fraction]]
    binaries: list[str]

    @property
    def variables(self) -> list[str]:
        return list(self.binaries)

    def satisfied(self, values: dict[str, int]) -> bool:
        for _, coefs, op, rhs in self.constraints:
            lhs = sum((c * values[v] for v, c in coefs.items()), Fraction(0))
            if op == "<=" and lhs > rhs or op == ">=" and lhs < rhs or op == "=" and lhs != rhs:
                return False
        return True

    def value(self, values: dict[str, int]) -> Fraction:
        return sum((c * values[v] for v, c in self.objective.items()), Fraction(0))


def _terms(text: str, where: str) -> dict[str, Fraction]:
    coefs: dict[str, Fraction] = {}
    pos = 0
    first = True
    while pos < len(text):
        if not text[pos:].strip():
            break
        mt = _TERM.match(text, pos)
        if not mt or mt.end() == pos:
            raise ValidationError(f"LP syntax error in {where}: {text[pos:]!r}")
        sign, coef, var = mt.groups()
        if sign is None and not first:
            raise ValidationError(f"LP syntax error in {where}: missing operator before {var}")
        value = Fraction(coef) if coef else Fraction(1)
        if sign == "-":
            value = -value
        coefs[var] = coefs.get(var, Fraction(0)) + value
        pos = mt.end()
        first = False
    if not coefs:
        raise ValidationError(f"LP syntax error in {where}: empty expression")
    return coefs


def parse_lp(text: str) -> LpModel:
    """Parse LP text produced by :func:`export_lp`, rejecting anything malformed."""
    if "\r" in text:
        raise ValidationError("LP text must use LF line endings")
    statements: dict[str, list[str]] = {s: [] for s in _SECTIONS}
    section = None
    seen: list[str] = []
    for raw in text.split("\n"):
        if not raw.strip() or raw.lstrip().startswith("\\"):
            continue
        key = raw.strip().lower()
        if key in _SECTIONS and not raw.startswith(" "):
            if seen and _SECTIONS.index(key) <= _SECTIONS.index(seen[-1]):
                raise ValidationError(f"LP section {raw.strip()!r} out of order")
            seen.append(key)
            section = key
            continue
        if section is None or section == "end":
            raise ValidationError(f"LP content outside a section: {raw!r}")
        if raw.startswith("   ") and statements[section]:
            statements[section][-1] += " " + raw.strip()
        else:
            statements[section].append(raw.strip())
    if seen != list(_SECTIONS):
        raise ValidationError(f"LP sections must be {', '.join(_SECTIONS)}; found {', '.join(seen)}")
    if len(statements["maximize"]) != 1:
        raise ValidationError("LP objective must be a single statement")
    _, colon, expr = statements["maximize"][0].partition(":")
    if not colon:
        raise ValidationError("LP objective needs a name")
    objective = _terms(expr, "objective")
    constraints = []
    names: set[str] = set()
    for stmt in statements["subject to"]:
        mr = _ROW.match(stmt)
        if not mr:
            raise ValidationError(f"LP syntax error in row {stmt!r}")
        name, expr, op, rhs = mr.groups()
        if name in names:
            raise ValidationError(f"duplicate row name {name}")
        names.add(name)
        constraints.append((name, _terms(expr, name), op, Fraction(rhs)))
    bounds = {}
    for stmt in statements["bounds"]:
        mb = _BOUND.match(stmt)
        if not mb:
            raise ValidationError(f"LP syntax error in bound {stmt!r}")
        lo, var, hi = mb.groups()
        bounds[var] = (Fraction(lo), Fraction(hi))
    binaries = [v for stmt in statements["binary"] for v in stmt.split()]
    known = set(binaries)
    for v in list(objective) + [v for _, c, _, _ in constraints for v in c] + list(bounds):
        if v not in known:
            raise ValidationError(f"variable {v} is not declared binary")
    if len(known) != len(binaries):
        raise ValidationError("duplicate binary declaration")
    return LpModel(objective, constraints, bounds, binaries)
