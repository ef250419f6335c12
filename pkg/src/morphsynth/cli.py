"""Command line entry point.

Every subcommand reads one instance (``-f file.json`` or ``--fixture name``)
and prints an aligned text table, or JSON with ``--json``.  Exit codes:
0 success, 2 invalid input, 3 infeasible or over a search cap, 64 usage.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Any, Callable, Sequence

from . import __version__
from .admissible import enumerate_admissible
from .errors import CapExceededError, InfeasibleError, MorphError, ValidationError
from .fuzzy import CASES, PREFERENCES, solve_fuzzy
from .hmmd import QualityVector, neighborhood, quality_vector, solve_hierarchical, solve_morphological_clique
from .ideal import KEYINGS, METRICS, PRIORITY, SELECTION, STRATEGIES, estimate_vector, generate_ideal, select_closest
from .lpformat import KINDS, export_lp, lp_text
from .mcp import (GREEDY_STRATEGIES, derive_mcp_instance, solve_mcp_exact, solve_mcp_greedy,
                  solve_mcp_multicriteria, truncated)
from .model import (FIXTURES, MAXIMIZE, MINIMIZE, Composition, Morphology, composition_level,
                    format_fraction, load_fixture, load_instance, make_composition, to_document,
                    to_fraction)
from .pareto import pareto_filter
from .qap import derive_qap_instance, solve_qap_exact, solve_qap_greedy, solve_qap_pareto
from .ranking import METHODS, RankingConfig, rank_morphology

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_INFEASIBLE = 3
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------


def _num(x: Any) -> Any:
    if isinstance(x, Fraction):
        return format_fraction(x)
    if isinstance(x, float):
        return round(x, 4)
    if isinstance(x, (tuple, list)):
        return [_num(v) for v in x]
    return x


def _text(x: Any) -> str:
    if x is None:
        return "-"
    if isinstance(x, float):
        return f"{x:.4f}"
    if isinstance(x, Fraction):
        return format_fraction(x)
    if isinstance(x, (tuple, list)):
        return "(" + ",".join(_text(v) for v in x) + ")"
    return str(x)


def table(headers: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    cells = [[str(h) for h in headers]] + [[_text(c) for c in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def _comp(c: Composition) -> dict[str, Any]:
    return {"label": c.label(), "scope": c.scope, "selection": c.as_dict()}


def _quality(q: QualityVector) -> dict[str, Any]:
    return {"text": str(q), "w": q.w, "n": list(q.n)}


def grouped_label(m: Morphology, c: Composition) -> str:
    """``(M4*L2)*(V1*U1*T5)``: DAs grouped by the children of the scope node."""
    node = m.node(c.scope)
    if node.is_leaf:
        return c.label()
    chosen = c.as_dict()
    groups = []
    for child in node.children:
        das = [chosen[p.id] for p in child.leaves() if p.id in chosen]
        groups.append(das[0] if len(das) == 1 else "(" + "*".join(das) + ")")
    return "*".join(groups)


def _emit(args: argparse.Namespace, payload: Any, text: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        print(text)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _load(args: argparse.Namespace) -> Morphology:
    fill = args.fill_missing
    if args.fixture:
        return load_fixture(args.fixture, fill)
    try:
        return load_instance(args.file, fill)
    except OSError as exc:
        raise ValidationError(f"cannot read {args.file}: {exc.strerror or exc}") from None


def _candidates(args: argparse.Namespace, m: Morphology) -> list[Composition]:
    return enumerate_admissible(m, args.scope, args.min_level, threads=args.threads)


def cmd_validate(args: argparse.Namespace) -> int:
    m = _load(args)
    parts, size = len(m.parts), m.space_size()
    _emit(args, {"valid": True, "name": m.name, "parts": parts, "combinations": size},
          f"valid; {parts} parts; {size} combinations")
    return EXIT_OK


def cmd_rank(args: argparse.Namespace) -> int:
    m = _load(args)
    cfg = RankingConfig(args.method, to_fraction(args.threshold), m.k)
    ranked = rank_morphology(m, cfg, override=args.override)
    rows = []
    for part in ranked.parts:
        for da in part.alternatives:
            given = m.alternative(da.id).priority
            source = "instance" if given is not None and not args.override else "computed"
            rows.append((part.id, da.id, da.priority, source))
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(to_document(ranked), fh, indent=1)
            fh.write("\n")
    payload = [{"part": p, "da": d, "priority": r, "source": s} for p, d, r, s in rows]
    _emit(args, {"method": args.method, "priorities": payload},
          table(["part", "DA", "priority", "source"], rows))
    return EXIT_OK


def cmd_enumerate(args: argparse.Namespace) -> int:
    m = _load(args)
    comps = _candidates(args, m)
    parts = [p.id for p in m.leaves(args.scope)]
    rows = [(f"S{i}",) + c.das for i, c in enumerate(comps, 1)]
    payload = {"scope": args.scope or m.root.id, "min_level": args.min_level or m.l,
               "count": len(comps), "compositions": [_comp(c) for c in comps]}
    text = table(["#"] + parts, rows) + f"\n{len(comps)} admissible compositions"
    _emit(args, payload, text)
    return EXIT_OK


def _parse_vector(raw: str, keying: str) -> list[Any]:
    items = [x.strip() for x in raw.split(",") if x.strip()]
    return items if keying == SELECTION else [to_fraction(x) for x in items]


def cmd_ideal(args: argparse.Namespace) -> int:
    m = _load(args)
    comps = _candidates(args, m)
    if not comps:
        raise InfeasibleError("no admissible compositions to rank")
    index = {c: i for i, c in enumerate(comps, 1)}
    expert = _parse_vector(args.ideal, args.keying) if args.ideal else None
    strategy = "expert_supplied" if expert is not None else args.strategy
    ideal = generate_ideal(m, args.scope, strategy, args.keying, expert)
    ranked = select_closest(comps, m, ideal, args.metric)
    if args.top:
        ranked = ranked[: args.top]
    rows, payload = [], []
    for r in ranked:
        vec = estimate_vector(m, r.composition, args.keying).components
        rows.append((f"S{index[r.composition]}", r.composition.label(), vec, r.distance, "yes" if r.tied else ""))
        payload.append({"id": f"S{index[r.composition]}", "composition": _comp(r.composition),
                        "vector": _num(vec), "distance": _num(r.distance), "tied": r.tied})
    head = f"ideal {_text(ideal.components)} ({strategy}, {args.metric})"
    text = head + "\n" + table(["#", "composition", "vector", "distance", "tied"], rows)
    _emit(args, {"ideal": _num(ideal.components), "metric": args.metric, "ranked": payload}, text)
    return EXIT_OK


def _read_candidates(path: str, m: Morphology) -> list[Composition]:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON ({exc})") from None
    items = data.get("compositions") if isinstance(data, dict) else data
    if not isinstance(items, list):
        raise ValidationError(f"{path}: expected a list of compositions")
    out = []
    for item in items:
        sel = item.get("selection") if isinstance(item, dict) else None
        if isinstance(sel, dict):
            out.append(make_composition(m, sel.values(), item.get("scope")))
        elif isinstance(item, list):
            out.append(make_composition(m, item))
        else:
            raise ValidationError(f"{path}: cannot read composition {item!r}")
    return out


def cmd_pareto(args: argparse.Namespace) -> int:
    m = _load(args)
    comps = _read_candidates(args.candidates, m) if args.candidates else _candidates(args, m)
    if not comps:
        raise InfeasibleError("no compositions to filter")
    items, dirs = [], None
    for i, c in enumerate(comps):
        vec = list(estimate_vector(m, c, args.keying).components)
        if args.keying == PRIORITY:
            d = [MINIMIZE] * len(vec)
        else:
            d = [crit.direction for p in c.parts for crit in m.part(p).criteria]
        if args.with_compat:
            w = composition_level(m, c)
            vec.append(m.l if w is None else w)
            d.append(MAXIMIZE)
        dirs = d
        items.append((i, tuple(vec)))
    keep = pareto_filter(items, dirs)
    index = {c: i for i, c in enumerate(comps, 1)}
    rows = [(f"S{index[comps[i]]}", comps[i].label(), items[i][1]) for i in keep]
    payload = [{"id": r[0], "composition": _comp(comps[i]), "vector": _num(items[i][1])}
               for r, i in zip(rows, keep)]
    text = table(["#", "composition", "vector"], rows) + f"\n{len(keep)} of {len(comps)} non-dominated"
    _emit(args, {"directions": dirs, "frontier": payload}, text)
    return EXIT_OK


def _item_rows(m: Morphology, inst, selected: set[str]) -> list[tuple]:
    rows = []
    for gid, group in zip(inst.group_ids, inst.groups):
        for it in group:
            r = m.alternative(it.id).priority
            ratio = "inf" if it.weight == 0 else f"{float(truncated(Fraction(it.profit) / it.weight)):.2f}"
            rows.append((gid, it.id, r, f"{float(it.weight):.1f}", it.profit, ratio,
                         "*" if it.id in selected else ""))
    return rows


def cmd_mcp(args: argparse.Namespace) -> int:
    m = _load(args)
    budget = to_fraction(args.budget)
    if args.solver == "pareto":
        inst = derive_mcp_instance(m, budget, args.scope, profit_vector=True)
        front = solve_mcp_multicriteria(inst)
        rows = [(" ".join(s.selection), s.profit, s.weight) for s in front]
        payload = [{"selection": list(s.selection), "profit": _num(s.profit), "weight": _num(s.weight)}
                   for s in front]
        _emit(args, {"budget": _num(budget), "frontier": payload},
              table(["selection", "profit (c, z)", "weight"], rows))
        return EXIT_OK
    inst = derive_mcp_instance(m, budget, args.scope)
    if args.solver == "greedy":
        sol = solve_mcp_greedy(inst, args.greedy_strategy)
    else:
        sol = solve_mcp_exact(inst)
    rows = _item_rows(m, inst, set(sol.selection))
    payload = {
        "budget": _num(budget), "solver": args.solver,
        "selection": list(sol.selection), "profit": _num(sol.profit), "weight": _num(sol.weight),
        "items": [{"group": g, "id": i, "priority": r, "a": a, "c": _num(c), "ratio": q, "selected": bool(s)}
                  for g, i, r, a, c, q, s in rows],
    }
    text = (table(["part", "DA", "r", "a", "c", "c/a", "sel"], rows)
            + f"\nselection {' '.join(sol.selection)}; profit {_text(sol.profit)}; weight {_text(sol.weight)}")
    _emit(args, payload, text)
    return EXIT_OK


def cmd_qap(args: argparse.Namespace) -> int:
    m = _load(args)
    budget = to_fraction(args.budget)
    if args.pareto:
        inst = derive_qap_instance(m, budget, args.at_most_one, args.scope, profit_vector=True)
        front = solve_qap_pareto(inst)
        rows = [(" ".join(x or "-" for x in s.selection), vec, s.weight) for s, vec in front]
        payload = [{"selection": list(s.selection), "objective": _num(vec), "weight": _num(s.weight)}
                   for s, vec in front]
        _emit(args, {"budget": _num(budget), "frontier": payload},
              table(["selection", "objective (c, z, d)", "weight"], rows))
        return EXIT_OK
    inst = derive_qap_instance(m, budget, args.at_most_one, args.scope)
    if args.solver == "greedy":
        sol = solve_qap_greedy(inst)
    else:
        sol = solve_qap_exact(inst, threads=args.threads)
    sel = " ".join(x or "-" for x in sol.selection)
    payload = {"budget": _num(budget), "solver": args.solver, "selection": list(sol.selection),
               "objective": _num(sol.objective), "weight": _num(sol.weight)}
    _emit(args, payload, table(["selection", "objective", "weight"], [(sel, sol.objective, sol.weight)]))
    return EXIT_OK


def _solutions_text(m: Morphology, sols, prefix: str) -> tuple[list, list]:
    rows, payload = [], []
    for i, (c, q) in enumerate(sols, 1):
        rows.append((f"{prefix}{i}", grouped_label(m, c), str(q)))
        payload.append({"id": f"{prefix}{i}", "composition": _comp(c), "quality": _quality(q)})
    return rows, payload


def cmd_hmmd(args: argparse.Namespace) -> int:
    m = _load(args)
    if args.scope:
        sols = solve_morphological_clique(m, args.scope, args.min_w, threads=args.threads)
    else:
        sols = solve_hierarchical(m, args.min_w, prune=not args.no_prune, threads=args.threads)
    rows, payload = _solutions_text(m, sols, "S")
    result: dict[str, Any] = {"solutions": payload}
    text = table(["#", "composition", "N(S)"], rows) + f"\n{len(sols)} solutions"
    if args.neighborhood:
        near = neighborhood(m, sols, args.scope, args.min_w)
        nrows, npayload = _solutions_text(m, near, "N")
        result["neighborhood"] = npayload
        text += "\n\none step below the frontier\n" + table(["#", "composition", "N(S)"], nrows)
    _emit(args, result, text)
    return EXIT_OK


def cmd_hmmd_fuzzy(args: argparse.Namespace) -> int:
    m = _load(args)
    decisions = solve_fuzzy(m, args.case, to_fraction(args.alpha), args.pref, args.scope, args.min_w)
    rows, payload = [], []
    for i, d in enumerate(decisions, 1):
        support = "; ".join(f"{q}:{format_fraction(mu)}" for q, mu in d.support)
        rows.append((f"S{i}", d.composition.label(), str(d.representative), d.corner, support))
        payload.append({
            "id": f"S{i}", "composition": _comp(d.composition), "quality": _quality(d.representative),
            "corner": list(d.corner),
            "support": [{"quality": _quality(q), "membership": format_fraction(mu)} for q, mu in d.support],
        })
    text = table(["#", "composition", "N(S)", "corner", "support"], rows)
    _emit(args, {"case": args.case, "alpha": args.alpha, "pref": args.pref, "decisions": payload}, text)
    return EXIT_OK


def cmd_export_lp(args: argparse.Namespace) -> int:
    m = _load(args)
    if args.kind == "ma":
        instance: Any = m
        kwargs = {"threshold": args.threshold, "scope": args.scope}
    else:
        if args.budget is None:
            raise ValidationError(f"--budget is required for kind {args.kind!r}")
        budget = to_fraction(args.budget)
        if args.kind == "mcp":
            instance = derive_mcp_instance(m, budget, args.scope)
        else:
            instance = derive_qap_instance(m, budget, args.at_most_one, args.scope)
        kwargs = {}
    if args.output is None or args.output == "-":
        sys.stdout.write(lp_text(args.kind, instance, **kwargs))
        return EXIT_OK
    try:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            summary = export_lp(args.kind, instance, fh, **kwargs)
    except OSError as exc:
        raise ValidationError(f"cannot write {args.output}: {exc.strerror or exc}") from None
    payload = {"file": args.output, "kind": args.kind, "variables": summary.variables,
               "constraints": summary.constraints, "binaries": summary.binaries}
    _emit(args, payload,
          f"wrote {args.output}: {summary.variables} variables, {summary.constraints} constraints")
    return EXIT_OK


def _report_rows(m: Morphology, args: argparse.Namespace) -> list[tuple[str, Composition, QualityVector]]:
    rows: list[tuple[str, Composition, QualityVector]] = []

    def add(method: str, comps: Sequence[Composition]) -> None:
        for c in comps:
            rows.append((method, c, quality_vector(m, c)))

    comps = enumerate_admissible(m, threads=args.threads)
    if comps:
        ranked = select_closest(comps, m, generate_ideal(m), "l2")
        levels = sorted({r.key for r in ranked})[:2]
        add("Ideal-point method", [r.composition for r in ranked if r.key in levels])
        vectors = [(i, estimate_vector(m, c).components) for i, c in enumerate(comps)]
        add("Pareto-based MA", [comps[i] for i in pareto_filter(vectors, MINIMIZE)])
    budgets = args.budget or (m.config.get("mcp") or {}).get("budgets") or []
    for b in budgets:
        inst = derive_mcp_instance(m, to_fraction(b))
        sol = solve_mcp_greedy(inst)
        add(f"Multiple choice problem (b={_text(to_fraction(b))})", [make_composition(m, sol.selection)])
    for b in budgets:
        sol = solve_qap_exact(derive_qap_instance(m, to_fraction(b)), threads=args.threads)
        add(f"Quadratic assignment (b={_text(to_fraction(b))})", [make_composition(m, sol.selection)])
    add("HMMD", [c for c, _ in solve_hierarchical(m, threads=args.threads)])
    return rows


def cmd_report(args: argparse.Namespace) -> int:
    m = _load(args)
    rows = _report_rows(m, args)
    text_rows, payload, last = [], [], None
    for method, c, q in rows:
        text_rows.append((method if method != last else "", grouped_label(m, c), str(q)))
        payload.append({"method": method, "composition": _comp(c), "quality": _quality(q)})
        last = method
    _emit(args, {"instance": m.name, "rows": payload},
          table(["Method", "Resultant composite DAs", "Quality vector (HMMD)"], text_rows))
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    src = common.add_mutually_exclusive_group(required=True)
    src.add_argument("-f", "--file", help="instance JSON file")
    src.add_argument("--fixture", choices=FIXTURES, help="bundled instance")
    common.add_argument("--json", action="store_true", help="emit JSON instead of a text table")
    common.add_argument("--threads", type=_positive, default=os.cpu_count() or 1,
                        help="solver parallelism (default: available CPUs)")
    common.add_argument("--fill-missing", type=int, metavar="LEVEL",
                        help="use LEVEL for undeclared compatibility pairs instead of failing")

    parser = _Parser(prog="morphsynth", description="Morphological synthesis of modular systems.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    def add(name: str, fn: Callable[[argparse.Namespace], int], help: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help, description=help)
        p.set_defaults(func=fn)
        return p

    def scoped(p: argparse.ArgumentParser, min_level: bool = True) -> None:
        p.add_argument("--scope", help="system node to solve (default: root)")
        if min_level:
            p.add_argument("--min-level", type=int, help="admissibility threshold (default: top level)")

    add("validate", cmd_validate, "check an instance and report its size")

    p = add("rank", cmd_rank, "derive DA priorities from criteria estimates")
    p.add_argument("--method", choices=METHODS, default=METHODS[0])
    p.add_argument("--threshold", default="2/3", help="concordance threshold for weighted_outranking")
    p.add_argument("--override", action="store_true", help="replace priorities given in the instance")
    p.add_argument("-o", "--output", help="write the instance with priorities filled in")

    p = add("enumerate", cmd_enumerate, "list admissible compositions")
    scoped(p)

    p = add("ideal", cmd_ideal, "rank admissible compositions by distance to an ideal point")
    scoped(p)
    p.add_argument("--strategy", choices=STRATEGIES, default=STRATEGIES[0])
    p.add_argument("--metric", choices=METRICS, default="l2")
    p.add_argument("--keying", choices=KEYINGS, default=PRIORITY)
    p.add_argument("--ideal", help="comma-separated expert ideal vector")
    p.add_argument("--top", type=_positive, help="show only the first N rows")

    p = add("pareto", cmd_pareto, "Pareto-filter admissible compositions")
    scoped(p)
    p.add_argument("--keying", choices=("priority", "criteria"), default=PRIORITY)
    p.add_argument("--with-compat", action="store_true",
                   help="extension: add min pairwise compatibility as a maximized component")
    p.add_argument("--candidates", help="JSON output of `enumerate --json` to filter instead")

    p = add("mcp", cmd_mcp, "multiple choice knapsack over the derived instance")
    scoped(p, min_level=False)
    p.add_argument("--budget", required=True)
    p.add_argument("--solver", choices=("greedy", "exact", "pareto"), default="greedy")
    p.add_argument("--greedy-strategy", choices=GREEDY_STRATEGIES, default=GREEDY_STRATEGIES[0])

    p = add("qap", cmd_qap, "quadratic assignment with compatibility pair profits")
    scoped(p, min_level=False)
    p.add_argument("--budget", required=True)
    p.add_argument("--solver", choices=("exact", "greedy"), default="exact")
    p.add_argument("--pareto", action="store_true", help="report the vector-objective frontier")
    p.add_argument("--at-most-one", action="store_true", help="allow empty groups")

    p = add("hmmd", cmd_hmmd, "hierarchical design with quality vectors")
    p.add_argument("--scope", help="solve the flat clique problem over this node instead")
    p.add_argument("--no-prune", action="store_true", help="keep dominated composites below the root")
    p.add_argument("--min-w", type=int, default=1)
    p.add_argument("--neighborhood", action="store_true", help="also list solutions one step below")

    p = add("hmmd-fuzzy", cmd_hmmd_fuzzy, "HMMD with fuzzy priorities and compatibilities")
    p.add_argument("--scope")
    p.add_argument("--case", type=int, choices=CASES, default=1)
    p.add_argument("--alpha", default="0")
    p.add_argument("--pref", choices=PREFERENCES, default=PREFERENCES[0])
    p.add_argument("--min-w", type=int, default=1)

    p = add("export-lp", cmd_export_lp, "write a 0-1 formulation in LP file format")
    p.add_argument("--kind", choices=KINDS, default="ma")
    p.add_argument("-o", "--output", help="target file (default: stdout)")
    p.add_argument("--budget")
    p.add_argument("--threshold", type=int, help="lowest admissible compatibility (kind ma)")
    p.add_argument("--scope")
    p.add_argument("--at-most-one", action="store_true")

    p = add("report", cmd_report, "compare all methods on one instance")
    p.add_argument("--budget", action="append", help="knapsack budget (repeatable)")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except CapExceededError as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except MorphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
