"""Command-line interface: ``causalflow <subcommand> ...``.

Exit status is 0 on success, 1 on domain errors and 2 on malformed input.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import digraph as dg
from . import formats
from .correlations import is_causal_deterministic
from .enumeration import FILTERS, all_digraphs, classify, gap_csv, iso_classes
from .errors import CausalFlowError, ParseError
from .flow import build_flow, leaves, nontrivial_leaves
from .model import contract, is_consistent, is_faithful
from .superflow import build_superflow
from .validation import run_suites, run_theorem3, two_cycle_admits_nothing


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CausalFlowError(f"cannot read {path}: {exc.strerror}") from None


def _write(text: str, path: str | None):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _fmt_assignment(values: dict) -> str:
    return " ".join(f"{k}={v}" for k, v in sorted(values.items())) or "(none)"


def cmd_soc(args):
    d = formats.parse_graph(_read(args.graph))
    bad = dg.soc_violation(d)
    lines = [f"SOC: {str(bad is None).lower()}"]
    if bad is not None:
        lines.append(f"cycle without siblings: ({' '.join(bad)})")
    _write("\n".join(lines) + "\n", args.out)


def cmd_chordal(args):
    d = formats.parse_graph(_read(args.graph))
    w = dg.chordal_witness(d)
    lines = [f"chordal-cycle: {str(w is not None).lower()}"]
    if w is not None:
        cycle, (u, v) = w
        lines += [f"cycle: ({' '.join(cycle)})", f"chord: {u} -> {v}"]
    _write("\n".join(lines) + "\n", args.out)


def cmd_faithful(args):
    m = formats.parse_model(_read(args.model))
    rep = is_faithful(m)
    lines = [f"faithful: {str(rep.faithful).lower()}"]
    for p, v in rep.failing:
        lines.append(f"unfaithful edge: {p} -> {v}")
    for (p, v), (other, q, r) in sorted(rep.witnesses.items()):
        lines.append(f"edge {p} -> {v}: others {_fmt_assignment(other)}, {p}={q} vs {p}={r}")
    _write("\n".join(lines) + "\n", args.out)


def cmd_consistent(args):
    m = formats.parse_model(_read(args.model))
    rep = is_consistent(m)
    lines = [f"consistent: {str(rep.consistent).lower()}", f"families checked: {rep.families_checked}"]
    if not rep.consistent:
        fam = " ".join(f"{v}=({','.join(map(str, f))})" for v, f in rep.family.items())
        lines.append(f"family: {fam}")
        if rep.fixed_points:
            lines += [f"fixed point: {_fmt_assignment(fp)}" for fp in rep.fixed_points]
        else:
            lines.append("fixed points: none")
    _write("\n".join(lines) + "\n", args.out)


def _emit_flow(f, args, kind):
    if args.dot is not None:
        _write(formats.format_dot(f, annotate=args.annotate, name=kind), args.dot)
    if args.plot:
        from .plotting import plot_flow

        plot_flow(f, args.plot, title=f"{kind} of {f.root.edge_label()}", annotate=args.annotate)
    if args.dot != "-":
        _write(formats.format_flow(f, annotate=args.annotate, kind=kind), args.out)


def cmd_flow(args):
    m = formats.parse_model(_read(args.model))
    _emit_flow(build_flow(m), args, "flow")


def cmd_superflow(args):
    d = formats.parse_graph(_read(args.graph))
    _emit_flow(build_superflow(d, annotate_removed=args.annotate), args, "superflow")


def cmd_certify(args):
    d = formats.parse_graph(_read(args.graph))
    sf = build_superflow(d)
    lv = leaves(sf)
    bad = nontrivial_leaves(sf)
    lines = [
        f"causal-only: {str(not bad).lower()}",
        f"superflow: {len(sf)} nodes, {len(sf.edges)} edges, {len(lv)} leaves ({len(lv) - len(bad)} trivial)",
    ]
    lines += [f"nontrivial leaf: {n.label()}" for n in bad]
    if args.plot:
        from .plotting import plot_flow

        plot_flow(sf, args.plot, title=f"superflow of {d.edge_label()}")
    _write("\n".join(lines) + "\n", args.out)


def cmd_contract(args):
    m = formats.parse_model(_read(args.model))
    iv = formats.parse_intervention(_read(args.interventions), m.spaces)
    _write(formats.format_correlation(contract(m, iv)), args.out)


def cmd_causal_check(args):
    c = formats.parse_correlation(_read(args.correlation))
    rep = is_causal_deterministic(c)
    lines = [f"causal: {str(rep.causal).lower()}"]
    if rep.witness is not None:
        lines.append("order:")
        lines += ["  " + s for s in rep.witness.render()]
    _write("\n".join(lines) + "\n", args.out)


def _selected_filters(args):
    out = list(args.filter or [])
    for name in FILTERS:
        flag = getattr(args, name)
        if flag is True:
            out.append(name)
        elif flag is False:
            out.append("not-" + name)
    return out


def _classify_one(cls):
    return classify([cls])[0]


def cmd_enumerate(args):
    filters = _selected_filters(args)
    if args.classify and not filters:
        from .enumeration import GAP_FILTERS

        filters = list(GAP_FILTERS)
    graphs = list(all_digraphs(args.n, filters))
    classes = iso_classes(graphs)
    if args.classify:
        if args.jobs > 1:
            with ProcessPoolExecutor(args.jobs) as pool:
                rows = list(pool.map(_classify_one, classes))
        else:
            rows = classify(classes)
        rows = [r.__class__(**{**r.__dict__, "class_id": k}) for k, r in enumerate(rows)]
        if args.plot:
            from .plotting import plot_classification

            plot_classification(rows, args.plot, title=f"n={args.n}: {', '.join(filters)}")
        _write(gap_csv(rows), args.out)
        return
    lines = [f"# n={args.n} filters={','.join(filters) or '-'} labeled={len(graphs)} classes={len(classes)}"]
    if args.labeled:
        lines += [d.label() for d in graphs]
    else:
        lines += [
            f"class {k}: size={c.size} canonical={c.canonical.decode()} representative={c.representative.edge_label()}"
            for k, c in enumerate(classes)
        ]
    _write("\n".join(lines) + "\n", args.out)


def cmd_validate(args):
    which = args.command
    if which == "validate-thm3":
        reports = [run_theorem3(args.n, all_interventions=args.all_interventions)]
    else:
        suites = run_suites(args.n, args.sample_n, seed=args.seed)
        if which == "validate-thm1":
            reports = [suites["theorem1-reduction"], suites["flow-in-superflow"]]
        else:
            reports = [suites["theorem2-admissibility"], two_cycle_admits_nothing()]
    _write("".join(r.summary() + "\n" for r in reports), args.out)
    if not all(r.ok for r in reports):
        raise CausalFlowError("property suite reported failures")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="causalflow", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("--out", "-o", default=None, help="write the report here instead of stdout")
        sp.set_defaults(func=fn)
        return sp

    add("soc", cmd_soc, "siblings-on-cycles test").add_argument("graph")
    add("chordal", cmd_chordal, "chordal-cycle test").add_argument("graph")
    add("faithful", cmd_faithful, "faithfulness of a model").add_argument("model")
    add("consistent", cmd_consistent, "consistency of a model").add_argument("model")
    for name, fn, arg, help in (
        ("flow", cmd_flow, "model", "flow of a causal model"),
        ("superflow", cmd_superflow, "graph", "superflow of a causal structure"),
    ):
        sp = add(name, fn, help)
        sp.add_argument(arg)
        sp.add_argument("--dot", default=None, metavar="PATH", help="write DOT ('-' for stdout)")
        sp.add_argument("--annotate", action="store_true", help="label edges with the intervention")
        sp.add_argument("--plot", default=None, metavar="PATH", help="render a figure (png/pdf/svg)")
    sp = add("certify", cmd_certify, "causal-only certificate from the superflow")
    sp.add_argument("graph")
    sp.add_argument("--plot", default=None, metavar="PATH")
    sp = add("contract", cmd_contract, "contract a model with interventions")
    sp.add_argument("model")
    sp.add_argument("interventions")
    add("causal-check", cmd_causal_check, "causal decomposition of a correlation").add_argument("correlation")

    sp = add("enumerate", cmd_enumerate, "enumerate digraphs, optionally classify")
    sp.add_argument("-n", type=int, required=True)
    sp.add_argument("--filter", action="append", metavar="NAME",
                    help=f"named filter, repeatable, 'not-' negates ({', '.join(FILTERS)})")
    for name in FILTERS:
        sp.add_argument(f"--{name}", dest=name, action="store_true", default=None)
        sp.add_argument(f"--no-{name}", dest=name, action="store_false")
    sp.add_argument("--classify", action="store_true", help="CSV certification report per class")
    sp.add_argument("--labeled", action="store_true", help="list labeled graphs instead of classes")
    sp.add_argument("--plot", default=None, metavar="PATH", help="figure for --classify")
    sp.add_argument("--jobs", type=int, default=1)

    for name in ("validate-thm1", "validate-thm2", "validate-thm3"):
        sp = add(name, cmd_validate, "property suite")
        sp.add_argument("-n", type=int, default=3)
        if name == "validate-thm3":
            sp.add_argument("--all-interventions", action="store_true")
        else:
            sp.add_argument("--sample-n", type=int, default=None, help="also sample graphs of this size")
            sp.add_argument("--seed", type=int, default=0)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except CausalFlowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
