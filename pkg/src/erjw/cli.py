"""Command line front end over the computation engines.

One process runs one subcommand: fgl (formal negation and doubling
series), chern (conjugate symmetric classes), page (coefficient charts
by any engine), coeff (named classes and relation checks), bo (class
ring presentations and normal forms), orient (orientation
certificates).

Exit codes separate misuse from broken mathematics: 0 success, 1 a
mathematical invariant failed (including engine disagreement under
`--engine all`), 2 bad input or usage.  JSON output embeds the resolved
configuration and package version; SVG charts are deterministic byte
for byte.
"""

from __future__ import annotations

import argparse
import ast
import json
import sys
from importlib import metadata

from .boring import present, reduce
from .bss import (
    TruncatedOracle,
    admissible_differentials,
    closed_form_page,
    step_engine_page,
)
from .coeff import (
    filtration_profile,
    named_generators,
    relation_check,
    total_period,
)
from .errors import EmptyBasisError, InputError, MathInvariantError
from .fgl import GroupLaw
from .graded import GradedSeries
from .orient import orientability_scan
from .scalar2 import ModuleStructure, TwoLocal
from .symchern import SymmetricContext

__all__ = ["main"]

_ZERO_STRUCT = ModuleStructure(0, ())


def _version() -> str:
    try:
        return metadata.version("erjw")
    except metadata.PackageNotFoundError:
        return "0.0.0"


def _window(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("..")
    if not sep:
        raise argparse.ArgumentTypeError(
            f"window must look like -48..48, got {text!r}")
    try:
        bounds = int(lo), int(hi)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    if bounds[1] < bounds[0]:
        raise argparse.ArgumentTypeError("window upper end below lower end")
    return bounds


# -- engines ------------------------------------------------------------------
# Kept in a table so a test can swap one out and watch the disagreement
# trip.  Each returns {(m, t): ModuleStructure} with zero cells absent.


def _closed_chart(n, r, window, caps):
    page = closed_form_page(n, r)
    return page.chart(range(window[0], window[1] + 1), caps)


def _step_chart(n, r, window, caps):
    page = step_engine_page(n, r)
    return page.chart(range(window[0], window[1] + 1), caps)


def _oracle_chart(n, r, window, caps):
    oracle = TruncatedOracle(n, window[0], window[1], caps)
    oracle.run()
    chart = oracle.chart_at(r)
    return ({cell: st for cell, st in chart.items()
             if cell not in oracle.flags}, oracle.flags)


ENGINES = {
    "closed": _closed_chart,
    "step": _step_chart,
    "oracle": _oracle_chart,
}


def _band(n: int) -> int:
    # rows the limit chart can inhabit; everything above is bookkeeping
    return 2 ** (n + 1) - 1


def _visible(chart: dict, band: int) -> dict:
    return {cell: st for cell, st in chart.items() if cell[0] <= band}


def _chart_for(args) -> tuple[dict, dict]:
    n, r, window, caps = args.n, args.r, args.window, args.caps
    if r < 1:
        raise InputError("page index must be at least 1")
    band = _band(n)
    guard = _visible(ENGINES["closed"](n, r, window, caps), band)
    if not guard or set(guard) == {(0, 0)} and guard[0, 0].torsion == ():
        raise EmptyBasisError("window and caps leave nothing to chart")
    meta: dict = {"rows_shown": band}
    if args.engine == "closed":
        return guard, meta
    if args.engine == "step":
        return _visible(ENGINES["step"](n, r, window, caps), band), meta
    oracle_chart, flags = ENGINES["oracle"](n, r, window, caps)
    oracle_vis = _visible(oracle_chart, band)
    meta["flagged_cells"] = len(flags)
    if args.engine == "oracle":
        return oracle_vis, meta
    step_vis = _visible(ENGINES["step"](n, r, window, caps), band)
    mismatches = []
    for cell in sorted(set(guard) | set(step_vis)):
        a = guard.get(cell, _ZERO_STRUCT)
        b = step_vis.get(cell, _ZERO_STRUCT)
        if a != b:
            mismatches.append((cell, str(a), str(b), "-"))
    visible_flags = {cell for cell in flags if cell[0] <= band}
    for cell in sorted((set(guard) | set(oracle_vis)) - visible_flags):
        a = guard.get(cell, _ZERO_STRUCT)
        c = oracle_vis.get(cell, _ZERO_STRUCT)
        if a != c:
            mismatches.append((cell, str(a), "-", str(c)))
    if mismatches:
        rows = "; ".join(
            f"(m={m},t={t}) closed={a} step={b} oracle={c}"
            for (m, t), a, b, c in mismatches[:12])
        raise MathInvariantError(f"engines disagree: {rows}")
    meta["engines_agree"] = ["closed", "step", "oracle"]
    return guard, meta


# -- SVG chart ----------------------------------------------------------------

_CELL = 20
_MARGIN = 44


def emit_chart(chart: dict, n: int, r: int, window: tuple[int, int],
               band: int) -> str:
    """Static SVG for one page chart; byte-identical across runs."""
    lo, hi = window
    width = (hi - lo + 1) * _CELL + 2 * _MARGIN
    height = (band + 1) * _CELL + 2 * _MARGIN

    def cx(t: int) -> int:
        return _MARGIN + (t - lo) * _CELL + _CELL // 2

    def cy(m: int) -> int:
        return height - _MARGIN - m * _CELL - _CELL // 2

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}"'
        f' height="{height}" viewBox="0 0 {width} {height}">',
        '<defs><marker id="tip" markerWidth="6" markerHeight="6"'
        ' refX="5" refY="3" orient="auto">'
        '<path d="M0,0 L6,3 L0,6 z" fill="#444"/></marker></defs>',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{_MARGIN}" y="16" font-family="monospace" font-size="11"'
        f' fill="#222">page {r}, n={n}, t in {lo}..{hi}</text>',
    ]
    axis_y = height - _MARGIN + 6
    for t in range(lo, hi + 1):
        if t % 8 == 0:
            parts.append(
                f'<text x="{cx(t)}" y="{axis_y + 10}" font-family="monospace"'
                f' font-size="8" fill="#555" text-anchor="middle">{t}</text>')
    m_step = 1 if band <= 8 else 4
    for m in range(0, band + 1, m_step):
        parts.append(
            f'<text x="{_MARGIN - 8}" y="{cy(m) + 3}" font-family="monospace"'
            f' font-size="8" fill="#555" text-anchor="end">{m}</text>')
    parts.append(
        f'<line x1="{_MARGIN - 2}" y1="{axis_y}" x2="{width - _MARGIN + 2}"'
        f' y2="{axis_y}" stroke="#888" stroke-width="1"/>')
    parts.append(
        f'<line x1="{_MARGIN - 2}" y1="{axis_y}" x2="{_MARGIN - 2}"'
        f' y2="{_MARGIN}" stroke="#888" stroke-width="1"/>')
    if r in admissible_differentials(n):
        for (m, t) in sorted(chart):
            tgt = (m + r, t + 1)
            if tgt in chart:
                parts.append(
                    f'<line x1="{cx(t)}" y1="{cy(m)}" x2="{cx(t + 1)}"'
                    f' y2="{cy(m + r)}" stroke="#444" stroke-width="1"'
                    ' marker-end="url(#tip)"/>')
    for (m, t) in sorted(chart):
        st = chart[(m, t)]
        x, y = cx(t), cy(m)
        glyphs = [f'<g><title>m={m} t={t}: {st}</title>']
        if st.free_rank:
            glyphs.append(f'<circle cx="{x}" cy="{y}" r="4" fill="#1a1a1a"/>')
            if st.free_rank > 1:
                glyphs.append(
                    f'<text x="{x + 5}" y="{y - 4}" font-family="monospace"'
                    f' font-size="7" fill="#1a1a1a">{st.free_rank}</text>')
        if st.torsion:
            glyphs.append(
                f'<rect x="{x - 4}" y="{y - 4}" width="8" height="8"'
                ' fill="none" stroke="#1a1a1a" stroke-width="1.2"/>')
            label = ",".join(str(d) for d in st.torsion)
            glyphs.append(
                f'<text x="{x + 6}" y="{y + 8}" font-family="monospace"'
                f' font-size="7" fill="#1a1a1a">{label}</text>')
        glyphs.append("</g>")
        parts.append("".join(glyphs))
    parts.append("</svg>")
    return "\n".join(parts)


# -- class ring expressions ---------------------------------------------------


def _parse_ring_expr(text: str, spec, weight: int) -> GradedSeries:
    """Sums, differences, products and powers of ring generators."""
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise InputError(f"cannot parse expression: {exc}") from None

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return GradedSeries.unit(spec, node.value, weight)
        if isinstance(node, ast.Name):
            return GradedSeries.gen(spec, node.id, trunc=weight)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return ev(node.operand).map_coefficients(lambda c: c * -1)
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                if not (isinstance(node.left, ast.Name)
                        and isinstance(node.right,
                                       (ast.Constant, ast.UnaryOp))):
                    raise InputError("powers apply to single generators")
                exp_node = node.right
                sign = 1
                if isinstance(exp_node, ast.UnaryOp):
                    if not isinstance(exp_node.op, ast.USub):
                        raise InputError("unsupported operator in exponent")
                    sign, exp_node = -1, exp_node.operand
                if not (isinstance(exp_node, ast.Constant)
                        and isinstance(exp_node.value, int)):
                    raise InputError("exponents must be integer literals")
                return GradedSeries.gen(spec, node.left.id,
                                        exp=sign * exp_node.value,
                                        trunc=weight)
            left, right = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                return left * right
            raise InputError("only +, -, * and integer powers are allowed")
        raise InputError(f"unsupported syntax: {ast.dump(node)[:40]}")

    try:
        return ev(tree)
    except ValueError as exc:
        raise InputError(str(exc)) from None


# -- subcommands --------------------------------------------------------------


def _series_terms(uni, cut: int) -> list[dict]:
    out = []
    for exp in range(min(len(uni), cut + 1)):
        coeff = uni[exp]
        if not coeff.is_zero:
            out.append({"exponent": exp, "coefficient": str(coeff)})
    return out


def _cmd_fgl(args):
    law = GroupLaw(args.n, precision=args.precision)
    negation = law.hat_iota()
    doubling = law.hat_k_series(2)
    result = {
        "lam": law.spec.lam,
        "precision": law.precision,
        "negation": _series_terms(negation, args.terms),
        "doubling": _series_terms(doubling, args.terms),
    }
    lines = [f"formal group data, n={args.n}, precision={law.precision}"]
    for label, key in (("[-1](u)", "negation"), ("[2](u)", "doubling")):
        lines.append(f"{label}:")
        lines += [f"  u^{term['exponent']}: {term['coefficient']}"
                  for term in result[key]]
    return result, "\n".join(lines)


def _cmd_chern(args):
    iota = GroupLaw(args.n, precision=args.weight + 4).hat_iota()
    ctx = SymmetricContext(iota, args.q, args.weight)
    classes = []
    for k in range(1, args.q + 1):
        conj = ctx.conjugate_chern(k)
        profile = ctx.conjugation_defect_mod2(k)
        classes.append({
            "k": k,
            "conjugate": str(conj),
            "defect_weights_mod2": sorted(profile),
        })
    result = {"q": args.q, "weight": args.weight, "classes": classes}
    lines = [f"conjugate classes, n={args.n}, q={args.q},"
             f" weight={args.weight}"]
    for entry in classes:
        lines.append(f"c{entry['k']}* = {entry['conjugate']}")
        lines.append(f"  mod-2 defect at weights {entry['defect_weights_mod2']}")
    return result, "\n".join(lines)


def _cmd_page(args):
    chart, meta = _chart_for(args)
    band = meta["rows_shown"]
    cells = [{"m": m, "t": t, "structure": str(st), "free": st.free_rank,
              "torsion": list(st.torsion)}
             for (m, t), st in sorted(chart.items())]
    result = {"cells": cells, **meta}
    if args.format == "svg":
        return result, emit_chart(chart, args.n, args.r, args.window, band)
    lines = [f"page {args.r}, n={args.n}, engine={args.engine},"
             f" t in {args.window[0]}..{args.window[1]}, rows 0..{band}"]
    lines += [f"  m={c['m']:>3} t={c['t']:>5}: {c['structure']}"
              for c in cells]
    if "flagged_cells" in meta:
        lines.append(f"  oracle flagged cells: {meta['flagged_cells']}")
    if "engines_agree" in meta:
        lines.append("  all engines agree on the window")
    return result, "\n".join(lines)


def _cmd_coeff(args):
    gens = named_generators(args.n)
    result = {
        "period": total_period(args.n),
        "generators": [
            {"name": cls.name, "row": cls.row,
             "total_degree": cls.total_degree, "series": str(cls.series)}
            for cls in gens.values()
        ],
        "filtration": [
            {"row": row, "blocks": list(blocks)}
            for row, blocks in filtration_profile(args.n)
        ],
    }
    lines = [f"coefficients, n={args.n}, period {result['period']}"]
    for g in result["generators"]:
        lines.append(f"  {g['name']}: degree {g['total_degree']},"
                     f" row {g['row']}, {g['series']}")
    if args.relation:
        report = relation_check(args.n, args.relation)
        result["relation"] = {
            "text": args.relation, "holds": report.holds,
            "witness": report.witness, "summand": report.summand,
        }
        verdict = "holds" if report.holds else "fails"
        lines.append(f"relation {args.relation!r} {verdict}:"
                     f" {report.witness} in {report.summand}")
    return result, "\n".join(lines)


def _cmd_bo(args):
    q = args.q if args.q is not None else args.weight
    pres = present(args.n, q, args.weight)
    result = {
        "q": q,
        "weight": args.weight,
        "generator_degrees": list(pres.generator_degrees),
        "relations": [str(rel) for rel in pres.relations],
        "heads": [
            {"monomial": str(GradedSeries(pres.spec, {key: TwoLocal(1)})),
             "coefficient": str(coeff)}
            for key, coeff in pres.heads
        ],
    }
    lines = [f"class ring, n={args.n}, q={q}, weight={args.weight}"]
    lines += [f"  deg c{k + 1} = {d}"
              for k, d in enumerate(result["generator_degrees"])]
    for i, rel in enumerate(result["relations"], start=1):
        lines.append(f"  r{i} = {rel}")
    if args.reduce is not None:
        series = _parse_ring_expr(args.reduce, pres.spec, args.weight)
        nf = reduce(series, pres)
        result["reduce"] = {
            "input": args.reduce,
            "normal_form": str(nf),
            "is_zero": nf.is_zero,
        }
        lines.append(f"reduce({args.reduce}) = {nf}")
    return result, "\n".join(lines)


def _cmd_orient(args):
    scan = orientability_scan(args.n, weight=args.weight, span=args.span,
                              caps=args.caps)
    result = {
        "bundle": scan.bundle,
        "certified": scan.certified,
        "steps": [
            {"k": s.k, "page": s.page, "method": s.method,
             "verdict": s.verdict, "target_degree": s.target_degree,
             "residue": s.residue, "modulus": s.modulus,
             "rechecked": list(s.rechecked)}
            for s in scan.steps
        ],
        "external_facts": list(scan.external_facts),
        "notes": list(scan.notes),
    }
    lines = [f"orientation scan, n={args.n}: {scan.bundle}"]
    for s in scan.steps:
        mark = "ok" if s.verdict else "FAIL"
        extra = (f" degree {s.target_degree} = {s.residue}"
                 f" mod {s.modulus}" if s.method == "degree-gap" else "")
        lines.append(f"  page {s.page:>2} k={s.k} {s.method}: {mark}{extra}")
    lines.append("certified" if scan.certified else "NOT certified")
    for fact in scan.external_facts:
        lines.append(f"external: {fact}")
    for note in scan.notes:
        lines.append(f"note: {note}")
    return result, "\n".join(lines)


# -- wiring -------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="erjw",
        description="graded coefficient computations and certificates")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--n", type=int, required=True,
                       help="height of the theory, at least 1")
        p.add_argument("--format", choices=("text", "json"), default="text")

    p_fgl = sub.add_parser("fgl", help="negation and doubling series")
    common(p_fgl)
    p_fgl.add_argument("--precision", type=int, default=None,
                       help="series cutoff; default 2^(n+2)")
    p_fgl.add_argument("--terms", type=int, default=8,
                       help="exponents to display")
    p_fgl.set_defaults(func=_cmd_fgl)

    p_chern = sub.add_parser("chern", help="conjugate symmetric classes")
    common(p_chern)
    p_chern.add_argument("--q", type=int, required=True)
    p_chern.add_argument("--weight", type=int, default=6)
    p_chern.set_defaults(func=_cmd_chern)

    p_page = sub.add_parser("page", help="coefficient page charts")
    p_page.add_argument("--n", type=int, required=True)
    p_page.add_argument("--format", choices=("text", "json", "svg"),
                        default="text")
    p_page.add_argument("--r", type=int, required=True, help="page index")
    p_page.add_argument("--window", type=_window, required=True,
                        metavar="LO..HI", help="total degree window")
    p_page.add_argument("--caps", type=int, default=6)
    p_page.add_argument("--engine",
                        choices=("closed", "step", "oracle", "all"),
                        default="all")
    p_page.set_defaults(func=_cmd_page)

    p_coeff = sub.add_parser("coeff", help="named classes and relations")
    common(p_coeff)
    p_coeff.add_argument("--relation", default=None,
                         help="equality chain to check, e.g."
                         " 'alpha*alpha_2 = 2*w'")
    p_coeff.set_defaults(func=_cmd_coeff)

    p_bo = sub.add_parser("bo", help="class ring presentation")
    common(p_bo)
    p_bo.add_argument("--q", type=int, default=None,
                      help="class count; defaults to the weight bound")
    p_bo.add_argument("--weight", type=int, required=True)
    p_bo.add_argument("--reduce", default=None, metavar="EXPR",
                      help="expression to normal-form in the ring")
    p_bo.set_defaults(func=_cmd_bo)

    p_orient = sub.add_parser("orient", help="orientation certificates")
    common(p_orient)
    p_orient.add_argument("--weight", type=int, default=4)
    p_orient.add_argument("--span", type=int, default=8)
    p_orient.add_argument("--caps", type=int, default=4)
    p_orient.set_defaults(func=_cmd_orient)
    return parser


def _config_echo(args) -> dict:
    skip = {"func", "format"}
    out = {}
    for key, value in sorted(vars(args).items()):
        if key in skip:
            continue
        if isinstance(value, tuple):
            value = list(value)
        out[key] = value
    out["format"] = args.format
    return out


def main(argv=None) -> int:
    parser = _build_parser()
    if argv is None:
        argv = sys.argv[1:]
    # windows like -48..48 start with a dash; glue them to their flag so
    # the parser does not mistake them for options
    argv = list(argv)
    for i in range(len(argv) - 1, 0, -1):
        if argv[i - 1] == "--window" and argv[i].startswith("-"):
            argv[i - 1:i + 1] = [f"--window={argv[i]}"]
    args = parser.parse_args(argv)
    try:
        result, text = args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MathInvariantError as exc:
        print(f"invariant failure: {exc}", file=sys.stderr)
        return 1
    if args.format == "json":
        envelope = {
            "version": _version(),
            "command": args.command,
            "config": _config_echo(args),
            "result": result,
        }
        print(json.dumps(envelope, sort_keys=True, indent=2))
    else:
        print(text)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
