"""Command-line front end.

Exit codes: 0 on success or a certificate, 2 when the answer is "not a
certificate" or "inconclusive", 1 on any error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence, TextIO

from .certify import canonical_certificate, enumerate_types, verify_certificate
from .cli_io import (
    ParseError, dump_report, export_dot, header, parse_curve, parse_document,
    rat_to_json, report_document, serialize_curve,
)
from .degeneration_model import ANCHOR_KINDS, assign_anchors, projective_degree
from .errors import TropicertError
from .moduli import ci_expected, deformation_space, expected_dim, mobility
from .obstruction import section_space_dim, propagate_vanishing
from .tropical_curve import check_balancing, degree_map, is_immersive, is_trivalent

EXIT_OK, EXIT_ERROR, EXIT_NEGATIVE = 0, 1, 2


class UsageError(TropicertError):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(None, path, exc.strerror or "cannot read file") from None
    except UnicodeDecodeError:
        raise ParseError(None, path, "not UTF-8 text") from None


def _fmt_vec(v) -> str:
    return "(" + ", ".join(str(rat_to_json(x)) for x in v) + ")"


# --------------------------------------------------------------------------
# commands; each returns (exit code, report document, text lines)

def cmd_validate(args):
    doc = parse_document(_read(args.file))
    g = doc.curve.graph
    rep = report_document({"kind": "validation", "ok": True, "vertices": g.n_vertices,
                           "edges": len(g.edges)})
    return EXIT_OK, rep, [f"ok: {g.n_vertices} vertices, {len(g.edges)} edges"]


def cmd_info(args):
    doc = parse_document(_read(args.file))
    curve = doc.curve
    dm = degree_map(curve)
    bal = check_balancing(curve)
    try:
        delta = projective_degree(curve, curve.ambient_dim + 1)
    except TropicertError:
        delta = None
    genus = curve.graph.first_betti()
    rep = report_document({
        "kind": "info",
        "degree_map": [{"direction": list(u), "multiplicity": k} for u, k in dm.support.items()],
        "e": dm.e, "genus": genus, "trivalent": is_trivalent(curve),
        "immersive": is_immersive(curve), "balanced": bal.balanced,
        "residues": {str(v): [rat_to_json(x) for x in r] for v, r in sorted(bal.residues.items())},
        "projective_degree": delta,
    })
    lines = [f"degree map ({dm.e} leaves):"]
    lines += [f"  {_fmt_vec(u)} x{k}" for u, k in dm.support.items()]
    lines += [f"projective degree: {delta if delta is not None else '-'}",
              f"genus: {genus}", f"trivalent: {rep['trivalent']}",
              f"immersive: {rep['immersive']}", f"balanced: {bal.balanced}"]
    lines += [f"  residue at V{v}: {_fmt_vec(r)}" for v, r in sorted(bal.residues.items())]
    return EXIT_OK, rep, lines


def cmd_dims(args):
    if args.ci:
        try:
            degrees = [int(x) for x in args.ci.split(",")]
        except ValueError:
            raise UsageError(f"--ci expects comma-separated integers, got {args.ci!r}") from None
        rep = ci_expected(degrees, args.n, args.curve_degree)
    else:
        if args.d is None:
            raise UsageError("dims needs --d unless --ci is given")
        rep = expected_dim(args.curve_degree, args.n, args.d)
    doc = report_document(rep)
    where = (f"complete intersection {rep.ci_degrees} in P^{rep.ambient}" if rep.ci_degrees
             else f"degree-{rep.d} hypersurface in P^{rep.n}")
    lines = [
        f"degree-{rep.curve_degree} curves, {where}",
        f"  moduli:     {rep.moduli}",
        f"  incidence:  {rep.incidence}",
        f"  expected:   {rep.expected}",
        f"  threshold:  {rep.threshold}",
        f"  sweeps:     {'yes' if rep.sweeps else 'no'}",
    ]
    return EXIT_OK, doc, lines


def _labeled(args):
    return parse_curve(_read(args.file))


def cmd_obstruction(args):
    lc = _labeled(args)
    rep = propagate_vanishing(lc, lc.n)
    oracle = section_space_dim(lc, lc.n) if args.oracle else None
    doc = report_document(rep, oracle_dim=oracle)
    lines = [f"obstruction: {rep.verdict}"]
    for v in lc.graph.vertices:
        lines.append(f"  V{v}: dual degrees {list(rep.degrees[v])}, h0 {rep.dual_dims[v]}")
    lines.append("  trace: " + (" ".join(f"V{v}" for v in rep.trace) or "-"))
    if oracle is not None:
        lines.append(f"  glued sections: {oracle}")
    return (EXIT_OK if rep.vanishes else EXIT_NEGATIVE), doc, lines


def cmd_deform(args):
    lc = _labeled(args)
    mode = args.anchors
    if mode is None:
        mode = "file" if lc.anchors else "from-curve"
    if mode != "file":
        lc = assign_anchors(lc, mode, seed=args.seed, kind=args.anchor_kind)
    ds = deformation_space(lc, require_base=False)
    mob = {}
    if ds.feasible:
        for v, u in lc.free_vertices():
            mob[str(v)] = max(mob.get(str(v), 0), mobility(ds, v, u))
    doc = report_document(ds, anchors=mode, anchor_kind=args.anchor_kind, mobility=mob)
    lines = [f"anchors: {mode}" + ("" if mode == "file" else f" ({args.anchor_kind})"),
             f"feasible: {ds.feasible}", f"base curve satisfies anchors: {ds.base_satisfied}",
             f"dimension: {ds.dimension} (naive count {ds.expected_count})"]
    lines += [f"  mobility of V{v}: {k}" for v, k in mob.items()]
    return EXIT_OK, doc, lines


def _certificate_lines(rep):
    lines = [f"verdict: {rep.verdict}" + (f" ({rep.reason})" if rep.reason else "")]
    lines += [f"  balanced: {rep.balanced}", f"  immersive: {rep.immersive}",
              f"  realizable: {rep.realizable}"]
    if rep.obstruction is not None:
        lines.append(f"  obstruction: {rep.obstruction.verdict} (glued sections {rep.oracle_dim})")
    lines.append(f"  deformations: {rep.deformation_dim} (naive count {rep.expected_deformation_dim})")
    where = f" at V{rep.mobility_vertex}" if rep.mobility_vertex is not None else ""
    lines.append(f"  mobility: {rep.mobility}{where}")
    lines.append("  profiles: " + ", ".join(f"{k}={v}" for k, v in rep.profile_counts.items()))
    lines.append(f"  vertices: {rep.curve.graph.n_vertices}")
    for v in rep.curve.graph.vertices:
        lines.append(f"    V{v} {_fmt_vec(rep.curve.curve.positions[v])}")
    return lines


def cmd_certify(args):
    if args.file:
        rep = verify_certificate(parse_curve(_read(args.file)))
    else:
        if args.n is None:
            raise UsageError("certify needs --n or --curve")
        rep = canonical_certificate(args.n, args.d)
    if args.out:
        Path(args.out).write_text(serialize_curve(rep.curve), encoding="utf-8")
    return (EXIT_OK if rep.is_certificate else EXIT_NEGATIVE), report_document(rep), \
        _certificate_lines(rep)


def cmd_census(args):
    census = enumerate_types(args.n, args.degree, max_trees=args.max_trees,
                             max_assignments=args.max_assignments, d=args.d)
    doc = report_document(census)
    lines = [f"census n={census.n} degree={census.degree} d={census.d}"
             + (" (capped)" if census.capped else ""),
             f"  {'trees generated':<18}{census.trees_generated:>8}",
             f"  {'types examined':<18}{census.types_examined:>8}",
             f"  {'contracted':<18}{census.contracted:>8}",
             f"  {'realizable':<18}{census.realizable:>8}",
             f"  {'certificates':<18}{census.certificates:>8}",
             "  verdicts:"]
    lines += [f"    {k:<40}{v:>6}" for k, v in census.verdicts.items()]
    return EXIT_OK, doc, lines


def cmd_export_dot(args):
    doc = parse_document(_read(args.file))
    try:
        obj = doc.labeled()
    except TropicertError:
        obj = doc.curve
    text = export_dot(obj)
    return EXIT_OK, None, text.rstrip("\n").split("\n")


# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="emit machine-readable report documents")
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS,
                        help="suppress the version header line")

    p = argparse.ArgumentParser(prog="tropicert", parents=[common],
                                description="Exact tropical sweeping certificates.")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, func, help_, file_arg=True):
        sp = sub.add_parser(name, parents=[common], help=help_)
        if file_arg:
            sp.add_argument("file", help="curve document (JSON)")
        sp.set_defaults(func=func)
        return sp

    add("validate", cmd_validate, "parse and check a curve document")
    add("info", cmd_info, "degree map, genus, trivalence, immersiveness")
    sp = add("dims", cmd_dims, "expected dimension counts", file_arg=False)
    sp.add_argument("--curve-degree", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--d", type=int)
    sp.add_argument("--ci", help="comma-separated degrees of a complete intersection")
    sp = add("obstruction", cmd_obstruction, "zero-propagation obstruction check")
    sp.add_argument("--oracle", action="store_true", help="also glue explicit sections")
    sp = add("deform", cmd_deform, "exact deformation space and free-vertex mobility")
    sp.add_argument("--anchors", choices=["from-curve", "random"])
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--anchor-kind", choices=ANCHOR_KINDS, default="hyperplane")
    sp = add("certify", cmd_certify, "search for or verify a sweeping certificate", file_arg=False)
    sp.add_argument("--n", type=int)
    sp.add_argument("--d", type=int)
    sp.add_argument("--curve", dest="file", help="verify this curve instead of searching")
    sp.add_argument("--out", help="write the certificate curve here")
    sp = add("census", cmd_census, "exhaustive census of combinatorial types", file_arg=False)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--degree", type=int, required=True)
    sp.add_argument("--d", type=int)
    sp.add_argument("--max-trees", type=int, default=20000)
    sp.add_argument("--max-assignments", type=int, default=20000)
    add("export-dot", cmd_export_dot, "Graphviz rendering")
    return p


def run_cli(argv: Sequence[str] | None = None, stdout: TextIO | None = None,
            stderr: TextIO | None = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    # the flags are shared with every subparser, so they stay unset unless given somewhere
    args.json = getattr(args, "json", False)
    args.quiet = getattr(args, "quiet", False)
    try:
        code, doc, lines = args.func(args)
    except TropicertError as exc:
        name = type(exc).__name__
        stderr.write(f"error: {name}: {exc}\n")
        if args.json:
            stdout.write(dump_report(report_document(
                {"kind": "error", "error": name, "message": str(exc)})))
        return EXIT_ERROR
    if args.json and doc is not None:
        stdout.write(dump_report(doc))
    else:
        if not args.quiet and args.command != "export-dot":
            stdout.write(header() + "\n")
        stdout.write("\n".join(lines) + "\n")
    return code


def main() -> None:
    sys.exit(run_cli())
