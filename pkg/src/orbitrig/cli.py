"""Command line entry point: orbitrig <subcommand> ..."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import tables as tables_mod
from .analysis import (
    DEFAULT_TOL,
    InstabilityError,
    adjusted_counts,
    finite_symmetric_minimal,
    maxwell_combined,
    motion_space,
    rank_float,
)
from .corpus import all_entries, check_entry, demo_by_id
from .framework import FrameworkError, expand_patch, load, validate
from .symmetry import (
    SymmetryError,
    VARIANTS,
    catalog_entry,
    catalog_names,
    enumerate_group,
    fixed_subspace,
    symmetric_lattice_dim,
    trivial_motion_dim_finite,
)
from .tracer import RigidFrameworkError, export, trace

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_MISMATCH = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _emit(obj, as_json: bool, text: str | None = None) -> None:
    if as_json:
        print(json.dumps(obj, indent=2, sort_keys=True))
    else:
        print(text if text is not None else "\n".join(f"{k}: {v}" for k, v in obj.items()))


def _parse_cells(s: str | None):
    if s is None:
        return None
    try:
        lo, hi = (int(x) for x in s.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"cells must be 'lo,hi', got {s!r}")
    return (lo, hi)


def _load(path: str):
    fw = load(path)
    validate(fw)
    return fw


# ---------------------------------------------------------------------------

def cmd_validate(args) -> int:
    fw = _load(args.input)
    info = {"file": args.input, "valid": True, "kind": fw.kind, "dimension": fw.dimension,
            "group": fw.group.schoenflies, "v0": fw.graph.vertex_count, "e0": fw.graph.edge_count}
    _emit(info, args.json)
    return EXIT_OK


def _count_summary(fw, variant: str | None) -> dict:
    d, v0, e0 = fw.dimension, fw.graph.vertex_count, fw.graph.edge_count
    if fw.kind == "finite":
        e0_min = d * v0 - d * (d + 1) // 2
        return {"e0_min": e0_min, "f_computed": e0_min - e0}
    if fw.kind == "finite-symmetric":
        _, offset, _ = finite_symmetric_minimal(fw.group)
        return {"e0_min": d * v0 + offset,
                "f_computed": d * v0 - trivial_motion_dim_finite(fw.group) - e0}
    pred = maxwell_combined(fw.group, variant=variant or fw.variant, v0=v0, e0=e0, family=fw.family)
    return {"e0_min": pred.e0_min, "f_computed": pred.f_computed}


def cmd_analyze(args) -> int:
    fw = _load(args.input)
    variant = args.variant
    if variant is not None and fw.family is None:
        raise FrameworkError("--variant needs a periodic framework")
    ms = motion_space(fw, variant)
    report = {
        "file": args.input,
        "kind": fw.kind,
        "group": fw.group.schoenflies,
        "variant": (variant or fw.variant) if fw.family is not None else None,
        "v0": fw.graph.vertex_count,
        "e0": fw.graph.edge_count,
        "columns": ms.columns,
        "rank": ms.rank,
        "nullity": ms.nullity,
        "t_S": len(fixed_subspace(fw.group)) if fw.family is not None else 0,
        "trivial_dim": len(ms.trivial_basis),
        "flex_dim": ms.flex_dimension,
        "stress_dim": ms.stress_dimension,
        "counts": _count_summary(fw, variant),
        "arithmetic": "exact",
    }
    if args.float:
        seeds = [args.seed] if args.seed is not None else None
        r = rank_float(ms.matrix.entries, args.tol) if seeds is None else \
            rank_float(lambda _s: ms.matrix.entries, args.tol, seeds)
        report.update(arithmetic="float", tol=args.tol, float_rank=r,
                      float_flex_dim=ms.columns - r - len(ms.trivial_basis))
    if args.emit_matrix:
        tsv = ms.matrix.to_tsv(as_float=args.float)
        if args.emit_matrix == "-":
            sys.stdout.write(tsv)
            return EXIT_OK
        Path(args.emit_matrix).write_text(tsv)
        report["matrix_file"] = args.emit_matrix
    _emit(report, args.json or not args.text)
    return EXIT_OK


def cmd_counts(args) -> int:
    group = enumerate_group(args.group, args.dim)
    if args.finite:
        triv, offset, f = finite_symmetric_minimal(group)
        out = {"group": group.schoenflies, "dimension": args.dim, "k": group.order, "triv": triv,
               "e0_min": f"{args.dim}v0{offset:+d}" if offset else f"{args.dim}v0", "f": f}
        _emit(out, args.json)
        return EXIT_OK
    if args.fixed_joint or args.fixed_bar or args.e_offset is not None:
        pred = adjusted_counts(group, variant=args.variant, v0=args.v0 or 1,
                               fixed_bar_orbits=[s.split(",") for s in args.fixed_bar],
                               fixed_joint_specs=[s.split(",") for s in args.fixed_joint],
                               e_offset=args.e_offset)
    else:
        pred = maxwell_combined(group, variant=args.variant, v0=args.v0, e0=args.e0)
    out = pred.as_dict()
    out["f"] = pred.f_computed
    if pred.v0 is not None:
        out["v0"], out["e0"] = pred.v0, pred.e0
    if pred.published_sources:
        out["published"] = pred.published_sources
    text = (f"{group.schoenflies} d={args.dim} {args.variant}: k={pred.k} t={pred.t} ell={pred.ell} "
            f"e0_min={pred.e0_expression()} f={pred.f_computed}")
    if pred.discrepancy_flag:
        text += f"  [published {pred.published_sources} differs]"
    if pred.stress_lower_bound:
        text += f"  stresses>={pred.stress_lower_bound}"
    _emit(out, args.json, text)
    return EXIT_OK


def cmd_tables(args) -> int:
    ids = list(tables_mod.TABLE_IDS) if args.all else [args.id]
    if not args.all and args.id is None:
        raise _UsageError("tables needs --id or --all")
    status = EXIT_OK
    payload = []
    for tid in ids:
        if tid not in tables_mod.TABLE_IDS:
            raise _UsageError(f"unknown table {tid!r}; known: {', '.join(tables_mod.TABLE_IDS)}")
        text, ok = tables_mod.diff_report(tid)
        if args.diff and not ok:
            status = EXIT_MISMATCH
        if args.json:
            payload.append({"id": tid, "as_documented": ok, "rows": [
                {"key": r.key, "computed": r.computed, "published": r.published,
                 "discrepancy": r.discrepancy} for r in tables_mod.reproduce_table(tid)]})
        else:
            sys.stdout.write(text)
    if args.json:
        print(json.dumps(payload, indent=2))
    return status


def cmd_trace(args) -> int:
    fw = _load(args.input)
    try:
        path = trace(fw, args.steps, args.step_size, args.tol, args.direction)
    except RigidFrameworkError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_INVALID
    out = Path(args.out)
    fmt = "svg" if out.suffix.lower() == ".svg" else "csv"
    out.write_bytes(export(path, fw, fmt, _parse_cells(args.cells)))
    info = {"steps": len(path.steps) - 1, "termination": path.termination, "message": path.message,
            "max_drift": path.max_drift, "displacement": path.displacement(), "out": str(out)}
    _emit(info, args.json)
    return EXIT_OK


def cmd_expand(args) -> int:
    fw = _load(args.input)
    patch = expand_patch(fw, _parse_cells(args.cells), include_point_group=not args.translations_only)
    info = {"joints": len(patch.joints), "bars": len(patch.bars),
            "interior_bars": len(patch.interior_bars()), "cells": [list(c) for c in patch.cells]}
    if args.json:
        info["joint_coords"] = [[str(x) for x in j.coords] for j in patch.joints]
        info["bar_ends"] = [list(b.ends) for b in patch.bars]
    _emit(info, args.json)
    return EXIT_OK


def cmd_groups(args) -> int:
    rows = []
    for d in ([args.dim] if args.dim else [2, 3]):
        for name in catalog_names(d):
            g = enumerate_group(name, d)
            _, hm, orb, family = catalog_entry(name, d)
            rows.append({"schoenflies": name, "dimension": d, "hermann_mauguin": hm, "orbifold": orb,
                         "k": g.order, "t": len(fixed_subspace(g)), "crystal_system": family,
                         "ell_flexible": symmetric_lattice_dim(g, "flexible"),
                         "elements": [e.label for e in g.elements] if args.elements else None})
    if args.json:
        print(json.dumps(rows, indent=2))
    else:
        print("d\tschoenflies\tH-M\torbifold\tk\tt\tsystem\tell")
        for r in rows:
            print(f"{r['dimension']}\t{r['schoenflies']}\t{r['hermann_mauguin']}\t{r['orbifold']}\t"
                  f"{r['k']}\t{r['t']}\t{r['crystal_system']}\t{r['ell_flexible']}")
    return EXIT_OK


def cmd_demo(args) -> int:
    if args.all:
        entries = all_entries()
    elif args.id:
        try:
            entries = [demo_by_id(args.id)]
        except KeyError as exc:
            raise _UsageError(str(exc.args[0]))
    else:
        raise _UsageError("demo needs an id or --all")
    results = []
    for e in entries:
        fails = check_entry(e, args.seed)
        fw = e.load()
        ms = motion_space(fw)
        res = {"id": e.id, "pass": not fails, "failures": fails, "rank": ms.rank,
               "flex_dim": ms.flex_dimension, "stress_dim": ms.stress_dimension}
        for variant in e.variants:
            res[f"rank_{variant}"] = motion_space(fw, variant).rank
        results.append(res)
    seed_note = "frozen positions" if args.seed is None else f"seed {args.seed}"
    if args.json:
        print(json.dumps({"seed": args.seed, "results": results}, indent=2))
    else:
        print(f"# demo corpus ({seed_note})")
        for r in results:
            extra = " ".join(f"{k}={v}" for k, v in r.items() if k.startswith("rank_"))
            line = (f"{'PASS' if r['pass'] else 'FAIL'} {r['id']}: rank={r['rank']} "
                    f"flex={r['flex_dim']} stress={r['stress_dim']}" + (f" {extra}" if extra else ""))
            print(line)
            for f in r["failures"]:
                print(f"    {f}")
        passed = sum(r["pass"] for r in results)
        print(f"{passed}/{len(results)} passed")
    return EXIT_OK if all(r["pass"] for r in results) else EXIT_MISMATCH


class _UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="orbitrig", description="Symmetric and periodic orbit rigidity toolkit.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("validate", help="parse and validate a framework file")
    s.add_argument("input")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("analyze", help="rank, kernel and counts of a framework")
    s.add_argument("input")
    s.add_argument("--variant", choices=VARIANTS)
    s.add_argument("--emit-matrix", metavar="PATH", help="write the matrix as TSV ('-' for stdout)")
    mode = s.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", help="exact rational arithmetic (default)")
    mode.add_argument("--float", action="store_true", help="also report the floating rank")
    s.add_argument("--tol", type=float, default=DEFAULT_TOL)
    s.add_argument("--seed", type=int)
    s.add_argument("--json", action="store_true", help="JSON report (default)")
    s.add_argument("--text", action="store_true", help="key: value report")
    s.set_defaults(func=cmd_analyze)

    s = sub.add_parser("counts", help="Maxwell-type counts for a group")
    s.add_argument("--group", required=True)
    s.add_argument("--dim", type=int, required=True)
    s.add_argument("--variant", choices=VARIANTS, default="flexible")
    s.add_argument("--v0", type=int)
    s.add_argument("--e0", type=int)
    s.add_argument("--finite", action="store_true", help="finite symmetric count")
    s.add_argument("--fixed-joint", action="append", default=[], metavar="LABELS",
                   help="stabilizer labels of a fixed joint orbit, comma separated (repeatable)")
    s.add_argument("--fixed-bar", action="append", default=[], metavar="LABELS")
    s.add_argument("--e-offset", type=int, help="target e = d v + OFFSET for adjusted counts")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_counts)

    s = sub.add_parser("tables", help="reproduce the prediction tables")
    s.add_argument("--id", choices=tables_mod.TABLE_IDS)
    s.add_argument("--all", action="store_true")
    s.add_argument("--diff", action="store_true", help="exit 3 unless discrepancies are as documented")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_tables)

    s = sub.add_parser("trace", help="follow a finite mechanism numerically")
    s.add_argument("--input", required=True)
    s.add_argument("--steps", type=int, default=100)
    s.add_argument("--step-size", type=float, default=1e-2)
    s.add_argument("--tol", type=float, default=1e-12)
    s.add_argument("--direction", type=int, default=0)
    s.add_argument("--out", required=True)
    s.add_argument("--cells", help="cell range 'lo,hi' for SVG output")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_trace)

    s = sub.add_parser("expand", help="place orbit copies over a block of cells")
    s.add_argument("--input", required=True)
    s.add_argument("--cells", default="0,0")
    s.add_argument("--translations-only", action="store_true")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_expand)

    s = sub.add_parser("groups", help="list catalog point groups")
    s.add_argument("--list", action="store_true")
    s.add_argument("--dim", type=int, choices=[2, 3])
    s.add_argument("--elements", action="store_true")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_groups)

    s = sub.add_parser("demo", help="run the demo corpus against its expectations")
    s.add_argument("id", nargs="?")
    s.add_argument("--all", action="store_true")
    s.add_argument("--seed", type=int, help="re-place positions generically with this seed")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_demo)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if not getattr(args, "func", None):
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"orbitrig: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FrameworkError, SymmetryError, InstabilityError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"orbitrig: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
