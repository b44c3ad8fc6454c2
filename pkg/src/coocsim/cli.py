"""Command-line driver: run simulations, generate matrices, analyze reports.

Subcommands:

* ``run``        parse configs, simulate, write per-tick reports and metadata
* ``gen-matrix`` turn an edge list into rules and matrix files
* ``analyze``    list populations standing out of a report CSV

All outputs are reproducible: the seed defaults to a fixed constant and no
wall-clock information is recorded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .dynamics import ConfigurationFault, run
from .io import (
    ParseError,
    build_relation_model,
    format_matrix,
    format_rules,
    parse_edge_list,
    parse_matrix,
    parse_rules,
    read_report_csv,
    render_snapshot,
    write_report_csv,
)
from .metrics import crowding_indices, neighborhood_counts, significant_from_counts
from .model import DEFAULT_SEED, build_model, validate


class CliError(Exception):
    """User-facing failure; the message is printed and the exit code is 1."""


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _parse_ticks(raw: str, steps: int) -> list[int]:
    try:
        ticks = sorted({int(tok) for tok in raw.split(",") if tok.strip()})
    except ValueError:
        raise CliError(f"invalid report ticks {raw!r}") from None
    bad = [t for t in ticks if t < 0 or t > steps]
    if bad:
        raise CliError(f"report ticks {bad} outside [0, {steps}]")
    return ticks


def _read_sizes(path: str) -> dict[str, int]:
    sizes: dict[str, int] = {}
    for line_no, line in enumerate(_read_text(path).splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        tokens = stripped.split()
        if len(tokens) != 2:
            raise CliError(f"{path}:{line_no}: expected 'name size'")
        try:
            sizes[tokens[0]] = int(tokens[1])
        except ValueError:
            raise CliError(f"{path}:{line_no}: size must be an integer") from None
    return sizes


def _cmd_run(args: argparse.Namespace) -> int:
    try:
        rules = parse_rules(_read_text(args.rules))
    except ParseError as exc:
        raise CliError(f"{args.rules}: {exc}") from exc
    try:
        matrix = parse_matrix(_read_text(args.matrix))
    except ParseError as exc:
        raise CliError(f"{args.matrix}: {exc}") from exc

    sizes: int | dict[str, int] = args.size
    if args.sizes:
        overrides = _read_sizes(args.sizes)
        names = {e.source_family for e in matrix} | {
            e.target_family for e in matrix if e.target_family
        }
        sizes = {name: overrides.get(name, args.size) for name in names}

    model = build_model(
        rules, matrix, side=args.side, sizes=sizes,
        beta=args.beta, seed=args.seed, max_ticks=args.steps,
    )
    diagnostics = validate(model)
    for diag in diagnostics:
        if not diag.is_error:
            print(diag, file=sys.stderr)
    errors = [d for d in diagnostics if d.is_error]
    if errors:
        for diag in errors:
            print(diag, file=sys.stderr)
        return 1
    if args.target not in model.population_names:
        raise CliError(f"target population {args.target!r} not present in the matrix")

    ticks = _parse_ticks(args.report_ticks, args.steps)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    def write_outputs(state, _model):
        report = neighborhood_counts(state, args.target, args.distance)
        with open(out / f"report_t{state.tick}.csv", "wb") as sink:
            write_report_csv(report, sink)
        if args.snapshots:
            with open(out / f"snapshot_t{state.tick}.ppm", "wb") as sink:
                render_snapshot(state, sink)
        return state.tick

    try:
        run(model, report_ticks=ticks, observers=[write_outputs], workers=args.workers)
    except ConfigurationFault as exc:
        raise CliError(str(exc)) from exc

    crowding = crowding_indices(model.lattice, sum(p.size for p in model.populations))
    meta = {
        "version": __version__,
        "rules_path": args.rules,
        "matrix_path": args.matrix,
        "lattice_side": args.side,
        "sizes": model.population_sizes(),
        "steps": args.steps,
        "seed": args.seed,
        "beta": args.beta,
        "report_ticks": ticks,
        "target": args.target,
        "distance": args.distance,
        "snapshots": bool(args.snapshots),
        "crowding": {
            "patch_count": crowding.patch_count,
            "critical_count": crowding.critical_count,
            "critical_density": crowding.critical_density,
        },
    }
    (out / "run_meta.json").write_bytes(
        (json.dumps(meta, sort_keys=True, indent=2) + "\n").encode("utf-8")
    )
    return 0


def _cmd_gen_matrix(args: argparse.Namespace) -> int:
    try:
        edges = parse_edge_list(_read_text(args.edges))
    except ParseError as exc:
        raise CliError(f"{args.edges}: {exc}") from exc
    try:
        relation = build_relation_model(
            edges, args.target, kind=args.kind,
            distance=args.distance, symmetric=args.symmetric,
        )
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    Path(args.rules_out).write_text(format_rules(relation.rules), encoding="utf-8")
    Path(args.matrix_out).write_text(format_matrix(relation.matrix), encoding="utf-8")
    print(f"populations: {len(relation.populations)}")
    print(f"relations: {relation.relation_count}")
    return 0


def _cmd_analyze(args: argparse.Namespace) -> int:
    try:
        counts, average = read_report_csv(_read_text(args.report))
    except ParseError as exc:
        raise CliError(f"{args.report}: {exc}") from exc
    for name in significant_from_counts(counts, average, args.factor):
        print(f"{name} {counts[name]}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coocsim",
        description="Aggregation simulator for co-occurrence networks on a toroidal lattice",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate a model and write reports")
    p_run.add_argument("--rules", required=True, help="interaction rules file")
    p_run.add_argument("--matrix", required=True, help="interaction matrix file")
    p_run.add_argument("--side", type=int, default=31, help="patches per lattice side")
    p_run.add_argument("--size", type=int, default=100, help="uniform population size")
    p_run.add_argument("--sizes", help="optional per-population size file (name size lines)")
    p_run.add_argument("--steps", type=int, default=1000, help="ticks to simulate")
    p_run.add_argument("--seed", type=int, default=DEFAULT_SEED, help="root seed")
    p_run.add_argument("--beta", type=float, default=1.0, help="field bias strength")
    p_run.add_argument("--report-ticks", default=None,
                       help="comma-separated ticks to report at (default: final tick)")
    p_run.add_argument("--target", required=True, help="population the reports centre on")
    p_run.add_argument("--distance", type=float, default=2.0, help="neighbourhood distance")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--snapshots", action="store_true", help="also write P6 snapshots")
    p_run.add_argument("--workers", type=int, default=1, help="threads for the move kernel")
    p_run.set_defaults(func=_cmd_run)

    p_gen = sub.add_parser("gen-matrix", help="generate rules and matrix from an edge list")
    p_gen.add_argument("edges", help="edge list file, one 'name name' pair per line")
    p_gen.add_argument("--target", required=True, help="population at the centre of the context")
    p_gen.add_argument("--kind", choices=("restricted", "extended"), default="restricted")
    p_gen.add_argument("--distance", type=float, default=2.0, help="interaction distance")
    p_gen.add_argument("--symmetric", action="store_true", help="emit both directions per edge")
    p_gen.add_argument("--rules-out", required=True)
    p_gen.add_argument("--matrix-out", required=True)
    p_gen.set_defaults(func=_cmd_gen_matrix)

    p_an = sub.add_parser("analyze", help="list populations standing out of a report")
    p_an.add_argument("report", help="report CSV produced by 'run'")
    p_an.add_argument("--factor", type=float, default=2.0,
                      help="significance threshold relative to the average")
    p_an.set_defaults(func=_cmd_analyze)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "report_ticks", "") is None:
        args.report_ticks = str(args.steps)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
