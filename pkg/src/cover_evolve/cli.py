"""Command line entry point: ``cover-evolve {solve,bench,gen,oracle}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import bench
from .decoder import Variant
from .evolution import GaConfig, run
from .genome import Crossover
from .instance import InstanceFormatError, generate_random, load_instance, serialize_orlib

EXIT_OK, EXIT_USAGE, EXIT_IO = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would exit with status 2
        raise UsageError(f"{self.prog}: {message}")


def _fixed_weights(text: str) -> tuple[float, float, float, float]:
    parts = text.split(",")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError(f"expected 4 comma-separated weights, got {text!r}")
    out = []
    for tok in parts:
        try:
            out.append(float(tok))
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {tok!r}") from None
    return tuple(out)  # type: ignore[return-value]


def _variant(text: str) -> Variant:
    try:
        return Variant.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _crossover(text: str) -> Crossover:
    try:
        return Crossover.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_ga_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("-v", "--verbose", action="store_true", help="log one line per generation")
    d = GaConfig()
    g = p.add_argument_group("GA parameters")
    g.add_argument("--variant", type=_variant, default=d.variant,
                   help="decoder variant: basic, newcost, 4criteria, iga (default: iga)")
    g.add_argument("--population", type=int, default=d.population_size,
                   help=f"population size (default: {d.population_size})")
    g.add_argument("--elite-fraction", type=float, default=d.elite_fraction,
                   help=f"fraction kept unchanged each generation (default: {d.elite_fraction})")
    g.add_argument("--mutation-rate", type=float, default=d.mutation_rate,
                   help=f"swap / gene reset probability (default: {d.mutation_rate})")
    g.add_argument("--pux-bias", type=float, default=d.pux_bias,
                   help=f"PUX gene-keep probability (default: {d.pux_bias})")
    g.add_argument("--stall-limit", type=int, default=d.stall_limit,
                   help=f"stop after this many generations without improvement (default: {d.stall_limit})")
    g.add_argument("--max-generations", type=int, default=d.max_generations,
                   help=f"safety cap on generations (default: {d.max_generations})")
    g.add_argument("--weight-max", type=float, default=d.weight_range[1],
                   help=f"weights are drawn from [0, WEIGHT_MAX] (default: {d.weight_range[1]:g})")
    g.add_argument("--fixed-weights", type=_fixed_weights, default=None, metavar="W1,W2,W3,W4",
                   help="freeze all weight genes to these values")
    g.add_argument("--fixed-crossover", type=_crossover, default=None, metavar="{1point,pux,pmx}",
                   help="crossover operator (default: pux; iga self-selects unless set)")


def _config(args: argparse.Namespace, seed: int) -> GaConfig:
    try:
        return GaConfig(
            population_size=args.population,
            elite_fraction=args.elite_fraction,
            mutation_rate=args.mutation_rate,
            pux_bias=args.pux_bias,
            stall_limit=args.stall_limit,
            variant=args.variant,
            weight_range=(0.0, args.weight_max),
            fixed_weights=args.fixed_weights,
            fixed_crossover=args.fixed_crossover,
            seed=seed,
            max_generations=args.max_generations,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cover-evolve", description="Indirect GA for set covering problems.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="one seeded GA run; prints the result as JSON")
    p.add_argument("--instance", required=True, help="OR-Library SCP file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="also write the JSON here")
    _add_ga_flags(p)

    p = sub.add_parser("bench", help="repeat seeded runs and report deviation from the optimum")
    p.add_argument("--instance", required=True, nargs="+", help="one or more OR-Library SCP files")
    p.add_argument("--runs", type=int, default=10, help="runs per instance (default: 10)")
    p.add_argument("--seed", type=int, default=0, help="base seed; run k uses seed + k")
    p.add_argument("--optimum", type=int, default=None,
                   help="known optimum (single instance only; default: looked up from the bundled table)")
    p.add_argument("--out", help="JSON report file, or a directory when several instances are given")
    p.add_argument("--csv", help="append one summary row per instance to this CSV")
    p.add_argument("--workers", type=int, default=None,
                   help="parallel runs (default: $COVER_EVOLVE_THREADS or the core count)")
    _add_ga_flags(p)

    p = sub.add_parser("gen", help="write a random instance in OR-Library format")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--density", type=float, required=True)
    p.add_argument("--cost-min", type=int, default=1)
    p.add_argument("--cost-max", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output file (default: stdout)")

    p = sub.add_parser("oracle", help="exact optimum by enumeration (at most 22 columns)")
    p.add_argument("--instance", required=True)
    return parser


def _emit(data: dict, out: str | None) -> None:
    text = json.dumps(data, indent=2)
    print(text)
    if out:
        Path(out).write_text(text + "\n")


def _cmd_solve(args: argparse.Namespace) -> int:
    instance = load_instance(args.instance)
    config = _config(args, args.seed)
    result = run(instance, config)
    g = result.best_genome
    _emit(
        {
            "instance": bench.instance_id(args.instance),
            "variant": config.variant.label,
            "seed": config.seed,
            "best_cost": result.best_cost,
            "feasible": result.best_solution.feasible,
            "generations": result.generations_run,
            "evaluations": result.evaluations,
            "elapsed_ms": result.elapsed * 1000.0,
            "chosen_columns": [j + 1 for j in result.best_solution.chosen],
            "best_genome": {
                "perm": [i + 1 for i in g.perm],
                "weights": list(g.weights),
                "crossover": g.crossover.label,
            },
        },
        args.out,
    )
    return EXIT_OK


def _cmd_bench(args: argparse.Namespace) -> int:
    paths = args.instance
    if args.optimum is not None and len(paths) > 1:
        raise UsageError("--optimum needs a single --instance")
    if args.runs < 1:
        raise UsageError(f"--runs must be >= 1, got {args.runs}")
    config = _config(args, args.seed)
    out_dir = Path(args.out) if args.out and len(paths) > 1 else None
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
    reports = []
    for path in paths:
        instance = load_instance(path)
        key = bench.instance_id(path)
        optimum = args.optimum
        if optimum is None and key in bench.known_optima():
            optimum = bench.known_optima()[key]["optimum"]
        spec = bench.BenchSpec(path, optimum, args.runs, args.seed, replace(config, seed=args.seed))
        json_path = out_dir / f"{key}-{config.variant.label}.json" if out_dir else args.out
        report = bench.run_bench(spec, json_path, args.csv, args.workers, instance=instance)
        reports.append(report)
    if len(reports) == 1:
        print(json.dumps(reports[0].to_json(), indent=2))
    else:
        print(bench.format_summary(bench.summarize(reports)))
    return EXIT_OK


def _cmd_gen(args: argparse.Namespace) -> int:
    try:
        inst = generate_random(args.rows, args.cols, args.density, (args.cost_min, args.cost_max), args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    text = serialize_orlib(inst)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_oracle(args: argparse.Namespace) -> int:
    instance = load_instance(args.instance)
    try:
        cost, chosen = bench.brute_force_optimum(instance)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit({"instance": bench.instance_id(args.instance), "cost": cost,
           "chosen_columns": [j + 1 for j in chosen]}, None)
    return EXIT_OK


COMMANDS = {"solve": _cmd_solve, "bench": _cmd_bench, "gen": _cmd_gen, "oracle": _cmd_oracle}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"cover-evolve: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InstanceFormatError as exc:
        print(f"cover-evolve: malformed instance: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"cover-evolve: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
