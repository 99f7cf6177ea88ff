"""Command-line interface: ``hyperclique <subcommand> ...``.

Every run logs its fully resolved configuration to stderr.  Exit status is 0
on success, 1 on usage errors and 2 on runtime errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path
from typing import Sequence

from . import detectors as det
from . import harness
from .combinatorics import stream_for
from .formats import read_hypergraph, write_hypergraph, write_instance
from .model import H0, PlantedInstance, plant_clique, sample_null
from .tensor import take_slice

log = logging.getLogger("hyperclique")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with status 2
        raise UsageError(f"{self.prog}: {message}")


def generate(n: int, d: int, kappa: int | None, seed: int, trial: int = 0) -> PlantedInstance:
    """The instance ``gen`` writes for these arguments."""
    g = sample_null(n, d, stream_for(seed, "null-gen", trial))
    if kappa is None:
        return PlantedInstance(g, H0)
    return plant_clique(g, kappa, stream_for(seed, "plant", trial))


def _fmt(x: float) -> str:
    return format(x, ".6g")


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _detector_flags(p: argparse.ArgumentParser, threshold: bool = True) -> None:
    p.add_argument("--detector", required=True, choices=harness.DETECTORS)
    if threshold:
        p.add_argument("--threshold", type=float)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--maxiter", type=int, default=300)
    p.add_argument("--balanced", action="store_true", help="balanced unfolding for spectral")
    p.add_argument("--epsilon", type=float, default=1.0)
    p.add_argument("--lambda", dest="lam", type=float, default=2.0)
    p.add_argument("--steps", type=int)
    p.add_argument("--slices", type=int)
    p.add_argument("--level", type=float, default=0.05)


def _config(args) -> harness.DetectorConfig:
    return harness.DetectorConfig(
        args.detector, tol=args.tol, max_iter=args.maxiter, balanced=args.balanced,
        epsilon=args.epsilon, lam=args.lam, steps=args.steps, num_slices=args.slices,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hyperclique", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, seed=True, workers=False):
        if seed:
            p.add_argument("--seed", type=int, default=0)
        if workers:
            p.add_argument("--workers", type=int, default=1)
        p.add_argument("--no-timing", action="store_true")

    p = sub.add_parser("gen", help="sample an instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--kappa", type=int)
    p.add_argument("--out", required=True)
    common(p)

    p = sub.add_parser("detect", help="run one detector on a file")
    p.add_argument("--in", dest="input", required=True)
    _detector_flags(p)
    p.add_argument("--trials", type=int, help="calibration trials when no --threshold")
    common(p, workers=True)

    p = sub.add_parser("calibrate", help="null-quantile threshold")
    _detector_flags(p, threshold=False)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--out")
    common(p, workers=True)

    p = sub.add_parser("risk", help="calibrate then estimate type-I + type-II error")
    _detector_flags(p, threshold=False)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--kappa", type=int, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--calibration-trials", type=int, default=200)
    p.add_argument("--out")
    common(p, workers=True)

    p = sub.add_parser("phase", help="risk over an (N, kappa) grid")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.add_argument("--svg")
    common(p, seed=False, workers=True)

    p = sub.add_parser("maxclique", help="exact maximum clique")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--cap", type=int)
    common(p, seed=False)

    p = sub.add_parser("metropolis", help="Metropolis clique search")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=2.0)
    p.add_argument("--steps", type=int)
    common(p)

    p = sub.add_parser("reduce", help="slice a hypergraph down to a graph")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--fix", type=_int_list, required=True, help="1-based vertex ids")
    p.add_argument("--out", required=True)
    common(p, seed=False)

    p = sub.add_parser("cliquelaw", help="mean maximum clique against the limiting law")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--nlist", type=_int_list, required=True)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--out")
    common(p)
    return parser


# -- experiment files ----------------------------------------------------------

_SPEC_KEYS = {
    "d", "N_list", "kappa_list", "gamma_list", "detectors", "level", "trials",
    "calibration_trials", "master_seed", "tol", "max_iter", "balanced", "epsilon",
    "lambda", "steps", "slices",
}


def parse_experiment(text: str) -> harness.PhaseGridSpec:
    """Parse flat ``key=value`` lines into a :class:`PhaseGridSpec`.

    ``kappa_list`` is either ``k1,k2,...`` (every N) or ``N:k1,k2;N:k1,...``.
    """
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"experiment line {lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _SPEC_KEYS:
            raise UsageError(f"experiment line {lineno}: unknown key {key!r}")
        values[key] = value
    try:
        for key in ("d", "N_list", "detectors"):
            if key not in values:
                raise UsageError(f"experiment file is missing {key!r}")
        n_list = tuple(_int_list(values["N_list"]))
        kappas = None
        if "kappa_list" in values:
            spec = values["kappa_list"]
            if ":" in spec:
                kappas = {}
                for part in spec.split(";"):
                    n, ks = part.split(":")
                    kappas[int(n)] = tuple(_int_list(ks))
            else:
                ks = tuple(_int_list(spec))
                kappas = {n: ks for n in n_list}
        gammas = None
        if "gamma_list" in values:
            gammas = tuple(float(v) for v in values["gamma_list"].split(","))
        settings = dict(
            tol=float(values.get("tol", 1e-4)),
            max_iter=int(values.get("max_iter", 300)),
            balanced=values.get("balanced", "false").lower() in ("1", "true", "yes"),
            epsilon=float(values.get("epsilon", 1.0)),
            lam=float(values.get("lambda", 2.0)),
            steps=int(values["steps"]) if "steps" in values else None,
            num_slices=int(values["slices"]) if "slices" in values else None,
        )
        detectors = tuple(
            harness.DetectorConfig(name.strip(), **settings)
            for name in values["detectors"].split(",")
        )
        return harness.PhaseGridSpec(
            d=int(values["d"]),
            n_list=n_list,
            detectors=detectors,
            kappas=kappas,
            gammas=gammas,
            level=float(values.get("level", 0.05)),
            trials=int(values.get("trials", 100)),
            calibration_trials=int(values.get("calibration_trials", 200)),
            master_seed=int(values.get("master_seed", 0)),
        )
    except (ValueError, argparse.ArgumentTypeError) as exc:
        raise UsageError(f"experiment file: {exc}") from None


# -- subcommands ---------------------------------------------------------------

def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _cmd_gen(args) -> None:
    instance = generate(args.n, args.d, args.kappa, args.seed)
    write_instance(args.out, instance)


def _cmd_detect(args) -> None:
    g = read_hypergraph(args.input)
    config = _config(args)
    stream = stream_for(args.seed, "detector", 0)
    threshold = args.threshold
    if args.detector == "slicevote" and threshold is None:
        slices = args.slices or det.default_num_slices(g.n, g.d)
        trials = args.trials or max(2000, math.ceil(10 * slices / args.level))
        table = det.calibrate_slice_null(g.n - g.d + 2, trials, args.seed)
        result = det.slice_vote_test(g, table, stream, slices, args.level)
    else:
        if threshold is None:
            if args.detector == "exhaustive":
                threshold = det.exhaustive_k_star(g.n, g.d, args.epsilon) - 1
            else:
                calib = harness.calibrate_threshold(
                    config, g.n, g.d, args.level, args.trials or 200, args.seed, args.workers
                )
                threshold = calib.threshold
        stat = config.statistic(g, stream)
        result = det.TestResult(config.name, stat, threshold, int(stat > threshold))
    print(f"{result.detector} stat={_fmt(result.statistic)} thr={_fmt(result.threshold)} "
          f"decision={result.decision}")


def _cmd_calibrate(args) -> None:
    table = harness.calibrate_threshold(
        _config(args), args.n, args.d, args.level, args.trials, args.seed, args.workers
    )
    _emit(
        "detector,N,d,level,trials,threshold\n"
        f"{table.detector},{table.n},{table.d},{_fmt(table.level)},{table.trials},"
        f"{_fmt(table.threshold)}\n",
        args.out,
    )


def _cmd_risk(args) -> None:
    spec = harness.PhaseGridSpec(
        d=args.d, n_list=(args.n,), detectors=(_config(args),),
        kappas={args.n: (args.kappa,)}, level=args.level, trials=args.trials,
        calibration_trials=args.calibration_trials, master_seed=args.seed,
    )
    rows = harness.phase_grid(spec, workers=args.workers, timing=not args.no_timing)
    _emit(harness.rows_to_csv(rows), args.out)


def _cmd_phase(args) -> None:
    try:
        text = Path(args.config).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read experiment file: {exc}") from None
    spec = parse_experiment(text)
    log.info("experiment: %s", spec)
    rows = harness.phase_grid(spec, workers=args.workers, timing=not args.no_timing)
    _emit(harness.rows_to_csv(rows), args.out)
    if args.svg:
        Path(args.svg).write_text(harness.rows_to_svg(rows), encoding="utf-8")


def _cmd_maxclique(args) -> None:
    g = read_hypergraph(args.input)
    found = det.max_clique_exhaustive(g, size_cap=args.cap)
    ids = " ".join(str(v + 1) for v in found.best_clique)
    print(f"size={found.size} clique={ids} nodes={found.work}")


def _cmd_metropolis(args) -> None:
    g = read_hypergraph(args.input)
    found = det.metropolis_search(g, args.lam, args.steps, stream_for(args.seed, "detector", 0))
    ids = " ".join(str(v + 1) for v in found.best_clique)
    print(f"size={found.size} clique={ids} steps={found.work}")


def _cmd_reduce(args) -> None:
    g = read_hypergraph(args.input)
    fixed = [v - 1 for v in args.fix]
    if any(v < 0 for v in fixed):
        raise UsageError("--fix takes 1-based vertex ids")
    sl = take_slice(g, fixed)
    write_hypergraph(args.out, sl.graph)
    Path(args.out).with_suffix(".vmap").write_text(
        " ".join(str(v + 1) for v in sl.vertices) + "\n", encoding="ascii"
    )


def _cmd_cliquelaw(args) -> None:
    rows = harness.clique_law_experiment(args.d, args.nlist, args.trials, args.seed)
    lines = ["N,mean_size,law,ratio,status"]
    lines += [
        f"{r.n},{_fmt(r.mean_size)},{_fmt(r.law)},{_fmt(r.ratio)},{r.status}" for r in rows
    ]
    _emit("\n".join(lines) + "\n", args.out)


_COMMANDS = {
    "gen": _cmd_gen, "detect": _cmd_detect, "calibrate": _cmd_calibrate, "risk": _cmd_risk,
    "phase": _cmd_phase, "maxclique": _cmd_maxclique, "metropolis": _cmd_metropolis,
    "reduce": _cmd_reduce, "cliquelaw": _cmd_cliquelaw,
}


def run(argv: Sequence[str] | None = None) -> int:
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("hyperclique: %(message)s"))
    log.addHandler(handler)
    log.setLevel(logging.INFO)
    log.propagate = False
    try:
        args = build_parser().parse_args(argv)
        log.info("config: %s", json.dumps(vars(args), sort_keys=True, default=str))
        _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - reported via exit status
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    finally:
        log.removeHandler(handler)
    return 0


def main() -> None:
    sys.exit(run())
