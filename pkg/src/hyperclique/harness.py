"""Monte Carlo calibration, risk estimation and phase-diagram sweeps.

All randomness comes from streams keyed by ``(master_seed, role, trial)``.
Calibration, null-risk and planted-risk trials use disjoint roles, so results
are identical for any worker count.
"""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Protocol, Sequence

import numpy as np
from scipy.stats import binomtest

from . import detectors as det
from .combinatorics import stream_for
from .model import DUniformHypergraph, plant_clique, sample_null

DETECTORS = ("edgecount", "spectral", "exhaustive", "metropolis", "slicevote")
CSV_HEADER = (
    "detector,N,d,kappa,gamma,type_I,type_II,risk,ci_I,ci_II,threshold,runtime_s,status"
)
SOLVED_RISK = 0.10


class Detector(Protocol):
    name: str

    def statistic(self, graph: DUniformHypergraph, stream: np.random.Generator) -> float: ...


@dataclass(frozen=True)
class DetectorConfig:
    """A named detector and its settings.

    Settings that do not apply to ``name`` are ignored.  ``steps`` and
    ``num_slices`` default to values derived from the instance size.
    """

    name: str
    tol: float = 1e-4
    max_iter: int = 300
    balanced: bool = False
    epsilon: float = 1.0
    lam: float = 2.0
    steps: int | None = None
    num_slices: int | None = None

    def __post_init__(self) -> None:
        if self.name not in DETECTORS:
            raise ValueError(f"unknown detector {self.name!r}; choose from {', '.join(DETECTORS)}")

    def statistic(self, graph: DUniformHypergraph, stream: np.random.Generator) -> float:
        if self.name == "edgecount":
            return det.edge_count_statistic(graph)
        if self.name == "spectral":
            return det.spectral_statistic(graph, stream, self.tol, self.max_iter, self.balanced)
        if self.name == "exhaustive":
            return det.exhaustive_statistic(graph, self.epsilon)
        if self.name == "metropolis":
            return float(det.metropolis_search(graph, self.lam, self.steps, stream).size)
        return det.slice_vote_statistic(graph, stream, self.num_slices)

    def settings(self) -> dict:
        keys = {
            "edgecount": (),
            "spectral": ("tol", "max_iter", "balanced"),
            "exhaustive": ("epsilon",),
            "metropolis": ("lam", "steps"),
            "slicevote": ("num_slices",),
        }[self.name]
        return {k: getattr(self, k) for k in keys}


@dataclass(frozen=True)
class CalibrationTable:
    detector: str
    n: int
    d: int
    level: float
    trials: int
    threshold: float
    null_stats: np.ndarray = field(repr=False, compare=False)
    settings: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class RiskEstimate:
    type_I: float
    type_II: float
    trials: int
    ci_I: float
    ci_II: float

    @property
    def risk(self) -> float:
        return self.type_I + self.type_II


def order_statistic_index(level: float, trials: int) -> int:
    """1-based index ``ceil((1 - level) * trials)`` of the calibrated threshold."""
    return max(1, math.ceil((1 - level) * trials - 1e-9))


def min_calibration_trials(level: float) -> int:
    return math.ceil(10 / level - 1e-9)


def wilson_half_width(errors: int, trials: int) -> float:
    """Largest distance from the observed rate to a Wilson 95% bound."""
    if trials == 0:
        return math.nan
    ci = binomtest(errors, trials).proportion_ci(0.95, method="wilson")
    rate = errors / trials
    return max(ci.high - rate, rate - ci.low)


# -- trial workers (module level so they pickle) -------------------------------

def _null_trial(args) -> float:
    detector, n, d, seed, role, t = args
    g = sample_null(n, d, stream_for(seed, f"{role}/null-gen", t))
    return float(detector.statistic(g, stream_for(seed, f"{role}/detector", t)))


def _planted_trial(args) -> float:
    detector, n, d, kappa, seed, t = args
    base = sample_null(n, d, stream_for(seed, "h1/null-gen", t))
    inst = plant_clique(base, kappa, stream_for(seed, "h1/plant", t))
    return float(detector.statistic(inst.graph, stream_for(seed, "h1/detector", t)))


def _run(fn: Callable, jobs: Sequence, workers: int, pool: ProcessPoolExecutor | None) -> list:
    if pool is not None:
        return list(pool.map(fn, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(fn, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    return [fn(job) for job in jobs]


def _label_errors(exc: Exception, context: str) -> Exception:
    exc.args = (f"{context}: {exc}",) + exc.args[1:]
    return exc


def null_statistics(
    detector: Detector, n: int, d: int, trials: int, master_seed: int,
    role: str = "calibrate", workers: int = 1, pool: ProcessPoolExecutor | None = None,
) -> np.ndarray:
    jobs = [(detector, n, d, master_seed, role, t) for t in range(trials)]
    try:
        return np.array(_run(_null_trial, jobs, workers, pool), dtype=float)
    except Exception as exc:
        raise _label_errors(exc, f"{role} trials under H0") from exc


def calibrate_threshold(
    detector: Detector,
    n: int,
    d: int,
    level: float = 0.05,
    trials: int = 200,
    master_seed: int = 0,
    workers: int = 1,
    pool: ProcessPoolExecutor | None = None,
) -> CalibrationTable:
    """Threshold at the ``ceil((1 - level) * trials)``-th null order statistic."""
    if not 0 < level < 1:
        raise ValueError(f"level must be in (0, 1), got {level}")
    if trials < min_calibration_trials(level):
        raise ValueError(
            f"{trials} trials cannot resolve level {level}; need >= {min_calibration_trials(level)}"
        )
    stats = np.sort(null_statistics(detector, n, d, trials, master_seed, "calibrate", workers, pool))
    threshold = float(stats[order_statistic_index(level, trials) - 1])
    settings = detector.settings() if hasattr(detector, "settings") else {}
    return CalibrationTable(detector.name, n, d, level, trials, threshold, stats, settings)


def estimate_risk(
    detector: Detector,
    threshold: float,
    n: int,
    d: int,
    kappa: int,
    trials: int = 100,
    master_seed: int = 0,
    workers: int = 1,
    pool: ProcessPoolExecutor | None = None,
) -> RiskEstimate:
    """Empirical type-I and type-II errors over fresh null and planted trials."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not 0 <= kappa <= n:
        raise ValueError(f"kappa must be in [0, {n}], got {kappa}")
    h0 = null_statistics(detector, n, d, trials, master_seed, "h0", workers, pool)
    jobs = [(detector, n, d, kappa, master_seed, t) for t in range(trials)]
    try:
        h1 = np.array(_run(_planted_trial, jobs, workers, pool), dtype=float)
    except Exception as exc:
        raise _label_errors(exc, "h1 trials") from exc
    false_alarms = int(np.count_nonzero(h0 > threshold))
    misses = int(np.count_nonzero(~(h1 > threshold)))
    return RiskEstimate(
        false_alarms / trials,
        misses / trials,
        trials,
        wilson_half_width(false_alarms, trials),
        wilson_half_width(misses, trials),
    )


# -- phase grid ----------------------------------------------------------------

@dataclass(frozen=True)
class PhaseGridSpec:
    """Sweep over ``(detector, N, kappa)``.

    ``kappas`` maps each N to explicit clique sizes; otherwise ``gammas``
    gives ``kappa = floor(N ** (gamma / 2))``, i.e. ``gamma = log kappa / log sqrt(N)``.
    """

    d: int
    n_list: tuple[int, ...]
    detectors: tuple[DetectorConfig, ...]
    kappas: dict[int, tuple[int, ...]] | None = None
    gammas: tuple[float, ...] | None = None
    level: float = 0.05
    trials: int = 100
    calibration_trials: int = 200
    master_seed: int = 0

    def __post_init__(self) -> None:
        if (self.kappas is None) == (self.gammas is None):
            raise ValueError("give exactly one of kappas or gammas")
        if self.gammas is not None and any(g <= 0 for g in self.gammas):
            raise ValueError("gamma values must be positive")
        for n in self.n_list:
            if any(not 0 <= k <= n for k in self.kappa_list(n)):
                raise ValueError(f"kappa values for N={n} must lie in [0, {n}]")

    def kappa_list(self, n: int) -> tuple[int, ...]:
        if self.kappas is not None:
            if n not in self.kappas:
                raise ValueError(f"no kappa list for N={n}")
            return tuple(self.kappas[n])
        return tuple(sorted({math.floor(n ** (g / 2) + 1e-9) for g in self.gammas}))


@dataclass
class PhaseRow:
    detector: str
    n: int
    d: int
    kappa: int
    gamma: float
    type_I: float = math.nan
    type_II: float = math.nan
    ci_I: float = math.nan
    ci_II: float = math.nan
    threshold: float = math.nan
    runtime: float = 0.0
    status: str = "ok"

    @property
    def risk(self) -> float:
        return self.type_I + self.type_II

    @property
    def solved(self) -> bool:
        return self.status == "ok" and self.risk <= SOLVED_RISK


def gamma_of(n: int, kappa: int) -> float:
    """Position ``log kappa / log sqrt(N)`` on the threshold axis."""
    if kappa == 0:
        return -math.inf
    if n == 1:
        return math.nan
    return math.log(kappa) / math.log(math.sqrt(n))


def phase_grid(spec: PhaseGridSpec, workers: int = 1, timing: bool = True) -> list[PhaseRow]:
    """Calibrate and estimate risk in every cell; failed cells are kept with an error status."""
    rows = []
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for config in sorted(spec.detectors, key=lambda c: c.name):
            for n in sorted(spec.n_list):
                calib: CalibrationTable | Exception | None = None
                for kappa in sorted(spec.kappa_list(n)):
                    row = PhaseRow(config.name, n, spec.d, kappa, gamma_of(n, kappa))
                    t0 = time.perf_counter()
                    try:
                        if calib is None:
                            try:
                                calib = calibrate_threshold(
                                    config, n, spec.d, spec.level, spec.calibration_trials,
                                    spec.master_seed, workers, pool,
                                )
                            except Exception as exc:  # noqa: BLE001 - reported in-row
                                calib = exc
                        if isinstance(calib, Exception):
                            raise calib
                        est = estimate_risk(
                            config, calib.threshold, n, spec.d, kappa, spec.trials,
                            spec.master_seed, workers, pool,
                        )
                        row.threshold = calib.threshold
                        row.type_I, row.type_II = est.type_I, est.type_II
                        row.ci_I, row.ci_II = est.ci_I, est.ci_II
                    except Exception as exc:  # noqa: BLE001 - reported in-row
                        row.status = f"error:{type(exc).__name__}"
                    row.runtime = time.perf_counter() - t0 if timing else 0.0
                    rows.append(row)
    finally:
        if pool is not None:
            pool.shutdown()
    return rows


def _fmt(x: float) -> str:
    return format(x, ".6g")


def rows_to_csv(rows: Iterable[PhaseRow]) -> str:
    out = io.StringIO()
    out.write(CSV_HEADER + "\n")
    for r in rows:
        fields = [
            r.detector, str(r.n), str(r.d), str(r.kappa), _fmt(r.gamma),
            _fmt(r.type_I), _fmt(r.type_II), _fmt(r.risk), _fmt(r.ci_I), _fmt(r.ci_II),
            _fmt(r.threshold), _fmt(r.runtime), r.status,
        ]
        out.write(",".join(fields) + "\n")
    return out.getvalue()


def read_csv_rows(text: str) -> list[dict]:
    return list(csv.DictReader(io.StringIO(text)))


def _risk_colour(risk: float) -> str:
    if math.isnan(risk):
        return "#bbbbbb"
    t = min(max(risk / 2, 0.0), 1.0)
    r = int(round(255 * t))
    g = int(round(255 * (1 - t)))
    return f"#{r:02x}{g:02x}60"


def rows_to_svg(rows: Sequence[PhaseRow], cell: int = 28) -> str:
    """One risk heatmap per detector: N down the side, gamma across."""
    parts = []
    y = 10
    width = 200
    for name in sorted({r.detector for r in rows}):
        sub = [r for r in rows if r.detector == name]
        ns = sorted({r.n for r in sub})
        gammas = sorted({round(r.gamma, 6) for r in sub if not math.isnan(r.gamma)})
        parts.append(f'<text x="10" y="{y + 14}" font-size="14">{name}</text>')
        y += 24
        for i, n in enumerate(ns):
            parts.append(
                f'<text x="10" y="{y + i * cell + cell // 2 + 4}" font-size="11">N={n}</text>'
            )
        for j, gam in enumerate(gammas):
            parts.append(
                f'<text x="{70 + j * cell}" y="{y + len(ns) * cell + 12}" font-size="9">{gam:.2f}</text>'
            )
        for r in sub:
            if math.isnan(r.gamma):
                continue
            i = ns.index(r.n)
            j = gammas.index(round(r.gamma, 6))
            colour = _risk_colour(r.risk if r.status == "ok" else math.nan)
            parts.append(
                f'<rect x="{70 + j * cell}" y="{y + i * cell}" width="{cell - 2}" '
                f'height="{cell - 2}" fill="{colour}"><title>{name} N={r.n} kappa={r.kappa} '
                f'risk={_fmt(r.risk)}</title></rect>'
            )
        width = max(width, 80 + len(gammas) * cell)
        y += len(ns) * cell + 30
    body = "\n".join(parts)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{y}">\n{body}\n</svg>\n'
    )


# -- clique law ----------------------------------------------------------------

@dataclass
class CliqueLawRow:
    n: int
    mean_size: float
    law: float
    status: str = "ok"

    @property
    def ratio(self) -> float:
        return self.mean_size / self.law


def clique_law_value(n: int, d: int) -> float:
    """``(d! log2 N) ** (1/(d-1))``, the limiting largest-clique size of G_d(N, 1/2)."""
    return (math.factorial(d) * math.log2(n)) ** (1.0 / (d - 1))


def clique_law_experiment(
    d: int,
    n_list: Sequence[int],
    trials: int = 20,
    master_seed: int = 0,
    max_nodes: int | None = 5_000_000,
) -> list[CliqueLawRow]:
    rows = []
    for n in n_list:
        law = clique_law_value(n, d)
        sizes = []
        try:
            for t in range(trials):
                g = sample_null(n, d, stream_for(master_seed, "cliquelaw/null-gen", t))
                sizes.append(det.max_clique_exhaustive(g, max_nodes=max_nodes).size)
        except det.SearchBudgetExceeded:
            rows.append(CliqueLawRow(n, math.nan, law, "infeasible"))
            continue
        rows.append(CliqueLawRow(n, float(np.mean(sizes)), law))
    return rows
