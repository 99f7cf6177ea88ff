"""Exit criteria, one test each, at the stated tolerances and time budgets.

Every run uses master seed 0.  A one-line PASS/FAIL verdict per criterion is
printed in the pytest terminal summary.
"""

import itertools
import math
import time

import numpy as np

from conftest import ACCEPTANCE_LINES
from hyperclique import detectors as det
from hyperclique.cli import run
from hyperclique.combinatorics import comb_rank, stream_for
from hyperclique.harness import DetectorConfig, calibrate_threshold, estimate_risk, null_statistics
from hyperclique.model import DUniformHypergraph, is_clique, plant_clique, sample_null
from hyperclique.tensor import AdjacencyTensorView, UnfoldingView, take_slice, top_singular_value, unfold_matvec

SEED = 0


def verdict(number, title, ok, detail):
    ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'} {number:>2} {title}: {detail}")
    assert ok, f"criterion {number} ({title}) failed: {detail}"


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def test_01_generator_fidelity():
    with Timer() as t:
        total = sum(sample_null(10, 3, stream_for(SEED, "null-gen", i)).num_edges for i in range(2000))
    freq = total / (math.comb(10, 3) * 2000)
    verdict(1, "generator fidelity", 0.495 <= freq <= 0.505 and t.elapsed < 5,
            f"pooled edge frequency {freq:.5f} in [0.495, 0.505], {t.elapsed:.2f}s < 5s")


def test_02_planting_correctness():
    bad = 0
    with Timer() as t:
        for i in range(100):
            g = sample_null(30, 3, stream_for(SEED, "null-gen", i))
            inst = plant_clique(g, 10, stream_for(SEED, "plant", i))
            inside = np.zeros(g.num_slots, dtype=bool)
            for e in itertools.combinations(inst.clique, 3):
                inside[comb_rank(e)] = True
            ok = inst.graph.mask[inside].all() and np.array_equal(inst.graph.mask[~inside], g.mask[~inside])
            bad += not ok
    verdict(2, "planting correctness", bad == 0 and t.elapsed < 5,
            f"{100 - bad}/100 instances exact, {t.elapsed:.2f}s < 5s")


def _dense_unfolding(g):
    n, d = g.n, g.d
    edges = set(g.edges())
    m = np.zeros((n, n ** (d - 1)))
    for idx in itertools.product(range(n), repeat=d):
        if len(set(idx)) == d:
            m[idx[0], sum(i * n**j for j, i in enumerate(idx[1:]))] = 1.0 if tuple(sorted(idx)) in edges else -1.0
    return m


def _brute_max_clique(g):
    non_edges = [sum(1 << v for v in e) for e in itertools.combinations(range(g.n), g.d) if not g.mask[comb_rank(e)]]
    best = 0
    for s in range(1 << g.n):
        size = bin(s).count("1")
        if size > best and all(ne & s != ne for ne in non_edges):
            best = size
    return best


def test_03_oracle_equivalence():
    rng = np.random.default_rng(SEED)
    matvec_bad = sigma_bad = clique_bad = cases = 0
    worst = 0.0
    with Timer() as t:
        for d in (2, 3, 4):
            for n in range(d, 9):
                for i in range(20):
                    g = sample_null(n, d, stream_for(SEED, f"oracle/{n}/{d}", i))
                    u = UnfoldingView(AdjacencyTensorView(g))
                    m = _dense_unfolding(g)
                    v = rng.integers(-9, 10, size=m.shape[1]).astype(float)
                    w = rng.integers(-9, 10, size=m.shape[0]).astype(float)
                    matvec_bad += not (np.array_equal(unfold_matvec(u, v), m @ v)
                                       and np.array_equal(unfold_matvec(u, w, "left"), m.T @ w))
                    expected = np.linalg.svd(m, compute_uv=False)[0]
                    got = top_singular_value(u, tol=1e-13, max_iter=100_000, stream=stream_for(SEED, "power", i))
                    err = abs(got.sigma - expected) / expected
                    worst = max(worst, err)
                    sigma_bad += err > 1e-6
                    cases += 1
        for n in range(3, 13):
            for i in range(5):
                g = sample_null(n, 3, stream_for(SEED, "oracle/clique", 100 * n + i))
                if i >= 3:
                    g = plant_clique(g, n // 2, stream_for(SEED, "oracle/plant", 100 * n + i)).graph
                clique_bad += det.max_clique_exhaustive(g).size != _brute_max_clique(g)
    ok = matvec_bad == sigma_bad == clique_bad == 0 and t.elapsed < 60
    verdict(3, "oracle equivalence", ok,
            f"{cases} tensor cases, matvec mismatches {matvec_bad}, sigma worst rel err {worst:.1e} "
            f"(>1e-6: {sigma_bad}), max-clique mismatches {clique_bad}/50, {t.elapsed:.1f}s < 60s")


def test_04_clique_law():
    sizes, times = [], []
    for i in range(20):
        g = sample_null(64, 3, stream_for(SEED, "cliquelaw/null-gen", i))
        with Timer() as t:
            sizes.append(det.max_clique_exhaustive(g).size)
        times.append(t.elapsed)
    mean = float(np.mean(sizes))
    law = (math.factorial(3) * math.log2(64)) ** 0.5
    verdict(4, "clique law", 5 <= mean <= 7 and max(times) < 60,
            f"mean max clique {mean:.2f} in [5, 7] (law value {law:.1f}), slowest trial {max(times):.2f}s < 60s")


def test_05_spectral_regime():
    config = DetectorConfig("spectral")
    with Timer() as t:
        thr = calibrate_threshold(config, 50, 3, 0.05, 200, SEED).threshold
        strong = 1 - estimate_risk(config, thr, 50, 3, 25, 100, SEED).type_II
        weak = 1 - estimate_risk(config, thr, 50, 3, 5, 100, SEED).type_II
    verdict(5, "spectral regime", strong >= 0.95 and weak <= 0.25 and t.elapsed < 600,
            f"power {strong:.2f} >= 0.95 at kappa=25, {weak:.2f} <= 0.25 at kappa=5, {t.elapsed:.0f}s < 600s")


def test_06_edge_count_power():
    config = DetectorConfig("edgecount")
    with Timer() as t:
        thr = calibrate_threshold(config, 30, 3, 0.05, 200, SEED).threshold
        est = estimate_risk(config, thr, 30, 3, 25, 100, SEED)
    verdict(6, "edge-count power", est.risk <= 0.05 and t.elapsed < 60,
            f"risk {est.risk:.2f} (type I {est.type_I:.2f}, type II {est.type_II:.2f}) <= 0.05, {t.elapsed:.1f}s < 60s")


def test_07_pc_sanity():
    config = DetectorConfig("spectral")
    with Timer() as t:
        thr = calibrate_threshold(config, 200, 2, 0.05, 200, SEED).threshold
        est = estimate_risk(config, thr, 200, 2, 45, 50, SEED)
    verdict(7, "graph planted clique sanity", est.risk <= 0.10 and t.elapsed < 300,
            f"risk {est.risk:.2f} (type I {est.type_I:.2f}, type II {est.type_II:.2f}) <= 0.10, {t.elapsed:.1f}s < 300s")


def test_08_slice_reduction():
    incomplete = 0
    present = slots = 0
    with Timer() as t:
        for i in range(50):
            g = sample_null(40, 3, stream_for(SEED, "h1/null-gen", i))
            inst = plant_clique(g, 12, stream_for(SEED, "h1/plant", i))
            fixed = inst.clique[int(stream_for(SEED, "slice-pick", i).integers(12))]
            sl = take_slice(inst.graph, [fixed])
            local = [sl.vertices.index(v) for v in inst.clique if v != fixed]
            incomplete += not is_clique(sl.graph, local)

            h0 = sample_null(40, 3, stream_for(SEED, "h0/null-gen", i))
            fixed0 = int(stream_for(SEED, "slice-pick0", i).integers(40))
            s0 = take_slice(h0, [fixed0]).graph
            present += s0.num_edges
            slots += s0.num_slots
    freq = present / slots
    ok = incomplete == 0 and abs(freq - 0.5) <= 0.01 and t.elapsed < 60
    verdict(8, "slice reduction", ok,
            f"{50 - incomplete}/50 clique slices complete, H0 slice edge frequency {freq:.4f} in 0.5 +- 0.01, "
            f"{t.elapsed:.1f}s < 60s")


def test_09_metropolis_sanity():
    g = DUniformHypergraph.complete(40, 3)
    steps = math.ceil(10 * 40 * math.log(40))
    full = 0
    with Timer() as t:
        for i in range(20):
            # check=True raises if any visited state is not a clique
            found = det.metropolis_search(g, 2.0, steps, stream_for(SEED, "detector", i), check=True)
            full += found.size == 40
    verdict(9, "Metropolis sanity", full >= 19 and t.elapsed < 60,
            f"full clique found in {full}/20 (need >= 19), all visited states valid, {t.elapsed:.1f}s < 60s")


def test_10_type_one_control():
    lines = []
    ok = True
    with Timer() as t:
        for name in ("edgecount", "spectral", "exhaustive", "metropolis", "slicevote"):
            config = DetectorConfig(name)
            thr = calibrate_threshold(config, 40, 3, 0.05, 200, SEED).threshold
            fresh = null_statistics(config, 40, 3, 400, SEED, role="h0")
            rate = float(np.mean(fresh > thr))
            ok &= rate <= 0.12
            lines.append(f"{name} {rate:.3f}")
    verdict(10, "type-I control", ok and t.elapsed < 600,
            f"type I over 400 nulls ({', '.join(lines)}) all <= 0.12, {t.elapsed:.0f}s < 600s")


def test_11_reproducibility(tmp_path):
    cfg = tmp_path / "grid.txt"
    cfg.write_text("d=3\nN_list=20,30\nkappa_list=4,8,12\ndetectors=spectral\nmaster_seed=0\n")
    outputs = {}
    for label, workers in (("first", 1), ("second", 1), ("parallel", 8)):
        out = tmp_path / f"{label}.csv"
        assert run(["phase", "--config", str(cfg), "--out", str(out), "--no-timing", "--workers", str(workers)]) == 0
        outputs[label] = out.read_bytes()
    rows = outputs["first"].decode().strip().split("\n")[1:]
    ok = len(rows) == 6 and outputs["first"] == outputs["second"] == outputs["parallel"]
    verdict(11, "reproducibility", ok,
            f"{len(rows)} grid rows; repeat identical: {outputs['first'] == outputs['second']}; "
            f"workers 1 vs 8 identical: {outputs['first'] == outputs['parallel']}")
