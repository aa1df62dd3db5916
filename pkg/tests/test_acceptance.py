"""Acceptance criteria 1-10, each at its stated tolerance and time budget.

Every test records a PASS/FAIL line in ``RESULTS``; ``conftest.py`` prints
them at the end of the session.
"""
import itertools
import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from interbranch.backends import NoiseModel, run_exact, sample_stabilizer, sample_statevector, tvd
from interbranch.bench import BackendModel, CouplingSpec, ExperimentConfig, NoiseSpec, emit_csv, run_experiment
from interbranch.bench.report import frontier_table
from interbranch.circuit import two_qubit_depth
from interbranch.metrics import (
    branch_contrast, branch_weight, compute_all, erasure_metric, mutual_information, transfer_metrics,
)
from interbranch.protocol import VariantSpec, build, generate_message
from interbranch.routing import compile_circuit, heavy_hex, line, on_edges, verify_equivalence

from oracles import random_clifford

RESULTS: dict[int, tuple[str, str]] = {}
FAMILIES = ("sparse", "half", "dense")


@contextmanager
def criterion(number: int, title: str):
    try:
        yield
    except BaseException as exc:
        RESULTS[number] = ("FAIL", f"{title}: {exc}".splitlines()[0][:200])
        raise
    RESULTS[number] = ("PASS", title)


def h2(p):
    return 0.0 if p in (0.0, 1.0) else -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def messages(n_values, instances=3):
    for fam in FAMILIES:
        for n in n_values:
            for inst in range(instances if fam == "half" else 1):
                yield generate_message(fam, n, 1000 * n + inst)


def mean_sigma(rows, col="p_all"):
    """Mean of ``col`` over rows and its binomial standard error from the conditioning counts."""
    vals = np.array([getattr(r, col) for r in rows])
    counts = np.array([r.n_r0 for r in rows])
    var = np.sum(vals * (1 - vals) / np.maximum(counts, 1)) / len(rows) ** 2
    return float(vals.mean()), math.sqrt(max(var, 0.25 / counts.sum() ** 2))


def test_c1_ideal_pilot():
    with criterion(1, "ideal pilot, exact mode, n=1..4, all families"):
        start = time.perf_counter()
        checked = 0
        for msg in messages(range(1, 5)):
            proto = run_exact(build(msg))
            p_all, p_bit = transfer_metrics(proto, msg.mu)
            assert abs(p_all - 1) <= 1e-10 and abs(p_bit - 1) <= 1e-10, msg
            assert abs(erasure_metric(proto, "protocol") - 1) <= 1e-10, msg
            no_swap = run_exact(build(msg, VariantSpec("no_swap")))
            no_unc = run_exact(build(msg, VariantSpec("no_uncompute")))
            assert abs(transfer_metrics(no_unc, msg.mu)[0] - 1) <= 1e-10, msg
            if msg.weight:
                # weight-0 messages (half, n=1) have no active bit: Delta undefined, nothing to erase
                assert abs(branch_contrast(proto, msg.mu) - 1) <= 1e-10, msg
                assert abs(transfer_metrics(no_swap, msg.mu)[0]) <= 1e-10, msg
                assert abs(branch_contrast(no_swap, msg.mu) + 1) <= 1e-10, msg
                assert abs(erasure_metric(no_unc, "no_uncompute")) <= 1e-10, msg
            checked += 1
        elapsed = time.perf_counter() - start
        assert checked == 20
        assert elapsed < 1.0, f"took {elapsed:.2f}s"


def test_c2_amplitude_sweep():
    with criterion(2, "amplitude sweep, no amplification"):
        start = time.perf_counter()
        msg = generate_message("sparse", 1)
        for p0 in np.linspace(0, 1, 11):
            proto = run_exact(build(msg, VariantSpec(amplitude_p0=float(p0))))
            no_swap = run_exact(build(msg, VariantSpec("no_swap", amplitude_p0=float(p0))))
            assert abs(branch_weight(proto, 0) - (1 - p0)) <= 1e-10
            assert abs(branch_weight(no_swap, 0) - p0) <= 1e-10
            for table, variant in ((proto, VariantSpec()), (no_swap, VariantSpec("no_swap"))):
                assert abs(compute_all(table, msg.mu, variant).p_msg_branch - (1 - p0)) <= 1e-10
        elapsed = time.perf_counter() - start
        assert elapsed < 1.0, f"took {elapsed:.2f}s"


def test_c3_ideal_mutual_information():
    with criterion(3, "ideal mutual information"):
        for msg in messages(range(1, 5)):
            if not msg.weight:
                continue
            per_bit, mean = mutual_information(run_exact(build(msg)), msg.mu)
            assert all(abs(v - 1) <= 1e-10 for v in per_bit) and abs(mean - 1) <= 1e-10
        msg = generate_message("dense", 3)
        for p0 in np.linspace(0, 1, 11):
            amp = run_exact(build(msg, VariantSpec(amplitude_p0=float(p0))))
            assert abs(mutual_information(amp, msg.mu)[1] - h2(p0)) <= 1e-10
        spot = run_exact(build(generate_message("sparse", 1), VariantSpec(amplitude_p0=0.25)))
        assert abs(mutual_information(spot, "1")[1] - 0.8113) <= 1e-4


def test_c4_backend_cross_validation():
    with criterion(4, "stabilizer vs statevector, 50 random Clifford circuits"):
        start = time.perf_counter()
        noise = NoiseModel(0.001, 0.01, 0.02)
        worst = 0.0
        for seed in range(50):
            c = random_clifford(seed, max_width=12)
            assert c.width <= 12 and c.clifford_only
            d = tvd(sample_stabilizer(c, noise, 100_000, seed), sample_statevector(c, noise, 100_000, seed))
            worst = max(worst, d)
        elapsed = time.perf_counter() - start
        assert worst < 0.02, f"worst TVD {worst:.4f}"
        assert elapsed < 120, f"took {elapsed:.0f}s"


def test_c5_router_soundness():
    with criterion(5, "router soundness on line and heavy_hex(1,1)"):
        start = time.perf_counter()
        cases = 0
        for msg in messages(range(1, 4)):
            for kind in ("protocol", "no_swap", "no_uncompute"):
                c = build(msg, VariantSpec(kind))
                # line(8) holds n <= 2; n = 3 needs 9 qubits
                for cmap in (line(max(8, c.width)), heavy_hex(1, 1)):
                    for strategy, seed in itertools.product(("trivial", "seeded_random", "interleave_pairs"),
                                                            (0, 1)):
                        routed = compile_circuit(c, cmap, strategy, seed)
                        assert on_edges(routed), (msg, kind, cmap.name, strategy)
                        assert verify_equivalence(c, routed), (msg, kind, cmap.name, strategy)
                        cases += 1
        elapsed = time.perf_counter() - start
        assert cases == 15 * 3 * 2 * 6
        assert elapsed < 30, f"took {elapsed:.1f}s"


def test_c6_depth_phenomenology():
    with criterion(6, "routed depth: dense grows on line, sparse flat with interleave_pairs"):
        depths = []
        for n in (2, 4, 8, 16):
            c = build(generate_message("dense", n))
            depths.append(two_qubit_depth(compile_circuit(c, line(c.width), "trivial", 0).circuit))
        assert all(a < b for a, b in zip(depths, depths[1:])), depths
        for make in (lambda w: line(w), lambda w: heavy_hex(4, 4)):
            sparse = {}
            for n in (4, 32):
                c = build(generate_message("sparse", n))
                sparse[n] = two_qubit_depth(compile_circuit(c, make(c.width), "interleave_pairs", 0).circuit)
            assert sparse[32] <= sparse[4] + 4, sparse


@pytest.fixture(scope="module")
def scaling_rows():
    start = time.perf_counter()
    rows = run_experiment(ExperimentConfig(kind="scaling", name="acceptance-scaling"))
    return rows, time.perf_counter() - start


def test_c7_noise_monotonicity_and_family_ordering(scaling_rows):
    with criterion(7, "p_all non-increasing in p2; sparse >= dense - 3 sigma"):
        models = [BackendModel(name=f"a2a_p2_{p2}", coupling_map=CouplingSpec(kind="all_to_all"),
                               noise=NoiseSpec(p1=0.002, p2=p2, readout=0.03))
                  for p2 in (0.0, 0.005, 0.01, 0.02)]
        cfg = ExperimentConfig(kind="scaling", name="acceptance-p2", families=["dense"], n_grid=[8],
                               backends=models, layout="trivial", routing_seeds=[0])
        by_p2 = {r.p2: r for r in run_experiment(cfg)}
        series = [mean_sigma([by_p2[p2]]) for p2 in sorted(by_p2)]
        for (pa, sa), (pb, sb) in itertools.combinations(series, 2):
            assert pb <= pa + 3 * math.hypot(sa, sb), series

        rows, _ = scaling_rows
        for n in (4, 8, 16, 24, 32):
            group = {fam: [r for r in rows if r.backend_model == "hh_noisy" and r.family == fam and r.n == n]
                     for fam in ("sparse", "dense")}
            (ps, ss), (pd, sd) = mean_sigma(group["sparse"]), mean_sigma(group["dense"])
            assert ps >= pd - 3 * math.hypot(ss, sd), (n, ps, pd)


def test_c8_frontier_ordering(scaling_rows):
    with criterion(8, "frontier ordering on heavy_hex quiet/noisy presets"):
        rows, elapsed = scaling_rows
        front = {(f["backend_model"], f["family"]): f["frontier_n"] or 0 for f in frontier_table(rows)}
        for model in ("hh_quiet", "hh_noisy"):
            assert front[(model, "sparse")] >= front[(model, "half")] >= front[(model, "dense")], front
        for fam in FAMILIES:
            assert front[("hh_quiet", fam)] >= front[("hh_noisy", fam)], front
        assert elapsed < 600, f"took {elapsed:.0f}s"


def test_c9_seed_variability(tmp_path):
    with criterion(9, "seed variability and worker-count determinism"):
        cfg = ExperimentConfig(kind="seed_sweep", name="acceptance-seeds", families=["dense"], n_grid=[16],
                               backends=["hh_quiet"], layout="seeded_random", routing_seeds=list(range(10)))
        rows = run_experiment(cfg, workers=1)
        assert len(rows) == 10
        assert len({r.twoq_depth for r in rows}) > 1
        assert np.std([r.p_all for r in rows]) > 0
        single = emit_csv(rows, tmp_path / "one.csv").read_bytes()
        many = emit_csv(run_experiment(cfg, workers=4), tmp_path / "many.csv").read_bytes()
        assert single == many


def test_c10_cousins_sweep():
    with criterion(10, "cousins sweep: Delta non-increasing, depth non-decreasing in d"):
        cfg = ExperimentConfig(kind="cousins", name="acceptance-cousins")
        assert cfg.k == 16 and cfg.n_grid == [16] and cfg.backends == ["hh_noisy"]
        assert len(cfg.routing_seeds) == 5
        rows = run_experiment(cfg)
        stats = []
        for d in cfg.d_grid:
            group = [r for r in rows if r.d == d]
            deltas = np.array([r.delta for r in group])
            # shot-noise sd of one Delta estimate: two independent branch proportions
            shot = max(math.sqrt(0.25 / r.n_r0 + 0.25 / r.n_r1) for r in group)
            sigma = max(deltas.std(ddof=1), shot) / math.sqrt(len(group))
            depth = float(np.mean([r.twoq_depth for r in group]))
            stats.append((d, float(deltas.mean()), sigma, depth))
        for (d1, m1, s1, _), (d2, m2, s2, _) in itertools.combinations(stats, 2):
            assert m2 <= m1 + 3 * math.hypot(s1, s2), (d1, m1, d2, m2)
        depths = [s[3] for s in stats]
        assert all(a <= b for a, b in zip(depths, depths[1:])), depths
