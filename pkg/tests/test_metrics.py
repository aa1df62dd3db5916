import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from interbranch.backends import IDEAL, NoiseModel, OutcomeDistribution, ShotTable, run_exact, sample_stabilizer
from interbranch.circuit import RegisterMap
from interbranch.metrics import (
    EmptyConditioning, branch_contrast, compute_all, condition, erasure_metric, frontier,
    mutual_information, transfer_metrics,
)
from interbranch.protocol import VariantSpec, build, generate_message


def h2(p):
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def table_from(rows, n):
    """ShotTable from (q, r, f, m, p) tuples of bitstrings, one per shot."""
    counts = {}
    for q, r, f, m, p in rows:
        key = f"{q}{r}{f}{m}{p}"
        counts[key] = counts.get(key, 0) + 1
    return ShotTable(counts, len(rows), RegisterMap.protocol(n))


def test_condition_examples():
    dist = run_exact(build(generate_message("sparse", 1)))
    r0 = condition(dist, "R", 0)
    assert r0.total == pytest.approx(0.5)
    assert condition(r0, "R", 0) == r0
    table = sample_stabilizer(build(generate_message("sparse", 1)), IDEAL, 1000, 0)
    sub = condition(table, "R", 0)
    assert 400 < sub.shots < 600 and sum(sub.counts.values()) == sub.shots
    with pytest.raises(EmptyConditioning):
        condition(dist, "M", 1)
    with pytest.raises(KeyError):
        condition(dist, "S", 0)
    with pytest.raises(ValueError):
        condition(dist, "P", "01")


def test_transfer_examples():
    for fam, n in [("sparse", 3), ("half", 4), ("dense", 5)]:
        msg = generate_message(fam, n, 1)
        assert transfer_metrics(run_exact(build(msg)), msg.mu) == pytest.approx((1.0, 1.0))
    no_swap = run_exact(build(generate_message("sparse", 1), VariantSpec("no_swap")))
    assert transfer_metrics(no_swap, "1")[0] == 0.0
    # every R=0 shot has exactly one wrong bit
    rows = [("0", "0", "0", "0000", p) for p in ("0110", "1010", "1100", "1111")]
    assert transfer_metrics(table_from(rows, 4), "1110") == (0.0, pytest.approx(0.75))


def test_transfer_undefined_without_r0():
    t = table_from([("1", "1", "1", "0", "0")] * 5, 1)
    assert transfer_metrics(t, "1") == (None, None)
    rec = compute_all(t, "1", VariantSpec())
    assert {"p_all", "p_bit", "p_erase", "delta"} <= set(rec.undefined)
    assert rec.p_erase_r1 == 1.0 and rec.n_r0 == 0


def test_erasure_conventions():
    msg = generate_message("sparse", 1)
    assert erasure_metric(run_exact(build(msg)), "protocol") == pytest.approx(1.0)
    assert erasure_metric(run_exact(build(msg, VariantSpec("no_uncompute"))), "no_uncompute") == 0.0
    assert erasure_metric(run_exact(build(msg, VariantSpec("no_swap"))), "no_swap") == pytest.approx(1.0)
    # literal convention looks at R=1, which never saw a write: trivially erased
    assert erasure_metric(run_exact(build(msg, VariantSpec("no_uncompute"))), "no_uncompute",
                          literal=True) == pytest.approx(1.0)


def test_branch_contrast_examples():
    msg = generate_message("half", 6, 2)
    assert branch_contrast(run_exact(build(msg)), msg.mu) == pytest.approx(1.0)
    assert branch_contrast(run_exact(build(msg, VariantSpec("no_swap"))), msg.mu) == pytest.approx(-1.0)
    assert branch_contrast(run_exact(build(generate_message("sparse", 2))), "00") is None
    # P independent of R
    rows = [(q, r, "0", "0", p) for q in "01" for r in "01" for p in "01"]
    assert branch_contrast(table_from(rows, 1), "1") == 0.0
    noisy = sample_stabilizer(build(msg), NoiseModel(0.05, 0.2, 0.05), 20_000, 3)
    assert 0 < branch_contrast(noisy, msg.mu) < 1


def test_mutual_information_examples():
    msg = generate_message("dense", 3)
    per_bit, mean = mutual_information(run_exact(build(msg)), msg.mu)
    assert per_bit == pytest.approx([1.0] * 3, abs=1e-12) and mean == pytest.approx(1.0, abs=1e-12)
    amp = run_exact(build(generate_message("sparse", 1), VariantSpec(amplitude_p0=0.25)))
    assert mutual_information(amp, "1")[1] == pytest.approx(h2(0.25), abs=1e-10)
    assert h2(0.25) == pytest.approx(0.8113, abs=1e-4)
    rows = [(q, r, "0", "0", p) for q in "01" for r in "01" for p in "01"]
    assert mutual_information(table_from(rows, 1), "1") == ([0.0], 0.0)
    assert mutual_information(run_exact(build(generate_message("sparse", 2))), "00") == (None, None)


def test_ideal_record_is_perfect():
    msg = generate_message("half", 5, 9)
    rec = compute_all(run_exact(build(msg)), msg.mu, VariantSpec())
    assert (rec.p_all, rec.p_bit, rec.p_erase, rec.delta) == pytest.approx((1, 1, 1, 1), abs=1e-12)
    assert rec.undefined == []
    assert rec.p_r0 == pytest.approx(0.5)


def test_frontier_examples():
    # mean p_all at or above 0.1 through n=8, below after
    dense_row = {1: 0.9, 2: 0.8, 4: 0.5, 8: 0.2, 16: 0.04, 24: 0.01, 32: 0.0}
    assert frontier(dense_row) == 8
    assert frontier({n: 1.0 for n in (1, 2, 4, 8, 16, 24, 32)}) == 32
    assert frontier({n: 0.05 for n in (1, 2, 4, 8, 16, 24, 32)}) is None
    assert frontier({1: 0.1}) == 1
    assert frontier({4: None, 8: 0.3}) == 8
    with pytest.raises(ValueError):
        frontier({})


@settings(max_examples=200)
@given(st.dictionaries(st.sampled_from([1, 2, 4, 8, 16, 24, 32]), st.floats(0, 1), min_size=1),
       st.sampled_from([1, 2, 4, 8, 16, 24, 32]), st.floats(0, 1))
def test_frontier_monotone(series, n, bump):
    raised = dict(series)
    raised[n] = max(series.get(n, 0.0), bump)
    before, after = frontier(series), frontier(raised)
    assert before is None or (after is not None and after >= before)


@st.composite
def random_tables(draw):
    n = draw(st.integers(1, 4))
    width = 3 + 2 * n
    keys = st.text("01", min_size=width, max_size=width)
    counts = draw(st.dictionaries(keys, st.integers(1, 50), min_size=1, max_size=20))
    mu = draw(st.text("01", min_size=n, max_size=n))
    return ShotTable(counts, sum(counts.values()), RegisterMap.protocol(n)), mu


@settings(max_examples=300)
@given(random_tables())
def test_metric_ranges(case):
    table, mu = case
    rec = compute_all(table, mu, VariantSpec())
    if rec.p_all is not None:
        assert 0 <= rec.p_all <= rec.p_bit <= 1
    for p in (rec.p_erase, rec.p_erase_r1):
        assert p is None or 0 <= p <= 1
    assert rec.delta is None or -1 <= rec.delta <= 1
    if rec.mi_per_bit is not None:
        assert all(0 <= v <= 1 for v in rec.mi_per_bit)
    assert rec.n_r0 + rec.n_r1 == table.shots
    as_dist = OutcomeDistribution({k: v / table.shots for k, v in table.counts.items()}, table.registers)
    exact_rec = compute_all(as_dist, mu, VariantSpec())
    for name in ("p_all", "p_bit", "p_erase", "delta", "mi_mean"):
        a, b = getattr(rec, name), getattr(exact_rec, name)
        assert (a is None) == (b is None)
        if a is not None:
            assert a == pytest.approx(b, abs=1e-9)
