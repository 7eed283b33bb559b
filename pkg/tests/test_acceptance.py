"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines inline; they are
also collected into the terminal summary.
"""

import math
import time
import warnings

import numpy as np
import pytest

from effsec.capacity import maximize_direct, maximize_prefixed
from effsec.cli import run
from effsec.detection import HypothesisPair, lemma_check, np_optimality_audit
from effsec.infomeasures import kl_divergence, mutual_information, pinsker_g, total_variation
from effsec.probcore import Dmc, Pmf, WiretapChannel, product_extension, push_forward
from effsec.scenarios import (
    canonical_channel,
    example1_mismatch,
    example2_leaky,
    largest_enumerable_n,
    stealth_sweep,
    sweep_seed,
)
from effsec.wiretap_codes import (
    CodeParams,
    ensemble_reports,
    generate_codebook,
    induced_distributions,
    jensen_upper_bound,
    per_message_matrix,
    secrecy_report,
)

from . import oracles
from .conftest import random_dmc, random_pmf, random_wiretap

SEED = 0
UNIFORM = Pmf.uniform(2)
ACTUAL = Pmf.of([0.8, 0.2])
N_LIST = (2, 4, 6, 8)


def ixz(q, ch):
    return float(mutual_information(q, ch.z_channel))


@pytest.fixture(scope="module")
def sweep():
    ch = canonical_channel()
    R1 = ixz(UNIFORM, ch) + 0.15
    R = 0.1
    assert R + R1 < float(mutual_information(UNIFORM, ch.y_channel)) - 0.1
    t0 = time.perf_counter()
    res = stealth_sweep(ch, UNIFORM, R, R1, N_LIST, codebooks_per_n=200, trials=10_000, seed=SEED)
    return ch, R, R1, res, time.perf_counter() - t0


def test_criterion_01_decomposition_identity(record_criterion):
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        ch = WiretapChannel.from_factors(random_dmc(rng, 2, 2), random_dmc(rng, 2, 2))
        n, L, L1 = (int(v) for v in rng.integers(1, 5, size=3))
        cb = generate_codebook(Pmf.of(random_pmf(rng, 2)), CodeParams.from_sizes(n, L, L1), int(rng.integers(2**31)))
        rep = secrecy_report(cb, ch, Pmf.of(random_pmf(rng, 2)))
        worst = max(worst, rep.identity_residual)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-9 and elapsed < 60
    record_criterion(1, ok, f"max residual {worst:.2e} over 100 instances, {elapsed:.1f}s")
    assert ok


def test_criterion_02_induced_distribution_oracle(record_criterion):
    t0 = time.perf_counter()
    ch = canonical_channel()
    cb = generate_codebook(UNIFORM, CodeParams.from_sizes(3, 2, 2), seed=7)
    q_z = push_forward(UNIFORM, ch.z_channel)
    per_naive = oracles.induced(cb.words.tolist(), ch.z_channel.matrix.tolist(), 3, 2)
    conf, stealth, eff, marg = oracles.secrecy(per_naive, oracles.product(q_z.probs.tolist(), 3))
    per, marginal = induced_distributions(cb, ch)
    rep = secrecy_report(cb, ch, q_z)
    err = max(
        max(np.max(np.abs(d.probs - np.array(row))) for d, row in zip(per, per_naive)),
        float(np.max(np.abs(marginal.probs - np.array(marg)))),
        abs(rep.confusion - conf), abs(rep.stealth - stealth), abs(rep.effective - eff),
    )
    elapsed = time.perf_counter() - t0
    ok = err <= 1e-9 and elapsed < 10
    record_criterion(2, ok, f"max deviation from naive oracle {err:.2e}, {elapsed:.2f}s")
    assert ok


def test_criterion_03_secrecy_capacity(record_criterion):
    target = oracles.bsc_secrecy_grid(0.1, 0.3, step=1e-3)
    ch = canonical_channel()
    t0 = time.perf_counter()
    d = maximize_direct(ch, seed=SEED).value
    p = maximize_prefixed(ch, seed=SEED).value
    elapsed = time.perf_counter() - t0
    ok = abs(d - target) <= 1e-3 and abs(p - target) <= 1e-3 and abs(target - 0.41230) <= 1e-3 and elapsed < 120
    record_criterion(3, ok, f"direct {d:.6f}, prefixed {p:.6f}, oracle {target:.6f}, {elapsed:.1f}s")
    assert ok


def test_criterion_04_prefix_dominance(record_criterion):
    rng = np.random.default_rng(404)
    t0 = time.perf_counter()
    gaps = []
    for _ in range(20):
        ch = random_wiretap(rng, 2, int(rng.integers(2, 4)), int(rng.integers(2, 4)))
        gaps.append(maximize_prefixed(ch, seed=SEED).value - maximize_direct(ch, seed=SEED).value)
    elapsed = time.perf_counter() - t0
    ok = min(gaps) >= -1e-6 and elapsed < 600
    record_criterion(4, ok, f"min(prefixed - direct) {min(gaps):.2e} over 20 channels, {elapsed:.1f}s")
    assert ok


def test_criterion_05_stealth_rate_condition(sweep, record_criterion):
    _, _, _, res, elapsed = sweep
    means = res.column("effective")
    decreasing = bool(np.all(np.diff(means) < 0))
    halved = means[-1] < 0.5 * means[0]
    ok = decreasing and halved and elapsed < 600
    shown = ", ".join(f"{m:.4f}" for m in means)
    record_criterion(5, ok, f"ensemble means over n={list(N_LIST)}: {shown}; last/first {means[-1] / means[0]:.3f}, {elapsed:.1f}s")
    assert ok


def test_criterion_06_jensen_bound(sweep, record_criterion):
    ch, _, _, res, _ = sweep
    rows = []
    ok = True
    for r in res.records:
        bound, _ = jensen_upper_bound(UNIFORM, r.L1, r.n, ch)
        rows.append(f"n={r.n}: {float(bound):.4f} vs {r.effective:.4f}-2*{r.effective_hw:.4f}")
        ok &= bound >= r.effective - 2 * r.effective_hw
    record_criterion(6, ok, "; ".join(rows))
    assert ok


def test_criterion_07_example1_regime(record_criterion):
    ch = canonical_channel()
    R1 = ixz(ACTUAL, ch) + 0.15
    ns = list(range(2, 9))
    res = example1_mismatch(ch, UNIFORM, ACTUAL, 0.1, R1, ns, codebooks_per_n=200, trials=0, seed=SEED)
    d = res.single_letter_divergence
    stealth = res.column("stealth")
    slope = np.polyfit(ns, stealth, 1)[0]
    last = res.records[-1]
    ok = 0.5 <= slope / d <= 1.5 and last.confusion < last.stealth / 3
    record_criterion(
        7, ok, f"stealth slope {slope:.4f} = {slope / d:.2f} x D; confusion(8) {last.confusion:.4f} vs stealth(8)/3 {last.stealth / 3:.4f}"
    )
    assert ok


def test_criterion_08_example2_regime(record_criterion):
    ch = canonical_channel(0.1, 0.2)
    i = ixz(UNIFORM, ch)
    R, R1 = 0.8, 0.15
    assert R1 < i < R + R1
    res = example2_leaky(ch, UNIFORM, R, R1, N_LIST, codebooks_per_n=200, trials=0, seed=SEED)
    ratio = res.records[-1].confusion / 8 / (i - R1)
    stealth = res.column("stealth")
    ok = 0.3 <= ratio <= 1.7 and bool(np.all(np.diff(stealth) < 0))
    shown = ", ".join(f"{s:.4f}" for s in stealth)
    record_criterion(8, ok, f"confusion/n at n=8 is {ratio:.3f} x (I(X;Z)-R1); stealth {shown}")
    assert ok


def test_criterion_09_np_optimality(record_criterion):
    rng = np.random.default_rng(909)
    t0 = time.perf_counter()
    results = []
    for i in range(50):
        k = int(rng.integers(2, 11))
        zeros = i % 3 == 0
        hp = HypothesisPair(random_pmf(rng, k, zeros), random_pmf(rng, k, zeros))
        results.append(np_optimality_audit(hp))
    elapsed = time.perf_counter() - t0
    ok = all(results) and elapsed < 60
    record_criterion(9, ok, f"{sum(results)}/50 pairs pass the exhaustive audit, {elapsed:.1f}s")
    assert ok


def test_criterion_10_lemma_band(sweep, record_criterion):
    ch, R, R1, res, _ = sweep
    n = max(N_LIST)
    q_z = push_forward(UNIFORM, ch.z_channel)
    ref = product_extension(q_z, n).probs
    params = CodeParams.from_rates(n, R, R1)
    held = 0
    reps = ensemble_reports(UNIFORM, params, ch, q_z, 200, sweep_seed(SEED, n))
    for cb, rep in reps:
        hp = HypothesisPair(ref, per_message_matrix(cb, ch).mean(axis=0))
        held += bool(lemma_check(hp, float(rep.stealth)))

    rng = np.random.default_rng(1010)
    pinsker_ok = 0
    for _ in range(1000):
        k = int(rng.integers(2, 10))
        p, q = Pmf.of(random_pmf(rng, k)), Pmf.of(random_pmf(rng, k))
        pinsker_ok += total_variation(p, q) <= pinsker_g(kl_divergence(p, q)) + 1e-12
    ok = held == len(reps) and pinsker_ok == 1000
    record_criterion(10, ok, f"band holds for {held}/{len(reps)} codebooks at n={n}; Pinsker {pinsker_ok}/1000")
    assert ok


def test_criterion_11_detection_of_non_stealth(record_criterion):
    ch = canonical_channel()
    R, R1 = 0.1, ixz(ACTUAL, ch) + 0.15
    n = largest_enumerable_n(ch, R, R1)
    res = example1_mismatch(ch, UNIFORM, ACTUAL, R, R1, [n], codebooks_per_n=1, trials=0, seed=SEED)
    ab = res.records[-1].alpha_beta_min
    ok = ab < 0.5
    record_criterion(11, ok, f"largest enumerable n={n}: min alpha+beta {ab:.4f} (stealth {res.records[-1].stealth:.3f} bits)")
    assert ok


def test_criterion_12_cli_determinism(tmp_path, record_criterion):
    from effsec.cli import emit_channel

    emit_channel(canonical_channel(), tmp_path / "c.json")
    commands = {
        "capacity": ["--grid", "10", "--restarts", "1"],
        "bcc": ["--grid", "8", "--restarts", "1", "--lambda", "0,1,3"],
        "sweep": ["--rate", "0.1", "--rate1", "0.27", "--n-list", "2,4", "--codebooks", "20", "--trials", "200"],
        "example1": ["--rate", "0.1", "--rate1", "0.23", "--n-list", "2,4", "--codebooks", "20", "--trials", "200",
                     "--actual", "0.8,0.2"],
        "example2": ["--rate", "0.3", "--rate1", "0.05", "--n-list", "2,4", "--codebooks", "20", "--trials", "200"],
        "detect": ["--rate", "0.1", "--rate1", "0.23", "--n", "6", "--actual", "0.8,0.2", "--trials", "200"],
    }
    identical = []
    for cmd, extra in commands.items():
        outs = []
        for i in range(2):
            out = tmp_path / f"{cmd}{i}"
            code = run([cmd, "--channel", str(tmp_path / "c.json"), "--seed", "3", "--out", str(out)] + extra)
            outs.append((code, {p.name: p.read_bytes() for p in sorted(out.iterdir())}))
        identical.append(outs[0][0] == 0 and outs[0] == outs[1])
    ok = all(identical)
    record_criterion(12, ok, f"{sum(identical)}/{len(commands)} subcommands byte-identical on rerun")
    assert ok
