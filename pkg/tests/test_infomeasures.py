import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from effsec.errors import DimensionError, DomainError
from effsec.infomeasures import (
    Bits,
    conditional_mutual_information,
    entropy,
    kl_bits,
    kl_divergence,
    mi_from_joint,
    mutual_information,
    pinsker_g,
    total_variation,
)
from effsec.probcore import Dmc, Pmf

from . import oracles
from .conftest import random_dmc, random_pmf


def test_entropy_value():
    assert entropy(Pmf.of([0.2, 0.8])) == pytest.approx(0.72193, abs=1e-5)
    assert entropy(Pmf.of([0.2, 0.8])) == pytest.approx(oracles.h2(0.2), abs=1e-12)


def test_bsc_mutual_information_value():
    mi = mutual_information(Pmf.uniform(2), Dmc.bsc(0.11))
    assert mi == pytest.approx(0.50009, abs=1e-5)
    assert mi == pytest.approx(1 - oracles.h2(0.11), abs=1e-12)


def test_kl_value():
    assert kl_divergence(Pmf.of([0.5, 0.5]), Pmf.of([0.25, 0.75])) == pytest.approx(0.20752, abs=1e-5)


def test_kl_support_violation_is_flagged_infinite():
    d = kl_divergence(Pmf.of([0.5, 0.5]), Pmf.of([1.0, 0.0]))
    assert isinstance(d, Bits) and d.infinite
    assert not kl_divergence(Pmf.of([1.0, 0.0]), Pmf.of([0.5, 0.5])).infinite


def test_total_variation_value():
    assert total_variation(Pmf.of([0.5, 0.5]), Pmf.of([0.25, 0.75])) == pytest.approx(0.5, abs=1e-15)


def test_pinsker_g_values():
    assert pinsker_g(0.02) == pytest.approx(0.16651, abs=1e-5)
    assert pinsker_g(1 / (2 * math.log(2))) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(DomainError):
        pinsker_g(-0.1)


def test_mismatched_spaces_rejected():
    with pytest.raises(DimensionError):
        kl_divergence(Pmf.uniform(2), Pmf.uniform(3))


def test_mi_matches_oracle():
    rng = np.random.default_rng(1)
    for _ in range(20):
        q = random_pmf(rng, 3)
        w = random_dmc(rng, 3, 4)
        assert mutual_information(Pmf.of(q), w) == pytest.approx(
            oracles.mutual_information(q.tolist(), w.matrix.tolist()), abs=1e-12
        )


def test_conditional_mi_with_constant_u_is_plain_mi():
    rng = np.random.default_rng(2)
    q = random_pmf(rng, 3)
    w = random_dmc(rng, 3, 2)
    assert conditional_mutual_information(q[None, :], w) == pytest.approx(mutual_information(Pmf.of(q), w), abs=1e-12)


seeds = st.integers(0, 2**32 - 1)


def _joint_identity(rng):
    L, k = rng.integers(1, 5), rng.integers(2, 9)
    per = np.vstack([random_pmf(rng, k, zeros=bool(rng.integers(2))) for _ in range(L)])
    ref = random_pmf(rng, k)
    marg = per.mean(axis=0)
    effective = math.fsum(kl_bits(r, ref) for r in per) / L
    conf = mi_from_joint(per / L)
    return effective, conf, kl_bits(marg, ref)


def test_chain_rule_100_random_joints():
    rng = np.random.default_rng(7)
    for _ in range(100):
        eff, conf, st_ = _joint_identity(rng)
        assert abs(eff - conf - st_) <= 1e-9


def test_pinsker_1000_pairs():
    rng = np.random.default_rng(11)
    for _ in range(1000):
        k = int(rng.integers(2, 10))
        p, q = Pmf.of(random_pmf(rng, k)), Pmf.of(random_pmf(rng, k))
        d = kl_divergence(p, q)
        if d.infinite:
            continue
        assert total_variation(p, q) <= pinsker_g(d) + 1e-12


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_nonnegativity(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(2, 6))
    p, q = random_pmf(rng, k, zeros=True), random_pmf(rng, k, zeros=True)
    w = random_dmc(rng, k, 3)
    assert entropy(p) >= -1e-12
    assert kl_bits(p, q) >= -1e-12
    assert mutual_information(Pmf.of(p), w) >= -1e-12
    assert math.isfinite(entropy(p)) and math.isfinite(mutual_information(Pmf.of(p), w))


@settings(max_examples=200, deadline=None)
@given(seeds, st.permutations(range(4)))
def test_mi_invariant_under_output_relabeling(seed, perm):
    rng = np.random.default_rng(seed)
    q = Pmf.of(random_pmf(rng, 3))
    w = random_dmc(rng, 3, 4)
    permuted = Dmc.from_matrix(w.matrix[:, list(perm)])
    assert abs(mutual_information(q, w) - mutual_information(q, permuted)) <= 1e-12


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_chain_rule_property(seed):
    eff, conf, st_ = _joint_identity(np.random.default_rng(seed))
    if math.isinf(eff):
        assert math.isinf(st_)
    else:
        assert abs(eff - conf - st_) <= 1e-9


def test_conditional_mi_brute_force():
    q_uv = np.array([[0.1, 0.3], [0.4, 0.2]])
    w = Dmc.from_matrix([[0.8, 0.2], [0.3, 0.7]])
    total = 0.0
    for u in range(2):
        pu = q_uv[u].sum()
        for v in range(2):
            for y in range(2):
                p_vy = q_uv[u, v] * w.matrix[v, y] / pu
                p_y = sum(q_uv[u, vv] * w.matrix[vv, y] for vv in range(2)) / pu
                if p_vy > 0:
                    total += pu * p_vy * math.log2(w.matrix[v, y] / p_y)
    assert conditional_mutual_information(q_uv, w) == pytest.approx(total, abs=1e-12)
