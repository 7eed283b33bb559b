"""The eavesdropper's test between "idle" (H0 = Q^n_Z) and "communicating" (H1 = P_{Z^n}).

H0 is accepted on A_F = {z^n : Q(z^n)/P(z^n) > F}, so
alpha = 1 - Q(A_F) (false alarm) and beta = P(A_F) (missed detection).

Ratio conventions on zero-probability atoms: P = 0 < Q gives +inf, Q = 0 < P
gives 0, and atoms with P = Q = 0 also get 0 (they carry no mass either way).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, EnumerationOverflowError, PreconditionError
from .infomeasures import Bits, kl_bits, pinsker_g
from .probcore import Pmf, SequenceDist

AUDIT_MAX_SPACE = 14
TOL = 1e-12


def _probs(d) -> np.ndarray:
    if isinstance(d, (Pmf, SequenceDist)):
        return d.probs
    return np.asarray(d, dtype=float).ravel()


@dataclass(frozen=True, eq=False)
class HypothesisPair:
    h0: np.ndarray  # Q^n_Z, the idle reference
    h1: np.ndarray  # P_{Z^n}, what the eavesdropper sees when the sender talks

    def __post_init__(self):
        h0, h1 = _probs(self.h0), _probs(self.h1)
        if h0.shape != h1.shape:
            raise DimensionError(f"hypotheses on different spaces: {h0.shape} vs {h1.shape}")
        for name, h in (("h0", h0), ("h1", h1)):
            if np.any(h < 0) or abs(math.fsum(h) - 1.0) > 1e-10:
                raise DimensionError(f"{name} is not a normalized distribution")
        object.__setattr__(self, "h0", h0)
        object.__setattr__(self, "h1", h1)

    @property
    def divergence(self) -> Bits:
        """D(P_{Z^n} || Q^n_Z)."""
        return kl_bits(self.h1, self.h0)

    def ratios(self) -> np.ndarray:
        q, p = self.h0, self.h1
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where(p > 0, q / np.where(p > 0, p, 1.0), np.where(q > 0, np.inf, 0.0))
        return r


@dataclass(frozen=True)
class TradeoffPoint:
    threshold: float
    alpha: float
    beta: float
    region_size: int

    @property
    def total(self) -> float:
        return self.alpha + self.beta


def _clip01(x: float) -> float:
    return min(1.0, max(0.0, x))


def np_decision(hp: HypothesisPair, F: float) -> TradeoffPoint:
    if F < 0:
        raise ValueError("threshold F must be nonnegative")
    accept = hp.ratios() > F
    alpha = 1.0 - math.fsum(hp.h0[accept])
    beta = math.fsum(hp.h1[accept])
    return TradeoffPoint(float(F), _clip01(alpha), _clip01(beta), int(accept.sum()))


def tradeoff_curve(hp: HypothesisPair, cap: int = 2**24) -> list[TradeoffPoint]:
    """Deterministic NP points at F = 0 and at every distinct likelihood-ratio value."""
    r = hp.ratios()
    if r.size > cap:
        raise EnumerationOverflowError(r.size, cap)
    order = np.argsort(r, kind="stable")
    r_asc = r[order]
    q_suffix = np.concatenate([np.cumsum(hp.h0[order][::-1])[::-1], [0.0]])
    p_suffix = np.concatenate([np.cumsum(hp.h1[order][::-1])[::-1], [0.0]])
    thresholds = np.unique(np.concatenate([[0.0], r_asc]))
    idx = np.searchsorted(r_asc, thresholds, side="right")
    return [
        TradeoffPoint(float(F), _clip01(1.0 - q_suffix[i]), _clip01(p_suffix[i]), int(r.size - i))
        for F, i in zip(thresholds, idx)
    ]


def min_alpha_plus_beta(hp: HypothesisPair) -> float:
    return min(pt.total for pt in tradeoff_curve(hp))


@dataclass(frozen=True)
class LemmaCheck:
    holds: bool
    g: float
    xi2: float
    divergence: float
    witness: TradeoffPoint | None = None

    def __bool__(self) -> bool:
        return self.holds


def lemma_check(hp: HypothesisPair, xi2: float) -> LemmaCheck:
    """Check 1 - g(xi2) <= alpha + beta <= 1 + g(xi2) on the whole NP curve."""
    div = hp.divergence
    if div > xi2 + TOL:
        raise PreconditionError(f"measured divergence {float(div)!r} exceeds the claimed bound {xi2!r}")
    g = pinsker_g(xi2)
    for pt in tradeoff_curve(hp):
        if not (1 - g - TOL <= pt.total <= 1 + g + TOL):
            return LemmaCheck(False, g, xi2, float(div), pt)
    return LemmaCheck(True, g, xi2, float(div))


@dataclass(frozen=True)
class GuessResult:
    alpha: float
    beta: float
    region_size: int


def guess_detector(hp: HypothesisPair, alpha_target: float, seed: int) -> GuessResult:
    """Pick a region without looking at the likelihood ratio.

    Atoms of supp(Q) are visited in random order and moved into the rejection
    region whenever that brings Q(rejection) closer to ``alpha_target``.
    Atoms outside supp(Q) are always rejected; they cost no false alarms.
    """
    if not 0 <= alpha_target <= 1:
        raise ValueError("alpha_target must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    support = np.flatnonzero(hp.h0 > 0)
    accept = np.zeros(hp.h0.size, dtype=bool)
    accept[support] = True
    acc = 0.0
    for i in rng.permutation(support):
        q = hp.h0[i]
        if abs(acc + q - alpha_target) < abs(acc - alpha_target):
            accept[i] = False
            acc += q
    alpha = 1.0 - math.fsum(hp.h0[accept])
    beta = math.fsum(hp.h1[accept])
    return GuessResult(_clip01(alpha), _clip01(beta), int(accept.sum()))


def np_optimality_audit(hp: HypothesisPair) -> bool:
    """Brute force: no acceptance region beats the NP tradeoff.

    Every region B is compared against the lower envelope of the NP curve,
    i.e. the piecewise-linear interpolation of consecutive deterministic NP
    points (what randomizing on the boundary atom achieves).
    """
    k = hp.h0.size
    if k > AUDIT_MAX_SPACE:
        raise EnumerationOverflowError(2**k, 2**AUDIT_MAX_SPACE, what="region enumeration")
    masks = ((np.arange(2**k)[:, None] >> np.arange(k)) & 1).astype(float)
    alpha_b = 1.0 - masks @ hp.h0
    beta_b = masks @ hp.h1

    curve = tradeoff_curve(hp)
    alphas = np.array([pt.alpha for pt in curve])
    betas = np.array([pt.beta for pt in curve])
    # collapse equal-alpha points to the best beta so interpolation is well defined
    ua, inv = np.unique(alphas, return_inverse=True)
    ub = np.full(ua.size, np.inf)
    np.minimum.at(ub, inv, betas)
    envelope = np.interp(alpha_b, ua, ub)
    return bool(np.all(beta_b >= envelope - 1e-12))
