"""End-to-end runs of the three operating regimes.

* ``stealth_sweep``: randomizer rate above I(X;Z); confusion and stealth both shrink.
* ``example1_mismatch``: codebooks drawn from the wrong input law; the message
  stays hidden but the eavesdropper sees that something is being sent.
* ``example2_leaky``: randomizer rate below I(X;Z) but R + R1 above it; the
  output looks idle while roughly n(I(X;Z) - R1) message bits leak.

Headline numbers are ensemble means over independently drawn codebooks. The
NP curve is evaluated on one representative codebook (the first of each
ensemble).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from .detection import HypothesisPair, min_alpha_plus_beta
from .errors import DomainError
from .infomeasures import kl_divergence, mutual_information
from .probcore import DEFAULT_ENUM_CAP, Dmc, Pmf, WiretapChannel, product_extension, push_forward
from .wiretap_codes import (
    DEFAULT_EPS,
    SECRECY_WORK_CAP,
    CodeParams,
    _mean_half_width,
    ensemble_reports,
    joint_xy,
    per_message_matrix,
    reliability_mc,
)

DEFAULT_CODEBOOKS = 200
DEFAULT_TRIALS = 10_000
DEFAULT_N_LIST = (2, 4, 6, 8)


def canonical_channel(p_y: float = 0.1, p_z: float = 0.3) -> WiretapChannel:
    """BSC(p_y) to the legitimate receiver, BSC(p_z) to the eavesdropper."""
    return WiretapChannel.from_factors(Dmc.bsc(p_y), Dmc.bsc(p_z))


@dataclass(frozen=True)
class RegimeRecord:
    n: int
    L: int
    L1: int
    confusion: float
    stealth: float
    effective: float
    confusion_hw: float
    stealth_hw: float
    effective_hw: float
    error_prob: float
    message_error_prob: float
    alpha_beta_min: float
    identity_residual: float
    single_confusion: float
    single_stealth: float
    single_effective: float
    reference_stealth: float | None = None


@dataclass(frozen=True)
class RegimeResult:
    regime: str
    records: list[RegimeRecord]
    config: dict = field(default_factory=dict)
    single_letter_divergence: float | None = None

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records], dtype=float)

    @property
    def ns(self) -> list[int]:
        return [r.n for r in self.records]

    def to_rows(self) -> list[dict]:
        return [asdict(r) for r in self.records]


def sweep_seed(seed: int, n: int) -> int:
    """Master seed of the ensemble at blocklength n."""
    return int(np.random.SeedSequence([int(seed), int(n)]).generate_state(1, dtype=np.uint64)[0])


def largest_enumerable_n(
    ch: WiretapChannel, R: float, R1: float, cap: int = DEFAULT_ENUM_CAP, work_cap: int = SECRECY_WORK_CAP
) -> int:
    """Largest n whose exact secrecy evaluation fits both the sequence and work caps."""
    nz = len(ch.z_alphabet)
    n = 0
    while True:
        p = CodeParams.from_rates(n + 1, R, R1)
        size = nz ** (n + 1)
        if size > cap or size * p.L * p.L1 > work_cap:
            return n
        n += 1


def _run_regime(
    regime: str,
    ch: WiretapChannel,
    q_code: Pmf,
    q_ref: Pmf,
    R: float,
    R1: float,
    n_list,
    codebooks_per_n: int,
    trials: int,
    seed: int,
    eps: float,
    cap: int,
    single_letter: float | None = None,
) -> RegimeResult:
    q_z_ref = push_forward(q_ref, ch.z_channel)
    joint = joint_xy(q_code, ch)
    per_cb_trials = max(1, math.ceil(trials / codebooks_per_n)) if trials > 0 else 0
    records = []
    for n in sorted(set(int(n) for n in n_list)):
        params = CodeParams.from_rates(n, R, R1, eps)
        s = sweep_seed(seed, n)
        reps = ensemble_reports(q_code, params, ch, q_z_ref, codebooks_per_n, s, cap)

        errs, merrs = [], []
        if per_cb_trials:
            rel_seeds = np.random.SeedSequence([s, 1]).generate_state(len(reps), dtype=np.uint64)
            for (cb, _), rs in zip(reps, rel_seeds):
                est = reliability_mc(cb, ch, joint, per_cb_trials, int(rs))
                errs.append(est.error_prob)
                merrs.append(est.message_error_prob)

        rep_cb, rep = reps[0]
        marginal = per_message_matrix(rep_cb, ch, cap).mean(axis=0)
        hp = HypothesisPair(product_extension(q_z_ref, n, cap).probs, marginal)

        conf, conf_hw = _mean_half_width([r.confusion for _, r in reps])
        st, st_hw = _mean_half_width([r.stealth for _, r in reps])
        eff, eff_hw = _mean_half_width([r.effective for _, r in reps])
        records.append(
            RegimeRecord(
                n=n,
                L=params.L,
                L1=params.L1,
                confusion=conf,
                stealth=st,
                effective=eff,
                confusion_hw=conf_hw,
                stealth_hw=st_hw,
                effective_hw=eff_hw,
                error_prob=float(np.mean(errs)) if errs else math.nan,
                message_error_prob=float(np.mean(merrs)) if merrs else math.nan,
                alpha_beta_min=min_alpha_plus_beta(hp),
                identity_residual=max(r.identity_residual for _, r in reps),
                single_confusion=float(rep.confusion),
                single_stealth=float(rep.stealth),
                single_effective=float(rep.effective),
                reference_stealth=None if single_letter is None else n * single_letter,
            )
        )
    config = {
        "regime": regime,
        "channel_joint": np.asarray(ch.joint).tolist(),
        "q_code": q_code.probs.tolist(),
        "q_ref": q_ref.probs.tolist(),
        "R": R,
        "R1": R1,
        "n_list": [r.n for r in records],
        "codebooks_per_n": codebooks_per_n,
        "trials": trials,
        "seed": seed,
        "eps": eps,
    }
    return RegimeResult(regime, records, config, single_letter)


def stealth_sweep(
    ch: WiretapChannel,
    q_x: Pmf,
    R: float,
    R1: float,
    n_list=DEFAULT_N_LIST,
    codebooks_per_n: int = DEFAULT_CODEBOOKS,
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    eps: float = DEFAULT_EPS,
    cap: int = DEFAULT_ENUM_CAP,
) -> RegimeResult:
    ixz = mutual_information(q_x, ch.z_channel)
    ixy = mutual_information(q_x, ch.y_channel)
    if not R1 > ixz:
        warnings.warn(f"R1={R1:.4f} does not exceed I(X;Z)={ixz:.4f}; confusion need not vanish", RuntimeWarning)
    if not R + R1 < ixy:
        warnings.warn(f"R+R1={R + R1:.4f} is not below I(X;Y)={ixy:.4f}; decoding may fail", RuntimeWarning)
    return _run_regime("stealth", ch, q_x, q_x, R, R1, n_list, codebooks_per_n, trials, seed, eps, cap)


def example1_mismatch(
    ch: WiretapChannel,
    q_x_intended: Pmf,
    q_x_actual: Pmf,
    R: float,
    R1: float,
    n_list=DEFAULT_N_LIST,
    codebooks_per_n: int = DEFAULT_CODEBOOKS,
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    eps: float = DEFAULT_EPS,
    cap: int = DEFAULT_ENUM_CAP,
) -> RegimeResult:
    """Codebooks drawn from ``q_x_actual``, stealth judged against ``q_x_intended``."""
    ixz = mutual_information(q_x_actual, ch.z_channel)
    if not R1 > ixz:
        warnings.warn(f"R1={R1:.4f} does not exceed I(X;Z)={ixz:.4f} under the actual input", RuntimeWarning)
    d = kl_divergence(push_forward(q_x_actual, ch.z_channel), push_forward(q_x_intended, ch.z_channel))
    return _run_regime(
        "example1", ch, q_x_actual, q_x_intended, R, R1, n_list, codebooks_per_n, trials, seed, eps, cap,
        single_letter=float(d),
    )


def example2_leaky(
    ch: WiretapChannel,
    q_x: Pmf,
    R: float,
    R1: float,
    n_list=DEFAULT_N_LIST,
    codebooks_per_n: int = DEFAULT_CODEBOOKS,
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    eps: float = DEFAULT_EPS,
    cap: int = DEFAULT_ENUM_CAP,
) -> RegimeResult:
    ixz = float(mutual_information(q_x, ch.z_channel))
    if not R1 < ixz < R + R1:
        raise DomainError(f"need R1 < I(X;Z) < R + R1, got R1={R1}, I(X;Z)={ixz:.6f}, R+R1={R + R1}")
    return _run_regime("example2", ch, q_x, q_x, R, R1, n_list, codebooks_per_n, trials, seed, eps, cap)
