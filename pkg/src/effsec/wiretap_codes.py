"""Random wiretap codes: construction, encoding, typicality decoding, and
exact evaluation of confusion, stealth and effective secrecy.

Message and randomizer indices are 1-based at the public surface (``encode``,
``decode_typicality``) and 0-based in arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError, EnumerationOverflowError, ResourceError
from .infomeasures import Bits, kl_bits
from .probcore import (
    DEFAULT_ENUM_CAP,
    Pmf,
    SequenceDist,
    WiretapChannel,
    all_sequences,
    check_cap,
    product_extension,
    push_forward,
)

DEFAULT_EPS = 0.2
CODEBOOK_SYMBOL_CAP = 2**26
# |Z|^n * L * L1 work bound for exact secrecy evaluation
SECRECY_WORK_CAP = 2**26
# likelihood rows materialized at once, in doubles
LIKELIHOOD_CHUNK = 2**22


@dataclass(frozen=True)
class CodeParams:
    n: int
    R: float
    R1: float
    L: int
    L1: int
    eps: float = DEFAULT_EPS

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("blocklength n must be >= 1")
        if self.L < 1 or self.L1 < 1:
            raise DomainError(f"codebook sizes must be >= 1, got L={self.L}, L1={self.L1}")
        if self.eps < 0:
            raise DomainError("typicality slack eps must be >= 0")
        if self.L * self.L1 * self.n > CODEBOOK_SYMBOL_CAP:
            raise ResourceError(
                f"codebook needs {self.L * self.L1 * self.n} symbols, cap is {CODEBOOK_SYMBOL_CAP}"
            )

    @classmethod
    def from_rates(cls, n: int, R: float, R1: float, eps: float = DEFAULT_EPS) -> "CodeParams":
        """L = round(2^{nR}), L1 = round(2^{nR1}), never below 1."""
        L = max(1, int(round(2.0 ** (n * R))))
        L1 = max(1, int(round(2.0 ** (n * R1))))
        return cls(n, R, R1, L, L1, eps)

    @classmethod
    def from_sizes(cls, n: int, L: int, L1: int, eps: float = DEFAULT_EPS) -> "CodeParams":
        return cls(n, math.log2(L) / n, math.log2(L1) / n, L, L1, eps)


@dataclass(frozen=True, eq=False)
class Codebook:
    params: CodeParams
    words: np.ndarray  # (L, L1, n) input-symbol indices
    gen_seed: int | None = None

    def __post_init__(self):
        w = np.asarray(self.words, dtype=np.int64)
        p = self.params
        if w.shape != (p.L, p.L1, p.n):
            raise DimensionError(f"codebook shape {w.shape} != {(p.L, p.L1, p.n)}")
        w.setflags(write=False)
        object.__setattr__(self, "words", w)

    @property
    def flat(self) -> np.ndarray:
        """Codewords as rows, m-major / w-minor."""
        return self.words.reshape(-1, self.params.n)


@dataclass(frozen=True)
class SecrecyReport:
    confusion: Bits
    stealth: Bits
    effective: Bits
    identity_residual: float


@dataclass(frozen=True)
class ReliabilityEstimate:
    error_prob: float
    trials: int
    half_width: float
    message_error_prob: float
    message_half_width: float


def _half_width(p: float, trials: int) -> float:
    return 1.96 * math.sqrt(max(p * (1 - p), 0.0) / trials)


def generate_codebook(q_x: Pmf, params: CodeParams, seed: int) -> Codebook:
    rng = np.random.default_rng(seed)
    words = rng.choice(len(q_x), size=(params.L, params.L1, params.n), p=q_x.probs)
    return Codebook(params, words, seed)


def encode(cb: Codebook, m: int, w: int) -> np.ndarray:
    L, L1 = cb.params.L, cb.params.L1
    if not (1 <= m <= L and 1 <= w <= L1):
        raise IndexError(f"(m, w)=({m}, {w}) outside 1..{L} x 1..{L1}")
    return cb.words[m - 1, w - 1]


def joint_xy(q_x: Pmf, ch: WiretapChannel) -> Pmf:
    """Q_X * Q_{Y|X} as a pmf over x-major (x, y) pairs."""
    j = q_x.probs[:, None] * ch.y_channel.matrix
    return Pmf.of(j.ravel(), [(x, y) for x in ch.input for y in ch.y_alphabet])


def _typical_mask(words: np.ndarray, y: np.ndarray, joint: np.ndarray, ny: int, eps: float) -> np.ndarray:
    """Letter-typicality of each (codeword, y) pair; words (C, n), y (..., n) -> (..., C)."""
    n = words.shape[-1]
    pairs = words * ny + y[..., None, :]
    k = joint.size
    counts = (pairs[..., None] == np.arange(k)).sum(axis=-2)
    freq = counts / n
    ok = np.abs(freq - joint) <= eps * joint + 1e-12
    return ok.all(axis=-1)


def decode_typicality(cb: Codebook, y_seq, joint: Pmf, eps: float | None = None) -> tuple[int, int]:
    """Unique jointly-typical (m, w), else the fallback (1, 1)."""
    eps = cb.params.eps if eps is None else eps
    y = np.asarray(y_seq, dtype=np.int64)
    if y.shape != (cb.params.n,):
        raise DimensionError(f"received sequence must have length {cb.params.n}")
    ny = _y_size(cb, joint)
    hits = np.flatnonzero(_typical_mask(cb.flat, y, joint.probs, ny, eps))
    if hits.size != 1:
        return (1, 1)
    m, w = divmod(int(hits[0]), cb.params.L1)
    return (m + 1, w + 1)


def _y_size(cb: Codebook, joint: Pmf) -> int:
    labels = joint.alphabet.symbols
    if labels and isinstance(labels[0], tuple):
        return len({lab[1] for lab in labels})
    raise DimensionError("joint pmf must be labeled by (x, y) pairs; build it with joint_xy")


def _sample_rows(rng: np.random.Generator, matrix: np.ndarray, inputs: np.ndarray) -> np.ndarray:
    cdf = np.cumsum(matrix, axis=1)
    cdf[:, -1] = 1.0
    u = rng.random(inputs.shape)
    return (u[..., None] >= cdf[inputs]).sum(axis=-1)


def reliability_mc(
    cb: Codebook, ch: WiretapChannel, joint: Pmf, trials: int, seed: int, eps: float | None = None, batch: int = 2048
) -> ReliabilityEstimate:
    """Monte Carlo pair- and message-error rates of the typicality decoder."""
    if trials < 1:
        raise DomainError("trials must be >= 1")
    eps = cb.params.eps if eps is None else eps
    L, L1 = cb.params.L, cb.params.L1
    ny = _y_size(cb, joint)
    wy = ch.y_channel.matrix
    flat = cb.flat
    rng = np.random.default_rng(seed)
    pair_err = msg_err = 0
    done = 0
    while done < trials:
        b = min(batch, trials - done)
        m = rng.integers(0, L, size=b)
        w = rng.integers(0, L1, size=b)
        sent = m * L1 + w
        y = _sample_rows(rng, wy, flat[sent])
        mask = _typical_mask(flat, y, joint.probs, ny, eps)
        unique = mask.sum(axis=1) == 1
        decoded = np.where(unique, mask.argmax(axis=1), 0)
        pair_err += int(np.count_nonzero(decoded != sent))
        msg_err += int(np.count_nonzero(decoded // L1 != m))
        done += b
    pe, pm = pair_err / trials, msg_err / trials
    return ReliabilityEstimate(pe, trials, _half_width(pe, trials), pm, _half_width(pm, trials))


# --- induced eavesdropper distributions -----------------------------------


def _check_work(cb: Codebook, nz: int, cap: int) -> int:
    size = check_cap(nz, cb.params.n, cap, what="eavesdropper sequence space")
    work = size * cb.params.L * cb.params.L1
    if work > SECRECY_WORK_CAP:
        raise EnumerationOverflowError(work, SECRECY_WORK_CAP, what="|Z|^n * L * L1 secrecy evaluation")
    return size


def _word_likelihoods(words: np.ndarray, wz: np.ndarray) -> np.ndarray:
    """Q^n_{Z|X}(z^n | word) for every word (rows) and every z^n (columns)."""
    acc = np.ones((words.shape[0], 1))
    for i in range(words.shape[1]):
        acc = (acc[:, :, None] * wz[words[:, i]][:, None, :]).reshape(words.shape[0], -1)
    return acc


def per_message_matrix(cb: Codebook, ch: WiretapChannel, cap: int = DEFAULT_ENUM_CAP) -> np.ndarray:
    """Array ``P[m, z^n]`` of the per-message eavesdropper laws."""
    wz = ch.z_channel.matrix
    size = _check_work(cb, wz.shape[1], cap)
    chunk = max(1, LIKELIHOOD_CHUNK // size)
    L1 = cb.params.L1
    out = np.empty((cb.params.L, size))
    for m in range(cb.params.L):
        acc = np.zeros(size)
        for start in range(0, L1, chunk):
            acc += _word_likelihoods(cb.words[m, start : start + chunk], wz).sum(axis=0)
        out[m] = acc / L1
    return out


def induced_distributions(
    cb: Codebook, ch: WiretapChannel, cap: int = DEFAULT_ENUM_CAP
) -> tuple[list[SequenceDist], SequenceDist]:
    per = per_message_matrix(cb, ch, cap)
    base, n = ch.z_alphabet, cb.params.n
    return [SequenceDist(base, n, row) for row in per], SequenceDist(base, n, per.mean(axis=0))


def secrecy_from_matrix(per: np.ndarray, q_ref: np.ndarray) -> SecrecyReport:
    """Confusion, stealth and effective divergence from ``P[m, z^n]`` and Q^n_Z, uniform M."""
    L = per.shape[0]
    marginal = per.mean(axis=0)
    confusion = math.fsum(kl_bits(row, marginal) for row in per) / L
    stealth = kl_bits(marginal, q_ref)
    effective = math.fsum(kl_bits(row, q_ref) for row in per) / L
    if math.isinf(effective) or math.isinf(stealth):
        residual = 0.0 if math.isinf(effective) and math.isinf(stealth) else math.inf
    else:
        residual = abs(effective - confusion - stealth)
    return SecrecyReport(Bits(max(confusion, 0.0)), Bits(stealth), Bits(effective), residual)


def secrecy_report(cb: Codebook, ch: WiretapChannel, q_z_ref: Pmf, cap: int = DEFAULT_ENUM_CAP) -> SecrecyReport:
    if q_z_ref.alphabet != ch.z_alphabet:
        raise DimensionError("reference pmf must live on the eavesdropper alphabet")
    per = per_message_matrix(cb, ch, cap)
    q_ref = product_extension(q_z_ref, cb.params.n, cap).probs
    return secrecy_from_matrix(per, q_ref)


def _mean_half_width(values: list[float]) -> tuple[float, float]:
    arr = np.asarray(values, dtype=float)
    mean = math.fsum(arr) / arr.size
    if arr.size < 2 or not np.all(np.isfinite(arr)):
        return mean, (0.0 if arr.size < 2 else math.inf)
    return mean, 1.96 * float(arr.std(ddof=1)) / math.sqrt(arr.size)


def codebook_seeds(seed: int, count: int) -> list[int]:
    """Independent per-codebook seeds derived from one master seed."""
    ss = np.random.SeedSequence(int(seed))
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in ss.spawn(count)]


def ensemble_reports(
    q_x: Pmf, params: CodeParams, ch: WiretapChannel, q_z_ref: Pmf, num_codebooks: int, seed: int,
    cap: int = DEFAULT_ENUM_CAP,
) -> list[tuple[Codebook, SecrecyReport]]:
    q_ref = product_extension(q_z_ref, params.n, cap).probs
    out = []
    for s in codebook_seeds(seed, num_codebooks):
        cb = generate_codebook(q_x, params, s)
        out.append((cb, secrecy_from_matrix(per_message_matrix(cb, ch, cap), q_ref)))
    return out


def ensemble_average_divergence(
    q_x: Pmf, params: CodeParams, ch: WiretapChannel, q_z_ref: Pmf, num_codebooks: int, seed: int,
    cap: int = DEFAULT_ENUM_CAP,
) -> tuple[float, float]:
    """Mean effective divergence over random codebooks and its 95% half-width."""
    reps = ensemble_reports(q_x, params, ch, q_z_ref, num_codebooks, seed, cap)
    return _mean_half_width([r.effective for _, r in reps])


def jensen_upper_bound(
    q_x: Pmf, L1: int, n: int, ch: WiretapChannel, cap: int = DEFAULT_ENUM_CAP,
    mc_samples: int | None = None, seed: int = 0,
) -> tuple[Bits, float]:
    """E[log2(Q(Z^n|X^n) / (L1 Q(Z^n)) + 1)] under i.i.d. (X, Z) ~ Q_X Q_{Z|X}.

    Exact by enumerating (x, z) pair sequences when they fit under ``cap``;
    otherwise Monte Carlo with ``mc_samples`` draws. Returns (value, half-width);
    the half-width is 0 for the exact path.
    """
    wz = ch.z_channel.matrix
    q_z = push_forward(q_x, ch.z_channel).probs
    pxz = q_x.probs[:, None] * wz
    with np.errstate(divide="ignore"):
        log_ratio = np.where(pxz > 0, np.log2(np.where(wz > 0, wz, 1.0)) - np.log2(np.where(q_z > 0, q_z, 1.0)), 0.0)
    pair_p, pair_lr = pxz.ravel(), log_ratio.ravel()
    shift = math.log2(L1)
    k = pair_p.size
    if k**n <= cap:
        seqs = all_sequences(k, n, cap)
        logp = np.zeros(seqs.shape[0])
        lr = np.zeros(seqs.shape[0])
        with np.errstate(divide="ignore"):
            lp = np.log(pair_p)
        for i in range(n):
            logp += lp[seqs[:, i]]
            lr += pair_lr[seqs[:, i]]
        keep = np.isfinite(logp)
        vals = np.logaddexp2(0.0, lr[keep] - shift)
        return Bits(math.fsum(np.exp(logp[keep]) * vals)), 0.0
    if mc_samples is None:
        raise EnumerationOverflowError(k**n, cap, what="(X, Z) pair-sequence space")
    rng = np.random.default_rng(seed)
    draws = rng.choice(k, size=(mc_samples, n), p=pair_p)
    vals = np.logaddexp2(0.0, pair_lr[draws].sum(axis=1) - shift)
    return Bits(float(vals.mean())), 1.96 * float(vals.std(ddof=1)) / math.sqrt(mc_samples)
