"""Entropy, mutual information, divergences and the Pinsker stealth bound.

All quantities are in bits. Sums go through ``math.fsum`` so that sequence-space
totals with terms spanning many orders of magnitude stay accurate.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DimensionError, DomainError
from .probcore import Dmc, Pmf, SequenceDist, push_forward


class Bits(float):
    """A value in bits. Divergences may be infinite; check ``.infinite``."""

    @property
    def infinite(self) -> bool:
        return math.isinf(self)

    def __repr__(self) -> str:
        return f"Bits({float(self)!r})"


INFINITE = Bits(math.inf)


def _vec(p) -> np.ndarray:
    if isinstance(p, (Pmf, SequenceDist)):
        return p.probs
    return np.asarray(p, dtype=float).ravel()


def _space(p):
    if isinstance(p, Pmf):
        return p.alphabet
    if isinstance(p, SequenceDist):
        return (p.base, p.n)
    return None


def _same_space(p, q) -> None:
    sp, sq = _space(p), _space(q)
    if sp is not None and sq is not None and sp != sq:
        raise DimensionError("distributions live on different spaces")
    if _vec(p).size != _vec(q).size:
        raise DimensionError("distributions have different lengths")


def entropy(p) -> Bits:
    v = _vec(p)
    s = v[v > 0]
    return Bits(max(0.0, -math.fsum(s * np.log2(s))))


def kl_bits(p: np.ndarray, q: np.ndarray) -> Bits:
    """D(p||q) on raw probability vectors."""
    mask = p > 0
    if np.any(q[mask] <= 0):
        return INFINITE
    pp, qq = p[mask], q[mask]
    return Bits(math.fsum(pp * (np.log2(pp) - np.log2(qq))))


def kl_divergence(p, q) -> Bits:
    _same_space(p, q)
    return kl_bits(_vec(p), _vec(q))


def total_variation(p, q) -> float:
    """Sum of absolute differences (no 1/2 factor, so the range is [0, 2])."""
    _same_space(p, q)
    return math.fsum(np.abs(_vec(p) - _vec(q)))


def pinsker_g(xi2: float) -> float:
    """Variational-distance bound sqrt(2 ln2 * xi2) for a divergence of xi2 bits."""
    if xi2 < 0 or math.isnan(xi2):
        raise DomainError(f"divergence bound must be nonnegative, got {xi2!r}")
    return math.sqrt(xi2 * 2 * math.log(2))


def mi_from_joint(joint: np.ndarray) -> Bits:
    """I(A;B) for a 2-D joint array ``joint[a, b]``."""
    j = np.asarray(joint, dtype=float)
    pa = j.sum(axis=1)
    pb = j.sum(axis=0)
    mask = j > 0
    ratio = j[mask] / np.outer(pa, pb)[mask]
    return Bits(max(0.0, math.fsum(j[mask] * np.log2(ratio))))


def mutual_information(q_x: Pmf, ch: Dmc) -> Bits:
    """I(X;Y) = H(Y) - H(Y|X)."""
    out = push_forward(q_x, ch)
    cond = math.fsum(q_x.probs[x] * entropy(ch.matrix[x]) for x in q_x.support)
    return Bits(max(0.0, entropy(out) - cond))


def conditional_mutual_information(q_uv, ch: Dmc) -> Bits:
    """I(V;Y|U) for a joint ``q_uv[u, v]`` and a channel from V.

    Accepts a 2-D array or a Pmf over U-major (u, v) pairs together with the
    channel's input alphabet size.
    """
    nv = len(ch.input)
    j = _vec(q_uv).reshape(-1, nv) if isinstance(q_uv, Pmf) else np.asarray(q_uv, dtype=float)
    if j.ndim != 2 or j.shape[1] != nv:
        raise DimensionError(f"joint over (U,V) has shape {j.shape}; channel expects |V|={nv}")
    pu = j.sum(axis=1)
    terms = []
    for u in np.flatnonzero(pu > 0):
        cond = Pmf(ch.input, j[u] / pu[u])
        terms.append(pu[u] * mutual_information(cond, ch))
    return Bits(math.fsum(terms))
