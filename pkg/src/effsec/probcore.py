"""Finite-alphabet probability objects.

Pmfs, discrete memoryless channels, wiretap channels and distributions over
length-n sequences. Everything here is immutable once built; arrays are
flagged read-only.

Sequences over an alphabet of size k are indexed lexicographically with the
first symbol most significant, i.e. ``index = sum(a_i * k**(n-1-i))``. This is
the C-order ravel of an ``(k,)*n`` array, so ``np.indices`` and
``itertools.product`` enumerate in the same order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

import numpy as np

from .errors import DimensionError, DomainError, EnumerationOverflowError

DEFAULT_ENUM_CAP = 2**24

# Pmf inputs within this distance of unit mass are renormalized, beyond it rejected.
NORMALIZE_TOL = 1e-9


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple[Hashable, ...]

    def __post_init__(self):
        syms = tuple(self.symbols)
        if not syms:
            raise DomainError("alphabet must be nonempty")
        if len(set(syms)) != len(syms):
            raise DomainError(f"alphabet labels must be distinct: {syms!r}")
        object.__setattr__(self, "symbols", syms)

    @classmethod
    def range(cls, k: int) -> "Alphabet":
        return cls(tuple(range(k)))

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def index(self, symbol) -> int:
        return self.symbols.index(symbol)


def _normalized(probs, what: str = "pmf") -> np.ndarray:
    p = np.asarray(probs, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise DimensionError(f"{what} must be a nonempty vector, got shape {p.shape}")
    if not np.all(np.isfinite(p)) or np.any(p < 0):
        raise DomainError(f"{what} has negative or non-finite entries: {p.tolist()}")
    total = float(p.sum())
    if abs(total - 1.0) > NORMALIZE_TOL:
        raise DomainError(f"{what} sums to {total!r}, not 1")
    return p / total


@dataclass(frozen=True, eq=False)
class Pmf:
    """Probability mass function over a finite labeled alphabet."""

    alphabet: Alphabet
    probs: np.ndarray

    def __post_init__(self):
        p = _normalized(self.probs)
        if p.size != len(self.alphabet):
            raise DimensionError(
                f"pmf has {p.size} entries for an alphabet of size {len(self.alphabet)}"
            )
        object.__setattr__(self, "probs", _frozen(p))

    @classmethod
    def of(cls, probs: Sequence[float], labels: Iterable[Hashable] | None = None) -> "Pmf":
        probs = list(probs)
        alpha = Alphabet(tuple(labels)) if labels is not None else Alphabet.range(len(probs))
        return cls(alpha, np.asarray(probs, dtype=float))

    @classmethod
    def uniform(cls, alphabet: Alphabet | int) -> "Pmf":
        if isinstance(alphabet, int):
            alphabet = Alphabet.range(alphabet)
        k = len(alphabet)
        return cls(alphabet, np.full(k, 1.0 / k))

    @classmethod
    def point(cls, alphabet: Alphabet | int, index: int) -> "Pmf":
        if isinstance(alphabet, int):
            alphabet = Alphabet.range(alphabet)
        p = np.zeros(len(alphabet))
        p[index] = 1.0
        return cls(alphabet, p)

    def __len__(self) -> int:
        return len(self.alphabet)

    def __getitem__(self, i: int) -> float:
        return float(self.probs[i])

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.probs > 0)

    def allclose(self, other: "Pmf", atol: float = 1e-12) -> bool:
        return self.alphabet == other.alphabet and np.allclose(self.probs, other.probs, rtol=0, atol=atol)


@dataclass(frozen=True, eq=False)
class Dmc:
    """Discrete memoryless channel; ``matrix[x, y] = W(y|x)``."""

    input: Alphabet
    output: Alphabet
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (len(self.input), len(self.output)):
            raise DimensionError(
                f"channel matrix shape {m.shape} does not match alphabets "
                f"({len(self.input)}, {len(self.output)})"
            )
        rows = [_normalized(r, what=f"channel row {i}") for i, r in enumerate(m)]
        object.__setattr__(self, "matrix", _frozen(np.vstack(rows)))

    @classmethod
    def from_matrix(cls, matrix) -> "Dmc":
        m = np.asarray(matrix, dtype=float)
        if m.ndim != 2:
            raise DimensionError(f"channel matrix must be 2-D, got shape {m.shape}")
        return cls(Alphabet.range(m.shape[0]), Alphabet.range(m.shape[1]), m)

    @classmethod
    def bsc(cls, p: float) -> "Dmc":
        return cls.from_matrix([[1 - p, p], [p, 1 - p]])

    @classmethod
    def identity(cls, alphabet: Alphabet | int) -> "Dmc":
        if isinstance(alphabet, int):
            alphabet = Alphabet.range(alphabet)
        return cls(alphabet, alphabet, np.eye(len(alphabet)))

    @property
    def rows(self) -> list[Pmf]:
        return [Pmf(self.output, r) for r in self.matrix]

    def then(self, other: "Dmc") -> "Dmc":
        """Serial concatenation: this channel followed by ``other``."""
        if self.output != other.input:
            raise DimensionError("output alphabet of the first channel must feed the second")
        return Dmc(self.input, other.output, self.matrix @ other.matrix)


@dataclass(frozen=True, eq=False)
class WiretapChannel:
    """Joint law ``joint[x, y, z] = Q(y, z | x)``."""

    input: Alphabet
    y_alphabet: Alphabet
    z_alphabet: Alphabet
    joint: np.ndarray

    def __post_init__(self):
        j = np.asarray(self.joint, dtype=float)
        shape = (len(self.input), len(self.y_alphabet), len(self.z_alphabet))
        if j.shape != shape:
            raise DimensionError(f"joint array shape {j.shape} does not match alphabets {shape}")
        flat = np.vstack([_normalized(r, what=f"joint row {i}") for i, r in enumerate(j.reshape(shape[0], -1))])
        object.__setattr__(self, "joint", _frozen(flat.reshape(shape)))

    @classmethod
    def from_factors(cls, y_channel: Dmc, z_channel: Dmc) -> "WiretapChannel":
        """Conditionally independent outputs: Q(y,z|x) = Q(y|x) Q(z|x)."""
        if y_channel.input != z_channel.input:
            raise DimensionError("factor channels must share the input alphabet")
        joint = y_channel.matrix[:, :, None] * z_channel.matrix[:, None, :]
        return cls(y_channel.input, y_channel.output, z_channel.output, joint)

    @property
    def y_channel(self) -> Dmc:
        return Dmc(self.input, self.y_alphabet, self.joint.sum(axis=2))

    @property
    def z_channel(self) -> Dmc:
        return Dmc(self.input, self.z_alphabet, self.joint.sum(axis=1))


def marginal_channels(ch: WiretapChannel) -> tuple[Dmc, Dmc]:
    return ch.y_channel, ch.z_channel


def push_forward(q_x: Pmf, ch: Dmc) -> Pmf:
    """Output law of ``ch`` when its input is drawn from ``q_x``."""
    if q_x.alphabet != ch.input:
        raise DimensionError("input pmf alphabet differs from the channel input alphabet")
    return Pmf(ch.output, q_x.probs @ ch.matrix)


def compose_prefix(prefix: Dmc, ch: WiretapChannel) -> WiretapChannel:
    """Channel from V obtained by placing ``prefix`` (V -> X) before ``ch``."""
    if prefix.output != ch.input:
        raise DimensionError("prefix output alphabet differs from the wiretap input alphabet")
    joint = np.einsum("vx,xyz->vyz", prefix.matrix, ch.joint)
    return WiretapChannel(prefix.input, ch.y_alphabet, ch.z_alphabet, joint)


# --- sequence spaces -------------------------------------------------------


def check_cap(k: int, n: int, cap: int = DEFAULT_ENUM_CAP, what: str = "sequence space") -> int:
    size = k**n
    if size > cap:
        raise EnumerationOverflowError(size, cap, what)
    return size


def all_sequences(k: int, n: int, cap: int = DEFAULT_ENUM_CAP) -> np.ndarray:
    """Every length-n sequence over ``range(k)``, shape ``(k**n, n)``, in index order."""
    check_cap(k, n, cap)
    return np.indices((k,) * n).reshape(n, -1).T


def sequence_index(seq: Sequence[int], k: int) -> int:
    idx = 0
    for a in seq:
        idx = idx * k + int(a)
    return idx


@dataclass(frozen=True, eq=False)
class SequenceDist:
    """Dense distribution over all length-n sequences of ``base``."""

    base: Alphabet
    n: int
    probs: np.ndarray

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("blocklength must be >= 1")
        p = np.asarray(self.probs, dtype=float)
        size = len(self.base) ** self.n
        if p.shape != (size,):
            raise DimensionError(f"expected {size} sequence probabilities, got shape {p.shape}")
        if np.any(p < 0) or abs(float(np.sum(p)) - 1.0) > 1e-10:
            raise DomainError(f"sequence distribution mass is {float(np.sum(p))!r}")
        object.__setattr__(self, "probs", _frozen(p))

    def __len__(self) -> int:
        return self.probs.size

    def prob(self, seq: Sequence[int]) -> float:
        return float(self.probs[sequence_index(seq, len(self.base))])


def product_extension(p: Pmf, n: int, cap: int = DEFAULT_ENUM_CAP) -> SequenceDist:
    """The i.i.d. law P^n as a dense sequence distribution."""
    check_cap(len(p), n, cap)
    out = np.ones(1)
    for _ in range(n):
        out = np.multiply.outer(out, p.probs).ravel()
    return SequenceDist(p.alphabet, n, out)


def is_typical(seq: Sequence[int], p: Pmf, eps: float) -> bool:
    """Letter-typicality: ``|N(a|x^n)/n - P(a)| <= eps * P(a)`` for every symbol a."""
    x = np.asarray(seq, dtype=int)
    counts = np.bincount(x, minlength=len(p))
    if counts.size > len(p):
        return False
    freq = counts / x.size
    # 1e-12 absorbs float roundoff only; a zero-probability symbol still fails.
    return bool(np.all(np.abs(freq - p.probs) <= eps * p.probs + 1e-12))
