"""Secrecy-capacity optimization for the wiretap channel and the BCC region.

The objective I(V;Y) - I(V;Z) is not concave in the input law, so the search
combines a deterministic simplex grid with Nelder-Mead polishing from the best
grid points and from seeded random restarts. Probability vectors are
parametrized as ``theta**2 / sum(theta**2)`` so the polish can reach the
boundary of the simplex.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize

from .errors import DimensionError, DomainError
from .infomeasures import Bits, conditional_mutual_information, mutual_information
from .probcore import Alphabet, Dmc, Pmf, WiretapChannel, compose_prefix

TOP_K = 10
MAX_GRID_POINTS = 60_000


@dataclass(frozen=True, eq=False)
class PrefixedInput:
    q_v: Pmf
    prefix: Dmc

    def __post_init__(self):
        if self.prefix.input != self.q_v.alphabet:
            raise DimensionError("prefix input alphabet must be the auxiliary alphabet")
        if len(self.q_v) > len(self.prefix.output):
            raise DomainError(
                f"|V|={len(self.q_v)} exceeds the cardinality bound |X|={len(self.prefix.output)}"
            )

    @classmethod
    def direct(cls, q_x: Pmf) -> "PrefixedInput":
        return cls(q_x, Dmc.identity(q_x.alphabet))


@dataclass(frozen=True, eq=False)
class BccInput:
    q_u: Pmf
    cond_v: Dmc
    prefix: Dmc

    def __post_init__(self):
        nx = len(self.prefix.output)
        if self.cond_v.input != self.q_u.alphabet or self.prefix.input != self.cond_v.output:
            raise DimensionError("U -> V -> X chain alphabets do not line up")
        check_bcc_sizes(nx, len(self.q_u), len(self.cond_v.output))


@dataclass(frozen=True, eq=False)
class CapacityResult:
    value: Bits
    argmax: PrefixedInput
    optimizer_trace: list[tuple[int, float]] = field(default_factory=list)


class BccPoint(NamedTuple):
    R0: Bits
    R: Bits
    argmax: BccInput


def check_bcc_sizes(nx: int, u_size: int, v_size: int) -> None:
    if not 1 <= u_size <= nx + 3:
        raise DomainError(f"|U|={u_size} outside 1..|X|+3={nx + 3}")
    if not 1 <= v_size <= nx * nx + 4 * nx + 3:
        raise DomainError(f"|V|={v_size} outside 1..|X|^2+4|X|+3={nx * nx + 4 * nx + 3}")


def secrecy_objective(inp: PrefixedInput, ch: WiretapChannel) -> Bits:
    """I(V;Y) - I(V;Z) through the prefixed channel; may be negative."""
    if inp.prefix.output != ch.input:
        raise DimensionError("prefix output alphabet differs from the channel input alphabet")
    composed = compose_prefix(inp.prefix, ch)
    return Bits(mutual_information(inp.q_v, composed.y_channel) - mutual_information(inp.q_v, composed.z_channel))


# --- batched evaluation -----------------------------------------------------


def _xlogx(a: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(a > 0, a * np.log2(np.where(a > 0, a, 1.0)), 0.0)


def _mi_batch(q: np.ndarray, w: np.ndarray) -> np.ndarray:
    """I(V;Y) for inputs ``q[b, v]`` through channels ``w[b, v, y]`` (or a shared ``w[v, y]``)."""
    if w.ndim == 2:
        out = q @ w
        h_rows = -_xlogx(w).sum(axis=-1)
        cond = q @ h_rows
    else:
        out = np.einsum("bv,bvy->by", q, w)
        h_rows = -_xlogx(w).sum(axis=-1)
        cond = np.einsum("bv,bv->b", q, h_rows)
    return -_xlogx(out).sum(axis=-1) - cond


def _prefixed_batch(q_v: np.ndarray, prefix: np.ndarray, qy: np.ndarray, qz: np.ndarray) -> np.ndarray:
    wy = prefix @ qy
    wz = prefix @ qz
    return _mi_batch(q_v, wy) - _mi_batch(q_v, wz)


def simplex_grid(k: int, resolution: int) -> np.ndarray:
    """All points of the k-simplex with coordinates in multiples of 1/resolution, lexicographic."""
    pts = [
        c
        for c in itertools.product(range(resolution + 1), repeat=k - 1)
        if sum(c) <= resolution
    ]
    arr = np.array(pts, dtype=float).reshape(len(pts), k - 1)
    last = resolution - arr.sum(axis=1, keepdims=True)
    return np.hstack([arr, last]) / resolution


def _grid_size(k: int, resolution: int) -> int:
    return math.comb(resolution + k - 1, k - 1)


def _to_simplex(theta: np.ndarray) -> np.ndarray:
    s = theta * theta
    tot = s.sum()
    return s / tot if tot > 0 else np.full(theta.size, 1.0 / theta.size)


class _Blocks:
    """Packs several probability vectors / stochastic matrices into one flat vector."""

    def __init__(self, shapes: list[tuple[int, int]]):
        self.shapes = shapes
        self.sizes = [r * c for r, c in shapes]

    def unpack(self, theta: np.ndarray) -> list[np.ndarray]:
        out, i = [], 0
        for (r, c), s in zip(self.shapes, self.sizes):
            block = theta[i : i + s].reshape(r, c)
            out.append(np.vstack([_to_simplex(row) for row in block]))
            i += s
        return out

    def pack(self, mats: list[np.ndarray]) -> np.ndarray:
        return np.concatenate([np.sqrt(np.clip(np.asarray(m, float), 0, None)).ravel() for m in mats])

    def random(self, rng: np.random.Generator) -> list[np.ndarray]:
        return [rng.dirichlet(np.ones(c), size=r) for r, c in self.shapes]


def _polish(fun, blocks: _Blocks, start: list[np.ndarray]) -> tuple[float, list[np.ndarray]]:
    x0 = blocks.pack(start)
    f0 = fun(blocks.unpack(x0))
    res = minimize(
        lambda th: -fun(blocks.unpack(th)),
        x0,
        method="Nelder-Mead",
        options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 4000 * x0.size, "adaptive": True},
    )
    best = blocks.unpack(res.x)
    fbest = fun(best)
    if fbest < f0:
        return f0, blocks.unpack(x0)
    return fbest, best


def _sub_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(index)])


def _run_starts(fun, blocks: _Blocks, starts: list[list[np.ndarray]]):
    """Polish every start; return (best value, best params, trace). Ties keep the earliest start."""
    trace: list[tuple[int, float]] = []
    best_val, best_par = -math.inf, None
    for i, st in enumerate(starts):
        val, par = _polish(fun, blocks, st)
        trace.append((i, float(val)))
        if val > best_val:
            best_val, best_par = val, par
    return best_val, best_par, trace


def _top_grid(values: np.ndarray, k: int) -> np.ndarray:
    order = np.argsort(-values, kind="stable")
    return order[:k]


# --- Theorem-1 style maximization ------------------------------------------


def _clamped_result(ch: WiretapChannel, inp: PrefixedInput, trace) -> CapacityResult:
    val = secrecy_objective(inp, ch)
    if val <= 0:
        # point mass on the first auxiliary symbol makes both informations vanish
        inp = PrefixedInput(Pmf.point(inp.q_v.alphabet, 0), inp.prefix)
        val = secrecy_objective(inp, ch)
    return CapacityResult(Bits(max(0.0, val)), inp, trace)


def maximize_direct(
    ch: WiretapChannel, grid_resolution: int = 20, restarts: int = 4, seed: int = 0
) -> CapacityResult:
    """max over Q_X of I(X;Y) - I(X;Z), clamped at zero."""
    nx = len(ch.input)
    qy, qz = ch.y_channel.matrix, ch.z_channel.matrix
    res = grid_resolution
    while res > 1 and _grid_size(nx, res) > MAX_GRID_POINTS:
        res -= 1
    grid = simplex_grid(nx, res)
    vals = _mi_batch(grid, qy) - _mi_batch(grid, qz)

    blocks = _Blocks([(1, nx)])
    fun = lambda par: float(_prefixed_batch(par[0], np.eye(nx), qy, qz)[0])
    starts = [[grid[i : i + 1]] for i in _top_grid(vals, TOP_K)]
    starts += [blocks.random(_sub_rng(seed, r)) for r in range(restarts)]
    _, par, trace = _run_starts(fun, blocks, starts)
    return _clamped_result(ch, PrefixedInput.direct(Pmf(ch.input, par[0][0])), trace)


def maximize_prefixed(
    ch: WiretapChannel,
    v_size: int | None = None,
    grid_resolution: int = 20,
    restarts: int = 4,
    seed: int = 0,
) -> CapacityResult:
    """max over (Q_V, Q_{X|V}) of I(V;Y) - I(V;Z) with |V| <= |X|, clamped at zero."""
    nx = len(ch.input)
    nv = nx if v_size is None else int(v_size)
    if not 1 <= nv <= nx:
        raise DomainError(f"|V|={nv} violates the cardinality bound 1 <= |V| <= |X|={nx}")
    qy, qz = ch.y_channel.matrix, ch.z_channel.matrix

    # full product grid over (q_v, prefix rows), coarsened until it fits
    res = grid_resolution
    while res > 1 and _grid_size(nv, res) * _grid_size(nx, res) ** nv > MAX_GRID_POINTS:
        res -= 1
    gv, gx = simplex_grid(nv, res), simplex_grid(nx, res)
    scored_q, scored_p, scored_val = [], [], []
    for rows in itertools.product(range(len(gx)), repeat=nv):
        pre = gx[list(rows)]
        vals = _mi_batch(gv, pre @ qy) - _mi_batch(gv, pre @ qz)
        for i in _top_grid(vals, TOP_K):
            scored_q.append(gv[i])
            scored_p.append(pre)
            scored_val.append(vals[i])
    top = _top_grid(np.array(scored_val), TOP_K)

    direct = maximize_direct(ch, grid_resolution, restarts, seed)
    starts = []
    if nv == nx:
        starts.append([direct.argmax.q_v.probs[None, :], np.eye(nx)])
    starts += [[scored_q[i][None, :], scored_p[i]] for i in top]
    blocks = _Blocks([(1, nv), (nv, nx)])
    starts += [blocks.random(_sub_rng(seed, 1000 + r)) for r in range(restarts)]

    fun = lambda par: float(_prefixed_batch(par[0], par[1], qy, qz)[0])
    _, par, trace = _run_starts(fun, blocks, starts)
    v_alpha = Alphabet.range(nv)
    inp = PrefixedInput(Pmf(v_alpha, par[0][0]), Dmc(v_alpha, ch.input, par[1]))
    return _clamped_result(ch, inp, trace)


# --- BCC region boundary ----------------------------------------------------


def bcc_rates(inp: BccInput, ch: WiretapChannel) -> tuple[Bits, Bits]:
    """(min{I(U;Y), I(U;Z)}, max(0, I(V;Y|U) - I(V;Z|U))) for one input."""
    u_to_x = inp.cond_v.then(inp.prefix)
    wy, wz = ch.y_channel, ch.z_channel
    r0 = min(mutual_information(inp.q_u, u_to_x.then(wy)), mutual_information(inp.q_u, u_to_x.then(wz)))
    joint_uv = inp.q_u.probs[:, None] * inp.cond_v.matrix
    r = conditional_mutual_information(joint_uv, inp.prefix.then(wy)) - conditional_mutual_information(
        joint_uv, inp.prefix.then(wz)
    )
    return Bits(r0), Bits(max(0.0, r))


def _bcc_batch(q_u, cond_v, prefix, qy, qz):
    wy, wz = prefix @ qy, prefix @ qz
    uy, uz = cond_v @ wy, cond_v @ wz
    r0 = min(_mi_batch(q_u[None, :], uy)[0], _mi_batch(q_u[None, :], uz)[0])
    cond = _mi_batch(cond_v, wy) - _mi_batch(cond_v, wz)
    return r0, max(0.0, float(q_u @ cond))


def _pad(mat: np.ndarray, rows: int, cols: int) -> np.ndarray:
    """Embed a stochastic matrix into a larger one; extra rows are uniform."""
    out = np.full((rows, cols), 0.0)
    out[: mat.shape[0], : mat.shape[1]] = mat
    for r in range(mat.shape[0], rows):
        out[r] = 1.0 / cols
    return out


def _bcc_starts(ch, nu, nv, restarts, seed, grid_resolution):
    nx = len(ch.input)
    qy, qz = ch.y_channel.matrix, ch.z_channel.matrix
    starts = []

    # U constant, (V, X) at the Theorem-1 optimum
    t1 = maximize_prefixed(ch, min(nv, nx), grid_resolution, restarts, seed)
    cv = np.zeros((nu, nv))
    cv[:, : len(t1.argmax.q_v)] = t1.argmax.q_v.probs
    starts.append([Pmf.point(nu, 0).probs[None, :], cv, _pad(t1.argmax.prefix.matrix, nv, nx)])

    # V = U = X: everything spent on the common message
    if nu >= nx and nv >= nx:
        grid = simplex_grid(nx, grid_resolution)
        common = np.minimum(_mi_batch(grid, qy), _mi_batch(grid, qz))
        q = grid[int(np.argmax(common))]
        qu = np.zeros(nu)
        qu[:nx] = q
        starts.append([qu[None, :], _pad(np.eye(nx), nu, nv), _pad(np.eye(nx), nv, nx)])

    blocks = _Blocks([(1, nu), (nu, nv), (nv, nx)])
    starts += [blocks.random(_sub_rng(seed, 2000 + r)) for r in range(restarts)]
    return blocks, starts


def _bcc_input(ch, nu, nv, par) -> BccInput:
    ua, va = Alphabet.range(nu), Alphabet.range(nv)
    return BccInput(Pmf(ua, par[0][0]), Dmc(ua, va, par[1]), Dmc(va, ch.input, par[2]))


def bcc_boundary(
    ch: WiretapChannel,
    weight_lambda: float,
    sizes: tuple[int, int] | None = None,
    restarts: int = 8,
    seed: int = 0,
    grid_resolution: int = 20,
) -> BccPoint:
    """Maximize lambda*R0 + R over U - V - X - YZ; returns the maximizing rate pair."""
    return bcc_sweep(ch, [weight_lambda], sizes, restarts, seed, grid_resolution)[0]


def bcc_sweep(
    ch: WiretapChannel,
    lambdas,
    sizes: tuple[int, int] | None = None,
    restarts: int = 8,
    seed: int = 0,
    grid_resolution: int = 20,
) -> list[BccPoint]:
    """Trace the region's upper boundary at several weights.

    Each weight is optimized on its own; then every weight re-selects the best
    input among all weights' optima, so the returned points are exact maximizers
    over one common candidate set and R0 (R) is monotone in lambda.
    """
    lambdas = [float(l) for l in lambdas]
    if any(l < 0 for l in lambdas):
        raise DomainError("lambda must be nonnegative")
    nx = len(ch.input)
    nu, nv = sizes if sizes is not None else (nx, nx)
    check_bcc_sizes(nx, nu, nv)
    qy, qz = ch.y_channel.matrix, ch.z_channel.matrix
    blocks, starts = _bcc_starts(ch, nu, nv, restarts, seed, grid_resolution)

    pool = []
    for lam in lambdas:
        def fun(par, lam=lam):
            r0, r = _bcc_batch(par[0][0], par[1], par[2], qy, qz)
            return lam * r0 + r

        _, par, _ = _run_starts(fun, blocks, starts)
        pool.append(par)

    rated = [(_bcc_input(ch, nu, nv, par),) for par in pool]
    rated = [(inp,) + bcc_rates(inp, ch) for (inp,) in rated]
    out = []
    for lam in lambdas:
        scores = [lam * r0 + r for _, r0, r in rated]
        i = int(np.argmax(scores))
        inp, r0, r = rated[i]
        out.append(BccPoint(r0, r, inp))
    return out
