"""Naive reference implementations, written from the definitions with plain loops.

Nothing here imports effsec; these exist to cross-check the vectorized code.
"""

import itertools
import math


def h2(p):
    return 0.0 if p in (0.0, 1.0) else -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def entropy(p):
    return -sum(a * math.log2(a) for a in p if a > 0)


def kl(p, q):
    total = 0.0
    for a, b in zip(p, q):
        if a == 0:
            continue
        if b == 0:
            return math.inf
        total += a * math.log2(a / b)
    return total


def mutual_information(q_x, w):
    """I(X;Y) for input list q_x and row-stochastic nested list w."""
    ny = len(w[0])
    q_y = [sum(q_x[x] * w[x][y] for x in range(len(q_x))) for y in range(ny)]
    total = 0.0
    for x in range(len(q_x)):
        for y in range(ny):
            j = q_x[x] * w[x][y]
            if j > 0:
                total += j * math.log2(w[x][y] / q_y[y])
    return total


def bsc_secrecy_grid(p_y, p_z, step=1e-3):
    """max over Q_X = (1-a, a) on a grid of I(X;Y) - I(X;Z), both binary symmetric."""
    best = -math.inf
    k = int(round(1 / step))
    for i in range(k + 1):
        a = i * step
        q = [1 - a, a]
        wy = [[1 - p_y, p_y], [p_y, 1 - p_y]]
        wz = [[1 - p_z, p_z], [p_z, 1 - p_z]]
        best = max(best, mutual_information(q, wy) - mutual_information(q, wz))
    return best


def induced(words, wz, n, nz):
    """per[m][z_index] = (1/L1) sum_w prod_i wz[x_i][z_i], z^n in lexicographic order."""
    per = []
    zs = list(itertools.product(range(nz), repeat=n))
    for msg in words:
        row = []
        for z in zs:
            acc = 0.0
            for word in msg:
                lik = 1.0
                for i in range(n):
                    lik *= wz[word[i]][z[i]]
                acc += lik
            row.append(acc / len(msg))
        per.append(row)
    return per


def product(p, n):
    out = []
    for seq in itertools.product(range(len(p)), repeat=n):
        v = 1.0
        for s in seq:
            v *= p[s]
        out.append(v)
    return out


def secrecy(per, ref):
    L = len(per)
    marg = [sum(row[j] for row in per) / L for j in range(len(ref))]
    confusion = sum(kl(row, marg) for row in per) / L
    stealth = kl(marg, ref)
    effective = sum(kl(row, ref) for row in per) / L
    return confusion, stealth, effective, marg
