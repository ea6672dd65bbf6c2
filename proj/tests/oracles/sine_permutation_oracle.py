"""Brute-force global maximum of the sine-permutation benchmark.

Grid: all 125 (u, v, w) triples x 400 x 300 points on (x, y), then local
refinement from the best grid cells with bounded Nelder-Mead.
"""
import itertools

import numpy as np
from scipy.optimize import minimize

DOMAIN = (1, 4, 7, 10, 13)
PERM_U = (7, 1, 13, 10, 4)
PERM_V = (13, 1, 4, 7, 10)
PERM_W = (7, 4, 10, 1, 13)


def perm(table, value):
    i = table.index(value)
    return table[(i + 1) % len(table)]


def g(x, y):
    return x * np.sin((-x + 7) ** 2 * np.pi / (2 * (y - 4) ** 2 + 1)) / ((x - 5) ** 2 + 1)


def f(u, v, w, x, y):
    return g(perm(PERM_U, u) + perm(PERM_V, v) + perm(PERM_W, w) + x, y)


def main():
    xs = np.linspace(0.5, 8.0, 400)
    ys = np.linspace(0.1, 5.0, 300)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    cands = []
    for u, v, w in itertools.product(DOMAIN, repeat=3):
        s = perm(PERM_U, u) + perm(PERM_V, v) + perm(PERM_W, w)
        vals = g(s + X, Y)
        flat = np.argsort(vals, axis=None)[-20:]
        for k in flat:
            i, j = np.unravel_index(k, vals.shape)
            cands.append((vals[i, j], u, v, w, xs[i], ys[j]))
    cands.sort(reverse=True)
    best = None
    for val, u, v, w, x0, y0 in cands[:200]:
        res = minimize(lambda p: -f(u, v, w, p[0], p[1]), [x0, y0], method="L-BFGS-B",
                       bounds=[(0.5, 8.0), (0.1, 5.0)], options={"ftol": 1e-15, "gtol": 1e-12})
        cand = (-res.fun, u, v, w, res.x[0], res.x[1])
        if best is None or cand[0] > best[0]:
            best = cand
    print("grid best:", cands[0])
    print("refined best: value=%.15f u=%d v=%d w=%d x=%.12f y=%.12f" % best)


if __name__ == "__main__":
    main()
