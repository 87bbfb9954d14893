"""Derivative-free maximization of concave functions on boxes.

One dimension: coarse grid, then golden-section refinement inside the
bracket around the best grid point. Several dimensions: cyclic coordinate
ascent built from the one-dimensional search, with a pattern step along
the net displacement of each pass to cut down zig-zagging on correlated
coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass
class SearchResult:
    x: object
    value: float
    at_boundary: bool
    evaluations: int
    passes: int = 1


def golden_section(g: Callable[[float], float], lo: float, hi: float, xtol=1e-6):
    """Maximize a unimodal ``g`` on ``[lo, hi]`` to bracket width ``xtol``.

    Returns ``(x, g(x), evaluations)`` for the best point evaluated.
    """
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    gc, gd = g(c), g(d)
    evals = 2
    best = (c, gc) if gc >= gd else (d, gd)
    while b - a > xtol:
        if gc >= gd:
            b, d, gd = d, c, gc
            c = b - INV_PHI * (b - a)
            gc = g(c)
            if gc > best[1]:
                best = (c, gc)
        else:
            a, c, gc = c, d, gd
            d = a + INV_PHI * (b - a)
            gd = g(d)
            if gd > best[1]:
                best = (d, gd)
        evals += 1
    return best[0], best[1], evals


def search_1d(g, lo, hi, grid=101, xtol=1e-6) -> SearchResult:
    """Maximize ``g`` on ``[lo, hi]``.

    ``at_boundary`` is set when the maximizer sits within ``xtol`` of an end
    of the interval, i.e. the interval probably cuts off the optimum.
    """
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    xs = np.linspace(lo, hi, max(int(grid), 3))
    vals = np.array([g(float(x)) for x in xs])
    i = int(np.argmax(vals))
    a, b = xs[max(i - 1, 0)], xs[min(i + 1, xs.size - 1)]
    x, v, n = golden_section(g, float(a), float(b), xtol)
    if vals[i] >= v:
        x, v = float(xs[i]), float(vals[i])
    edge = min(x - lo, hi - x) <= xtol
    return SearchResult(x, v, edge, xs.size + n)


def search_nd(g, box: Sequence[tuple], x0=None, grid=101, xtol=1e-6, tol=1e-8,
              max_passes=50, local_grid=7) -> SearchResult:
    """Coordinate ascent of ``g`` over a box ``[(lo, hi), ...]``.

    The first pass scans each coordinate over its full range; later passes
    search a window around the current value that widens whenever the
    optimum lands on its edge. Passes stop when one gains less than ``tol``.
    """
    box = [(float(lo), float(hi)) for lo, hi in box]
    n = len(box)
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float)
    x = np.clip(x, [b[0] for b in box], [b[1] for b in box])
    evals = 1
    fx = g(x.copy())
    steps = np.array([(hi - lo) / (grid - 1) for lo, hi in box])
    passes = 0
    for passes in range(1, max_passes + 1):
        start_x, start_f = x.copy(), fx
        for k in range(n):
            lo, hi = box[k]

            def gk(t, k=k):
                y = x.copy()
                y[k] = t
                return g(y)

            if passes == 1:
                res = search_1d(gk, lo, hi, grid, xtol)
            else:
                res = _window_search(gk, x[k], steps[k], lo, hi, local_grid, xtol)
            evals += res.evaluations
            if res.value > fx:
                steps[k] = max(2.0 * abs(res.x - x[k]), 10 * xtol)
                x[k], fx = res.x, res.value
        move = x - start_x
        if passes > 1 and np.any(move != 0):
            res = _pattern_step(g, x, move, box, local_grid, xtol)
            evals += res.evaluations
            if res.value > fx:
                x, fx = res.x, res.value
        if fx - start_f < tol:
            break
    lows = np.array([b[0] for b in box])
    highs = np.array([b[1] for b in box])
    edge = bool(np.any(np.minimum(x - lows, highs - x) <= xtol))
    return SearchResult(x, fx, edge, evals, passes)


def _window_search(g, center, half, lo, hi, grid, xtol):
    evals = 0
    while True:
        a, b = max(lo, center - half), min(hi, center + half)
        res = search_1d(g, a, b, grid, xtol)
        evals += res.evaluations
        hit_window = (res.x - a <= xtol and a > lo) or (b - res.x <= xtol and b < hi)
        if not hit_window:
            res.evaluations = evals
            return res
        center, half = res.x, 4 * half


def _pattern_step(g, x, move, box, grid, xtol):
    """Line search along ``x + t * move`` for ``t`` in the box-feasible range."""
    t_hi, t_lo = np.inf, -np.inf
    for k, (lo, hi) in enumerate(box):
        if move[k] > 0:
            t_hi = min(t_hi, (hi - x[k]) / move[k])
            t_lo = max(t_lo, (lo - x[k]) / move[k])
        elif move[k] < 0:
            t_hi = min(t_hi, (lo - x[k]) / move[k])
            t_lo = max(t_lo, (hi - x[k]) / move[k])
    t_hi, t_lo = min(t_hi, 8.0), max(t_lo, -1.0)
    if not t_lo < t_hi:
        return SearchResult(x, -np.inf, False, 0)
    scale = float(np.linalg.norm(move))
    res = search_1d(lambda t: g(x + t * move), t_lo, t_hi, grid + 4, xtol / max(scale, 1e-12))
    res.x = np.clip(x + res.x * move, [b[0] for b in box], [b[1] for b in box])
    return res
