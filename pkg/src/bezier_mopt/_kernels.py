"""Hot numeric kernels: numba-jitted loops with a pure-numpy fallback.

Three inner loops dominate runtime in this package: Bernstein design-matrix
assembly (called once per solver iteration and for every metric evaluation),
brute-force nearest-neighbour distances (GD/IGD indicators), and the
per-weight gradient-descent sweep that builds validation sets and the
baseline model.

Path selection happens once at import time:

* ``BEZIER_MOPT_NUMBA=0`` (also ``false``/``off``/``no``) forces the
  pure-numpy implementations.
* otherwise numba is used when importable, falling back to numpy.

Results are deterministic within either path. Across paths, values agree to
a few ulps but not bitwise: numpy's vectorized ``pow`` uses SIMD kernels
whose last-bit rounding can differ from libm's ``pow`` that numba emits.
The benchmark in ``benchmarks/kernel_bench.py`` compares both paths.
"""

from __future__ import annotations

import math
import os

import numpy as np

_FALSEY = ("0", "false", "off", "no")


def _numba_requested() -> bool:
    return os.environ.get("BEZIER_MOPT_NUMBA", "").strip().lower() not in _FALSEY


# ---------------------------------------------------------------------------
# Loop implementations. These are plain Python functions written so that
# numba can compile them unchanged; the numpy fallbacks below replicate the
# same per-element operation order.
# ---------------------------------------------------------------------------

def _bernstein_design_loop(weights, exponents, coefficients):
    """Rows of multinomial-weighted monomials for a batch of weight vectors.

    weights: (N, M) float64, exponents: (J, M) float64 (integer-valued),
    coefficients: (J,) float64. Returns (N, J).
    """
    n_rows = weights.shape[0]
    n_basis = exponents.shape[0]
    n_dims = weights.shape[1]
    out = np.empty((n_rows, n_basis))
    for n in range(n_rows):
        for j in range(n_basis):
            acc = coefficients[j]
            for m in range(n_dims):
                acc *= weights[n, m] ** exponents[j, m]
            out[n, j] = acc
    return out


def _min_distances_loop(points, references):
    """For each row of `points`, the Euclidean distance to the nearest row
    of `references`. Returns (len(points),)."""
    n_pts = points.shape[0]
    n_ref = references.shape[0]
    dim = points.shape[1]
    out = np.empty(n_pts)
    for i in range(n_pts):
        best = np.inf
        for j in range(n_ref):
            d2 = 0.0
            for l in range(dim):
                diff = points[i, l] - references[j, l]
                d2 += diff * diff
            if d2 < best:
                best = d2
        out[i] = math.sqrt(best)
    return out


def _descent_sweep_loop(scales_sq, centers, powers, weights, start,
                        step0, decay_steps, grad_tol, max_steps):
    """Plain gradient descent with a diminishing step on each weighted-sum
    scalarization of a diagonal norm-power problem.

    The objectives are f_m(x) = (sum_l scales_sq[m,l] (x_l - centers[m,l])^2
    )^(powers[m]/2); the gradient is taken as zero exactly at a center.
    Each row i of `weights` gets its own descent started from `start[i]`,
    stepping x <- x - step0/(1 + k/decay_steps) * grad until the gradient
    norm drops below grad_tol or max_steps is exhausted.

    Returns (points, grad_norms, steps, converged).
    """
    n_w = weights.shape[0]
    n_obj = scales_sq.shape[0]
    dim = centers.shape[1]
    points = start.copy()
    grad_norms = np.empty(n_w)
    steps = np.zeros(n_w, dtype=np.int64)
    converged = np.zeros(n_w, dtype=np.bool_)
    grad = np.empty(dim)
    for i in range(n_w):
        x = points[i]
        g_norm = np.inf
        for k in range(1, max_steps + 1):
            for l in range(dim):
                grad[l] = 0.0
            for m in range(n_obj):
                r2 = 0.0
                for l in range(dim):
                    diff = x[l] - centers[m, l]
                    r2 += scales_sq[m, l] * diff * diff
                if r2 > 0.0:
                    w = weights[i, m] * powers[m] * r2 ** ((powers[m] - 2.0) / 2.0)
                    for l in range(dim):
                        grad[l] += w * scales_sq[m, l] * (x[l] - centers[m, l])
            g2 = 0.0
            for l in range(dim):
                g2 += grad[l] * grad[l]
            g_norm = math.sqrt(g2)
            if g_norm < grad_tol:
                converged[i] = True
                steps[i] = k - 1
                break
            alpha = step0 / (1.0 + k / decay_steps)
            for l in range(dim):
                x[l] -= alpha * grad[l]
            steps[i] = k
        grad_norms[i] = g_norm
    return points, grad_norms, steps, converged


# ---------------------------------------------------------------------------
# Pure-numpy fallbacks. Same arithmetic per element, vectorized.
# ---------------------------------------------------------------------------

def bernstein_design_numpy(weights, exponents, coefficients):
    n_rows = weights.shape[0]
    out = np.broadcast_to(coefficients, (n_rows, coefficients.shape[0])).copy()
    for m in range(weights.shape[1]):
        out *= weights[:, m:m + 1] ** exponents[:, m]
    return out


def min_distances_numpy(points, references):
    d2 = np.zeros((points.shape[0], references.shape[0]))
    for l in range(points.shape[1]):
        diff = points[:, l:l + 1] - references[None, :, l]
        d2 += diff * diff
    return np.sqrt(d2.min(axis=1))


def descent_sweep_numpy(scales_sq, centers, powers, weights, start,
                        step0, decay_steps, grad_tol, max_steps):
    n_w, dim = start.shape
    points = start.copy()
    grad_norms = np.full(n_w, np.inf)
    steps = np.zeros(n_w, dtype=np.int64)
    converged = np.zeros(n_w, dtype=np.bool_)
    active = np.arange(n_w)
    for k in range(1, max_steps + 1):
        x = points[active]
        t = weights[active]
        diff = x[:, None, :] - centers[None, :, :]
        r2 = np.zeros((x.shape[0], scales_sq.shape[0]))
        for l in range(dim):
            r2 += scales_sq[:, l] * diff[:, :, l] ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            w = np.where(r2 > 0.0, t * powers * r2 ** ((powers - 2.0) / 2.0), 0.0)
        grad = np.zeros_like(x)
        for l in range(dim):
            grad[:, l] = (w * scales_sq[:, l] * diff[:, :, l]).sum(axis=1)
        g2 = np.zeros(x.shape[0])
        for l in range(dim):
            g2 += grad[:, l] ** 2
        g_norm = np.sqrt(g2)
        done = g_norm < grad_tol
        if done.any():
            idx = active[done]
            converged[idx] = True
            grad_norms[idx] = g_norm[done]
            steps[idx] = k - 1
        keep = ~done
        active = active[keep]
        if active.size == 0:
            break
        alpha = step0 / (1.0 + k / decay_steps)
        points[active] = x[keep] - alpha * grad[keep]
        grad_norms[active] = g_norm[keep]
        steps[active] = k
    return points, grad_norms, steps, converged


# ---------------------------------------------------------------------------
# Dispatch.
# ---------------------------------------------------------------------------

NUMBA_ENABLED = False
bernstein_design_numba = None
min_distances_numba = None
descent_sweep_numba = None

if _numba_requested():
    try:
        import numba
    except ImportError:
        pass
    else:
        bernstein_design_numba = numba.njit(cache=True)(_bernstein_design_loop)
        min_distances_numba = numba.njit(cache=True)(_min_distances_loop)
        descent_sweep_numba = numba.njit(cache=True)(_descent_sweep_loop)
        NUMBA_ENABLED = True

if NUMBA_ENABLED:
    bernstein_design = bernstein_design_numba
    min_distances = min_distances_numba
    descent_sweep = descent_sweep_numba
else:
    bernstein_design = bernstein_design_numpy
    min_distances = min_distances_numpy
    descent_sweep = descent_sweep_numpy
