"""Probability-simplex weights, multi-index sets, and the Bernstein basis.

A weight vector is a nonnegative vector summing to one. The multi-index set
of order (M, D) collects every exponent vector of M nonnegative integers
summing to D, ordered descending-lexicographically so that (D, 0, ..., 0)
comes first and (0, ..., 0, D) last. That fixed order defines the layout of
control-point matrices and serialized models throughout the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._kernels import bernstein_design

# Construction renormalizes weight vectors whose sum drifts from 1 by at
# most this much; larger deviations are rejected as bugs.
WEIGHT_RENORM_TOL = 1e-9
# Invariant tolerance for "entries sum to one".
WEIGHT_SUM_ATOL = 1e-12


def weight_vector(values, dim: int | None = None) -> np.ndarray:
    """Validate `values` as a point on the probability simplex.

    Entries must be nonnegative and sum to 1; sums within
    ``WEIGHT_RENORM_TOL`` of 1 are renormalized (tolerating accumulated
    floating-point drift without masking real bugs), larger deviations
    raise ValueError.
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("weight vector must be a nonempty 1-D array")
    if dim is not None and arr.size != dim:
        raise ValueError(f"weight vector has length {arr.size}, expected {dim}")
    if np.any(arr < 0.0):
        raise ValueError("weight vector entries must be nonnegative")
    total = float(arr.sum())
    if abs(total - 1.0) > WEIGHT_RENORM_TOL:
        raise ValueError(f"weight vector sums to {total!r}, not 1")
    if total != 1.0:
        arr = arr / total
    return arr


def _descending_lex_exponents(num_objectives: int, degree: int) -> list[list[int]]:
    out: list[list[int]] = []

    def rec(prefix: list[int], remaining: int, slots: int) -> None:
        if slots == 1:
            out.append(prefix + [remaining])
            return
        for d in range(remaining, -1, -1):
            rec(prefix + [d], remaining - d, slots - 1)

    rec([], degree, num_objectives)
    return out


def multinomial_coefficient(degree: int, exponents) -> int:
    """Exact integer D! / prod(d_m!)."""
    c = math.factorial(degree)
    for d in exponents:
        c //= math.factorial(int(d))
    return c


@dataclass(frozen=True, eq=False)
class MultiIndexSet:
    """All degree-D multi-indices over M slots, in canonical order.

    `exponents` is a (J, M) integer array of exponent vectors and
    `coefficients` the matching (J,) multinomial coefficients. Coefficients
    are computed with exact integer arithmetic and converted to float64
    once; the conversion is exact as long as they stay below 2**53
    (degree + M up to around 40, far beyond practical use here).
    """

    num_objectives: int
    degree: int
    exponents: np.ndarray
    coefficients: np.ndarray
    _exponents_f64: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "exponents", np.ascontiguousarray(self.exponents, dtype=np.int64))
        object.__setattr__(self, "coefficients", np.ascontiguousarray(self.coefficients, dtype=np.float64))
        object.__setattr__(self, "_exponents_f64", self.exponents.astype(np.float64))

    @property
    def size(self) -> int:
        """Number of basis functions, binomial(D + M - 1, M - 1)."""
        return self.exponents.shape[0]

    def vertex_position(self, m: int) -> int:
        """Row index of the multi-index D * e_m."""
        hits = np.nonzero(self.exponents[:, m] == self.degree)[0]
        return int(hits[0])


def enumerate_multi_indices(num_objectives: int, degree: int) -> MultiIndexSet:
    """Enumerate the degree-D multi-index set over `num_objectives` slots.

    Rejects num_objectives < 1 and degree < 1 (a degree-0 basis is a
    constant map with no fitting problem of interest).
    """
    if num_objectives < 1:
        raise ValueError("num_objectives must be >= 1")
    if degree < 1:
        raise ValueError("degree must be >= 1")
    rows = _descending_lex_exponents(num_objectives, degree)
    coeffs = [multinomial_coefficient(degree, row) for row in rows]
    return MultiIndexSet(
        num_objectives=num_objectives,
        degree=degree,
        exponents=np.array(rows, dtype=np.int64),
        coefficients=np.array(coeffs, dtype=np.float64),
    )


def bernstein_vector(t, basis: MultiIndexSet) -> np.ndarray:
    """The vector of multinomial-weighted monomials at weight t.

    Entry j is coefficient_j * prod_m t_m^(exponent_jm). Entries are
    nonnegative and sum to 1 (multinomial theorem).
    """
    arr = weight_vector(t, dim=basis.num_objectives)
    return bernstein_design(arr[None, :], basis._exponents_f64, basis.coefficients)[0]


def sample_uniform_simplex(num_objectives: int, count: int, seed) -> np.ndarray:
    """Draw `count` i.i.d. uniform points on the probability simplex.

    Normalizes unit-rate exponential draws (a flat Dirichlet), which is
    exact and O(M) per sample. `seed` may be an int or a
    numpy.random.SeedSequence; output is bit-identical for equal seeds.
    Returns a (count, num_objectives) array whose rows are weight vectors.
    """
    if num_objectives < 1:
        raise ValueError("num_objectives must be >= 1")
    if count < 1:
        raise ValueError("count must be >= 1")
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    rng = np.random.Generator(np.random.PCG64(seed))
    draws = rng.standard_exponential((count, num_objectives))
    return draws / draws.sum(axis=1, keepdims=True)
