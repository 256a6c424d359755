"""Differential entropy of Dirichlets and quantized (binned) Shannon entropy.

Quantization uses the simplex lattice: all points whose coordinates are
multiples of 1/m.  For K=2, m=1000 gives 1001 points (uniform entropy
log2(1001) = 9.9672 bits); for K=3, m=50 gives C(52,2) = 1326 points
(uniform entropy 10.3729 bits).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special as sp

from . import kernels
from .dist import (
    BOUNDARY_EPS,
    Dirac,
    DirichletParams,
    Level2Distribution,
)

#: Default lattice resolutions per class count.
DEFAULT_GRID_M = {2: 1000, 3: 50}


def dirichlet_differential_entropy(params: DirichletParams) -> float:
    """Differential entropy of Dir(alpha) in nats (closed form)."""
    a = params.alpha
    a0 = a.sum()
    k = a.size
    log_beta = sp.gammaln(a).sum() - sp.gammaln(a0)
    return float(log_beta + (a0 - k) * sp.psi(a0) - ((a - 1.0) * sp.psi(a)).sum())


@dataclass(frozen=True)
class SimplexGrid:
    """All simplex lattice points with coordinates in multiples of 1/m."""

    k: int
    m: int
    points: np.ndarray      # (n, K), rows sum to 1 exactly on the lattice
    log_points: np.ndarray  # log of boundary-clamped points, C-contiguous

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    def max_entropy_bits(self) -> float:
        return float(np.log2(self.n_points))

    def quadrature_weights(self) -> np.ndarray:
        """Weights w with sum(f(points) * w) ~ integral of f over the simplex.

        K=2: trapezoid in the first coordinate.  K=3: equal-volume cells
        (simplex area 1/2 in (theta1, theta2) coordinates).
        """
        n = self.n_points
        if self.k == 2:
            w = np.full(n, 1.0 / self.m)
            w[0] *= 0.5
            w[-1] *= 0.5
            return w
        return np.full(n, 0.5 / n)

    def nearest_index(self, probs: np.ndarray) -> int:
        return int(np.argmin(((self.points - probs) ** 2).sum(axis=1)))


def get_simplex_grid(k: int, m: int | None = None) -> SimplexGrid:
    """Cached lattice, at the paper's default resolution unless ``m`` is given."""
    return _cached_grid(k, m if m is not None else DEFAULT_GRID_M[k])


def build_simplex_grid(k: int, m: int) -> SimplexGrid:
    """Deterministic (lexicographic) simplex lattice for K in {2, 3}."""
    if m < 1:
        raise ValueError("resolution m must be >= 1")
    if k == 2:
        i = np.arange(m + 1)
        points = np.stack([i, m - i], axis=1) / m
    elif k == 3:
        rows = [
            (i, j, m - i - j)
            for i in range(m + 1)
            for j in range(m + 1 - i)
        ]
        points = np.asarray(rows, dtype=np.float64) / m
    else:
        raise ValueError(f"simplex grids support K in {{2, 3}}, got K={k}")
    log_points = np.ascontiguousarray(
        np.log(np.clip(points, BOUNDARY_EPS, 1.0 - BOUNDARY_EPS))
    )
    points.flags.writeable = False
    log_points.flags.writeable = False
    return SimplexGrid(k=k, m=m, points=points, log_points=log_points)


@lru_cache(maxsize=16)
def _cached_grid(k: int, m: int) -> SimplexGrid:
    return build_simplex_grid(k, m)


def quantized_probs(q: Level2Distribution, grid: SimplexGrid) -> np.ndarray:
    """Probability vector of ``q`` discretized on the lattice points.

    A Dirac maps to a one-hot vector at its nearest lattice point.
    """
    if q.k != grid.k:
        raise ValueError("dimension mismatch between distribution and grid")
    if isinstance(q, Dirac):
        probs = np.zeros(grid.n_points)
        probs[grid.nearest_index(q.point.probs)] = 1.0
        return probs
    weights, alphas = q.weight_and_alpha_arrays()
    log_pdf = kernels.mixture_log_pdf(grid.log_points, weights, alphas)
    p = np.exp(log_pdf - log_pdf.max())
    return p / p.sum()


def quantized_entropy(q: Level2Distribution, grid: SimplexGrid) -> float:
    """Shannon entropy (bits) of ``q`` discretized on the lattice.

    The density is evaluated at each (clamped) lattice point and normalized
    to a probability vector.  A Dirac puts mass 1 on its nearest lattice
    point, hence 0 bits.
    """
    if q.k != grid.k:
        raise ValueError("dimension mismatch between distribution and grid")
    if isinstance(q, Dirac):
        return 0.0
    weights, alphas = q.weight_and_alpha_arrays()
    return kernels.quantized_entropy_bits(grid.log_points, weights, alphas)
