"""Probability objects on the simplex.

Categorical outcomes, Dirichlet distributions, Dirichlet mixtures and Dirac
point masses, together with their densities, means, sampling, and the
closed-form KL divergence between Dirichlets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special as sp

from . import kernels
from .rng import SeededRng

#: Total concentration cap: Dirac limits are represented either by the explicit
#: Dirac variant or by Dirichlets capped at this total pseudocount.
ALPHA_MAX = 1e6

#: Densities are evaluated at coordinates clamped to [BOUNDARY_EPS, 1-BOUNDARY_EPS].
BOUNDARY_EPS = 1e-12

_SUM_TOL = 1e-12


class NoDensityError(ValueError):
    """Raised when a density is requested from a distribution that has none."""


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.asarray(arr, dtype=np.float64)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class SimplexPoint:
    """A level-1 categorical distribution: a point on the K-simplex."""

    probs: np.ndarray

    def __post_init__(self):
        probs = _freeze(self.probs)
        object.__setattr__(self, "probs", probs)
        if probs.ndim != 1 or probs.size < 2:
            raise ValueError("a simplex point needs K >= 2 coordinates")
        if np.any(probs < 0):
            raise ValueError(f"negative probability in {probs}")
        if abs(probs.sum() - 1.0) > 1e-9:
            raise ValueError(f"probabilities sum to {probs.sum()}, not 1")

    @property
    def k(self) -> int:
        return self.probs.size

    def clamped(self, eps: float = BOUNDARY_EPS) -> np.ndarray:
        return np.clip(self.probs, eps, 1.0 - eps)

    @staticmethod
    def from_unnormalized(values) -> "SimplexPoint":
        values = np.asarray(values, dtype=np.float64)
        return SimplexPoint(values / values.sum())


@dataclass(frozen=True)
class DirichletParams:
    """Evidence/pseudocount vector of a Dirichlet distribution."""

    alpha: np.ndarray

    def __post_init__(self):
        alpha = _freeze(self.alpha)
        object.__setattr__(self, "alpha", alpha)
        if alpha.ndim != 1 or alpha.size < 2:
            raise ValueError("alpha needs K >= 2 entries")
        if np.any(alpha <= 0):
            raise ValueError(f"alpha must be strictly positive, got {alpha}")
        if alpha.sum() > ALPHA_MAX * (1 + 1e-12):
            raise ValueError(f"total concentration {alpha.sum()} exceeds cap {ALPHA_MAX}")

    @property
    def k(self) -> int:
        return self.alpha.size

    @property
    def total(self) -> float:
        return float(self.alpha.sum())

    def mean(self) -> SimplexPoint:
        return SimplexPoint(self.alpha / self.alpha.sum())

    def variances(self) -> np.ndarray:
        a0 = self.alpha.sum()
        return self.alpha * (a0 - self.alpha) / (a0 * a0 * (a0 + 1.0))


# --- Level-2 distributions ------------------------------------------------


@dataclass(frozen=True)
class Dirichlet:
    """A single-Dirichlet level-2 distribution."""

    params: DirichletParams

    @property
    def k(self) -> int:
        return self.params.k

    def weight_and_alpha_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return np.ones(1), self.params.alpha[None, :]


@dataclass(frozen=True)
class DirichletMixture:
    """A finite mixture of Dirichlet distributions (M >= 1 components)."""

    weights: np.ndarray
    components: tuple[DirichletParams, ...]

    def __post_init__(self):
        weights = _freeze(self.weights)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "components", tuple(self.components))
        if len(self.components) < 1 or weights.size != len(self.components):
            raise ValueError("need one weight per mixture component")
        if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-9:
            raise ValueError(f"mixture weights must lie on the simplex, got {weights}")
        ks = {c.k for c in self.components}
        if len(ks) != 1:
            raise ValueError("mixture components disagree on K")

    @property
    def k(self) -> int:
        return self.components[0].k

    def weight_and_alpha_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return np.asarray(self.weights), np.stack([c.alpha for c in self.components])


@dataclass(frozen=True)
class Dirac:
    """A level-2 point mass at a single level-1 distribution."""

    point: SimplexPoint

    @property
    def k(self) -> int:
        return self.point.k


Level2Distribution = Dirichlet | DirichletMixture | Dirac


def capped_dirichlet_proxy(theta: SimplexPoint, alpha_max: float = ALPHA_MAX) -> DirichletParams:
    """Capped-Dirichlet stand-in for a Dirac at ``theta`` (entropy/KL proxies).

    Each coordinate gets at least one pseudocount: sub-unit concentrations
    put an integrable spike on the boundary whose differential entropy
    diverges, which would make proxies at corner points useless.
    """
    alpha = np.clip(theta.probs * alpha_max, 1.0, None)
    total = alpha.sum()
    if total > alpha_max:
        alpha = alpha * (alpha_max / total)
    return DirichletParams(alpha)


# --- Special functions ------------------------------------------------------


def digamma(x: float) -> float:
    """Digamma function; domain error for nonpositive input."""
    if x <= 0:
        raise ValueError(f"digamma requires x > 0, got {x}")
    return float(sp.psi(x))


def log_multivariate_beta(params: DirichletParams) -> float:
    """log B(alpha) = sum log Gamma(alpha_k) - log Gamma(alpha_0)."""
    a = params.alpha
    return float(sp.gammaln(a).sum() - sp.gammaln(a.sum()))


# --- Operations --------------------------------------------------------------


def level2_pdf(q: Level2Distribution, theta: SimplexPoint) -> float:
    """Density of ``q`` at ``theta`` (coordinates clamped off the boundary)."""
    if isinstance(q, Dirac):
        raise NoDensityError("a Dirac point mass has no density")
    if q.k != theta.k:
        raise ValueError("dimension mismatch")
    weights, alphas = q.weight_and_alpha_arrays()
    log_theta = np.log(theta.clamped())[None, :]
    with np.errstate(over="ignore"):
        return float(np.exp(kernels.mixture_log_pdf(log_theta, weights, alphas)[0]))


def level2_mean(q: Level2Distribution) -> SimplexPoint:
    """Induced level-1 prediction: the expected probability vector under ``q``."""
    if isinstance(q, Dirac):
        return q.point
    if isinstance(q, Dirichlet):
        return q.params.mean()
    means = np.stack([c.mean().probs for c in q.components])
    return SimplexPoint.from_unnormalized(np.asarray(q.weights) @ means)


def level2_sample(q: Level2Distribution, rng: SeededRng) -> SimplexPoint:
    """One exact draw from ``q``."""
    return SimplexPoint(_sample_array(q, rng, 1)[0])


def _sample_array(q: Level2Distribution, rng: SeededRng, n: int) -> np.ndarray:
    """``n`` draws from ``q`` as an (n, K) array (vectorized helper)."""
    gen = rng.generator
    if isinstance(q, Dirac):
        return np.tile(q.point.probs, (n, 1))
    if isinstance(q, Dirichlet):
        return gen.dirichlet(q.params.alpha, size=n)
    picks = gen.choice(len(q.components), size=n, p=np.asarray(q.weights))
    out = np.empty((n, q.k))
    for j, comp in enumerate(q.components):
        mask = picks == j
        cnt = int(mask.sum())
        if cnt:
            out[mask] = gen.dirichlet(comp.alpha, size=cnt)
    return out


def categorical_sample(theta: SimplexPoint, rng: SeededRng, size: int | None = None):
    """Draw label indices from Cat(theta): one int, or an array if ``size`` given."""
    gen = rng.generator
    draws = gen.choice(theta.k, size=size if size is not None else 1, p=theta.probs)
    return int(draws[0]) if size is None else draws


def kl_dirichlet(q: DirichletParams, prior: DirichletParams) -> float:
    """KL(Dir(q) || Dir(prior)) in nats, closed form."""
    if q.k != prior.k:
        raise ValueError("dimension mismatch")
    a, b = q.alpha, prior.alpha
    value = (
        log_multivariate_beta(prior)
        - log_multivariate_beta(q)
        + float(((a - b) * (sp.psi(a) - sp.psi(a.sum()))).sum())
    )
    return max(value, 0.0)
