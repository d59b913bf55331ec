"""Power-series kernels and the closed-form squared MMD against the uniform disk.

The kernels handled here have the form kappa(x, y) = sum_k a_k <x, y>^k with
nonnegative coefficients a_k.  For such kernels the squared maximum mean
discrepancy between a discrete sample and the uniform distribution on the
unit d-dimensional disk has a closed form: a Gram term plus a series whose
disk-side integrals reduce to the coefficients

    beta(d, k) = Gamma(d/2 + 1) * Gamma(k + 1/2) / (sqrt(pi) * Gamma(k + d/2 + 1))

and the radial moments E||X||^(2k) = d / (d + 2k) of the uniform disk.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

GEOMETRIC = "geometric"
EXP_DOT = "expdot"

# Points feeding the MMD must sit inside the unit disk; this slack absorbs
# rescaling round-off.
NORM_TOLERANCE = 1e-6

# Squared-MMD values are mathematically nonnegative; float cancellation this
# far below zero is tolerated and clamped, anything worse is a genuine bug.
NEGATIVE_CLAMP = -1e-12

_GRAM_CHUNK = 512


@dataclass(frozen=True)
class PowerSeriesKernel:
    """Kernel kappa(x, y) = sum_k a_k <x, y>^k with nonnegative coefficients.

    kind "geometric": a_k = param^k, closed form 1 / (1 - param * t); needs
    0 < param < 1 so the series converges on [-1, 1].
    kind "expdot": a_k = param^k / k!, closed form exp(param * t); param > 0.

    ``order`` truncates the beta-series of the MMD formula at k = order
    (coefficient index 2 * order); the Gram term always uses the exact
    closed form.
    """

    kind: str = GEOMETRIC
    param: float = 0.5
    order: int = 32

    def __post_init__(self) -> None:
        if self.kind not in (GEOMETRIC, EXP_DOT):
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.kind == GEOMETRIC and not 0.0 < self.param < 1.0:
            raise ValueError("geometric kernel needs param in (0, 1)")
        if self.kind == EXP_DOT and self.param <= 0.0:
            raise ValueError("expdot kernel needs param > 0")
        if self.order < 0:
            raise ValueError("truncation order must be nonnegative")

    def fingerprint(self) -> tuple[str, float]:
        """Cache key: kind plus parameter rounded to 1e-6."""
        return (self.kind, round(self.param, 6))

    def closed_form(self, t):
        """Evaluate kappa on inner products t (scalar or array) in [-1, 1]."""
        if self.kind == GEOMETRIC:
            return 1.0 / (1.0 - self.param * np.asarray(t, dtype=float))
        return np.exp(self.param * np.asarray(t, dtype=float))

    def coefficients(self, upto: int) -> np.ndarray:
        """a_k for k = 0..upto."""
        k = np.arange(upto + 1)
        if self.kind == GEOMETRIC:
            return self.param**k
        return np.exp(k * np.log(self.param) - gammaln(k + 1.0))

    def even_coefficients(self, upto: int) -> np.ndarray:
        """a_{2k} for k = 0..upto (the only coefficients the disk series sees)."""
        k2 = 2 * np.arange(upto + 1)
        if self.kind == GEOMETRIC:
            return self.param**k2
        return np.exp(k2 * np.log(self.param) - gammaln(k2 + 1.0))


def beta_coeff(d: int, k: int) -> float:
    """beta(d, k) via log-Gamma; equals 1 at k = 0 and 1/(d+2) at k = 1."""
    if d < 1:
        raise ValueError("d must be >= 1")
    if k < 0:
        raise ValueError("k must be >= 0")
    return float(
        np.exp(
            gammaln(d / 2.0 + 1.0)
            + gammaln(k + 0.5)
            - gammaln(k + d / 2.0 + 1.0)
            - 0.5 * np.log(np.pi)
        )
    )


def _beta_vector(d: int, ks: np.ndarray) -> np.ndarray:
    return np.exp(
        gammaln(d / 2.0 + 1.0)
        + gammaln(ks + 0.5)
        - gammaln(ks + d / 2.0 + 1.0)
        - 0.5 * np.log(np.pi)
    )


def kernel_eval(inner_product, kernel: PowerSeriesKernel):
    """Evaluate kappa at an inner product (or array of them) via the closed form.

    Inputs must be finite and within [-1, 1] up to a 1e-9 slack; values inside
    the slack are clamped onto [-1, 1].
    """
    t = np.asarray(inner_product, dtype=float)
    if not np.all(np.isfinite(t)):
        raise ValueError("inner product must be finite")
    if np.any(np.abs(t) > 1.0 + 1e-9):
        raise ValueError("inner product outside [-1, 1]")
    out = kernel.closed_form(np.clip(t, -1.0, 1.0))
    if np.isscalar(inner_product) or np.ndim(inner_product) == 0:
        return float(out)
    return out


def _radial_moment_sums(sq_norms: np.ndarray, upto: int) -> np.ndarray:
    """mean_i ||x_i||^(2k) for k = 0..upto (the k = 0 entry is 1 by 0^0 = 1)."""
    powers = np.vander(sq_norms, upto + 1, increasing=True)
    return powers.mean(axis=0)


def mmd_sq_vs_uniform_disk(points, kernel: PowerSeriesKernel) -> float:
    """Squared MMD between the empirical measure of ``points`` and the uniform
    distribution on the unit d-disk, d = number of columns.

    Gram term uses the exact closed form of the kernel; the disk series is
    truncated at ``kernel.order``.  Cost O(n^2 d + n * order).
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2:
        raise ValueError("points must be a 2-D array (n, d)")
    n, d = pts.shape
    if n == 0:
        raise ValueError("empty sample")
    if d == 0:
        raise ValueError("points must have at least one coordinate")
    sq_norms = np.einsum("ij,ij->i", pts, pts)
    if np.any(sq_norms > (1.0 + NORM_TOLERANCE) ** 2):
        raise ValueError("points not rescaled to the unit disk")

    gram_total = 0.0
    for start in range(0, n, _GRAM_CHUNK):
        block = pts[start : start + _GRAM_CHUNK] @ pts.T
        np.clip(block, -1.0, 1.0, out=block)
        # In-place closed form; this loop dominates the cost of a null build.
        if kernel.kind == GEOMETRIC:
            block *= -kernel.param
            block += 1.0
            np.reciprocal(block, out=block)
        else:
            block *= kernel.param
            np.exp(block, out=block)
        gram_total += float(block.sum())
    gram = gram_total / (n * n)

    ks = np.arange(kernel.order + 1)
    a2k = kernel.even_coefficients(kernel.order)
    beta = _beta_vector(d, ks)
    disk_moments = d / (d + 2.0 * ks)
    sample_moments = _radial_moment_sums(sq_norms, kernel.order)
    series = float(np.sum(a2k * beta * (disk_moments - 2.0 * sample_moments)))

    value = gram + series
    if value < 0.0:
        if value < NEGATIVE_CLAMP:
            raise RuntimeError(
                f"squared MMD evaluated to {value}, below the negativity tolerance"
            )
        value = 0.0
    return value


def expected_mmd_sq(kernel: PowerSeriesKernel, d: int, n: int) -> float:
    """Expected squared MMD of an n-sample drawn from the uniform d-disk.

    Equals (E kappa(X, X) - E kappa(X, Y)) / n with both expectations over the
    uniform disk, evaluated by the same truncated series as the MMD formula.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    if n < 1:
        raise ValueError("n must be >= 1")
    ks = np.arange(kernel.order + 1)
    a2k = kernel.even_coefficients(kernel.order)
    beta = _beta_vector(d, ks)
    e_cross = float(np.sum(a2k * beta * d / (d + 2.0 * ks)))

    k_all = np.arange(2 * kernel.order + 1)
    a_all = kernel.coefficients(2 * kernel.order)
    e_self = float(np.sum(a_all * d / (d + 2.0 * k_all)))
    return (e_self - e_cross) / n
