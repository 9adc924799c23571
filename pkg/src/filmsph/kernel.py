"""Cubic-spline smoothing kernel with compact support of radius 2*h.

The kernel is the standard third-order B-spline in 3D,

    W(q) = sigma * (1 - 1.5 q^2 + 0.75 q^3)   for 0 <= q < 1
    W(q) = sigma * 0.25 (2 - q)^3             for 1 <= q < 2
    W(q) = 0                                  for q >= 2

with q = r / h and sigma = 1 / (pi h^3) so that the kernel integrates to
one over R^3.  It is C2 inside the support, its radial derivative vanishes
at r = 0 and at the support edge, and the gradient of W(|xa - xb|) with
respect to xa is (dW/dr) * (xa - xb) / r.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit


@dataclass(frozen=True)
class KernelSpec:
    """Geometry of the smoothing kernel.

    Attributes
    ----------
    h_sph : float
        Smoothing length [m].  The support radius is 2*h_sph.
    """

    h_sph: float  # smoothing length [m]
    support_radius: float = field(init=False)  # 2*h [m]
    sigma: float = field(init=False)  # 3D normalization 1/(pi h^3) [1/m^3]

    def __post_init__(self) -> None:
        if not np.isfinite(self.h_sph) or self.h_sph <= 0.0:
            raise ValueError(
                f"smoothing length must be positive and finite, got h_sph={self.h_sph}")
        object.__setattr__(self, "support_radius", 2.0 * self.h_sph)
        object.__setattr__(self, "sigma", 1.0 / (np.pi * self.h_sph ** 3))


@njit(cache=True)
def w_value(r: float, h: float) -> float:
    """Scalar kernel value W(r; h).  Hot-loop core."""
    q = r / h
    if q >= 2.0:
        return 0.0
    sigma = 1.0 / (np.pi * h * h * h)
    if q < 1.0:
        return sigma * (1.0 - 1.5 * q * q + 0.75 * q * q * q)
    d = 2.0 - q
    return sigma * 0.25 * d * d * d


@njit(cache=True)
def w_prime(r: float, h: float) -> float:
    """Scalar radial derivative dW/dr (non-positive).  Hot-loop core."""
    q = r / h
    if q >= 2.0:
        return 0.0
    sigma_h = 1.0 / (np.pi * h * h * h * h)
    if q < 1.0:
        return sigma_h * (-3.0 * q + 2.25 * q * q)
    d = 2.0 - q
    return sigma_h * (-0.75 * d * d)


def kernel_value(r, spec: KernelSpec):
    """Kernel value W(r).

    Parameters
    ----------
    r : float or ndarray
        Separation distance [m], non-negative.
    spec : KernelSpec

    Returns
    -------
    float or ndarray
        W(r) [1/m^3]; exactly zero for r >= 2*h.
    """
    r = np.asarray(r, dtype=float)
    if not np.all(np.isfinite(r)):
        raise ValueError("kernel_value: separation distance must be finite")
    if np.any(r < 0.0):
        raise ValueError("kernel_value: separation distance must be non-negative")
    q = r / spec.h_sph
    near = spec.sigma * (1.0 - 1.5 * q ** 2 + 0.75 * q ** 3)
    far = spec.sigma * 0.25 * np.clip(2.0 - q, 0.0, None) ** 3
    out = np.where(q < 1.0, near, far)
    return out if out.ndim else float(out)


def kernel_radial_derivative(r, spec: KernelSpec):
    """Radial derivative dW/dr at separation r.  Non-positive everywhere."""
    r = np.asarray(r, dtype=float)
    if not np.all(np.isfinite(r)) or np.any(r < 0.0):
        raise ValueError("kernel_radial_derivative: separation must be finite and non-negative")
    q = r / spec.h_sph
    sigma_h = spec.sigma / spec.h_sph
    near = sigma_h * (-3.0 * q + 2.25 * q ** 2)
    far = sigma_h * (-0.75 * np.clip(2.0 - q, 0.0, None) ** 2)
    out = np.where(q < 1.0, near, far)
    return out if out.ndim else float(out)


def kernel_gradient(dx_vec, spec: KernelSpec):
    """Gradient of W with respect to the computational particle position.

    Parameters
    ----------
    dx_vec : array_like, shape (3,) or (n, 3)
        Separation vector(s) [m], computational particle minus neighbour.
    spec : KernelSpec

    Returns
    -------
    ndarray
        (dW/dr) * dx_vec / |dx_vec|, shape matching the input.  Zero at
        zero separation and outside the support.  Swapping the two
        particles negates the gradient.
    """
    dx = np.asarray(dx_vec, dtype=float)
    if not np.all(np.isfinite(dx)):
        raise ValueError("kernel_gradient: separation vector must be finite")
    single = dx.ndim == 1
    dx2 = np.atleast_2d(dx)
    r = np.sqrt(np.sum(dx2 ** 2, axis=1))
    mag = np.where(r > 0.0, kernel_radial_derivative(np.atleast_1d(r), spec), 0.0)
    scale = np.where(r > 0.0, mag / np.where(r > 0.0, r, 1.0), 0.0)
    grad = dx2 * scale[:, None]
    return grad[0] if single else grad
