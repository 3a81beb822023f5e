"""Particle-assignment kernels and their exact analytic constants.

Three classic assignment kernels are provided in one and three dimensions:

* ``ngp`` -- nearest grid point, a top-hat of full width 1,
* ``cic`` -- cloud in cell, a triangle of full width 2,
* ``tsc`` -- triangular shaped cloud, a piecewise parabola of full width 3.

Each kernel carries the closed-form constants that bandwidth selection
needs: the integer support width ``w`` (in units of the bandwidth), the
roughness ``R(K) = integral K^2`` and the second moment
``mu2 = integral u^2 K(u) du``.  The 3D variants (families ``ngp3``,
``cic3``, ``tsc3``) are radial profiles ``K3(x) = normalization * W(|x|)``
built from the same piecewise shapes, normalised to integrate to one
over R^3; their ``mu2`` is the per-axis second moment
``integral x1^2 K3(x) d^3x``.

All constants are exact rationals (or rational multiples of 1/pi) and are
spelled out as such rather than floating literals wherever possible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "Kernel1D",
    "Kernel3D",
    "kernel_constants_1d",
    "kernel_constants_3d",
    "eval_kernel_1d",
    "eval_kernel_3d",
    "eval_kernel_3d_radial",
    "KERNEL_FAMILIES",
]

KERNEL_FAMILIES = ("ngp", "cic", "tsc")


@dataclass(frozen=True)
class Kernel1D:
    """Descriptor of a 1D assignment kernel.

    Attributes
    ----------
    family : str
        Kernel token, one of ``"ngp"``, ``"cic"``, ``"tsc"``.
    width_w : int
        Support width in bandwidth units: K(u) = 0 for |u| > w/2.
    roughness_RK : float
        R(K) = integral of K(u)^2 du.
    second_moment_mu2 : float
        mu2 = integral of u^2 K(u) du.
    """

    family: str
    width_w: int
    roughness_RK: float
    second_moment_mu2: float


@dataclass(frozen=True)
class Kernel3D:
    """Descriptor of a radial 3D kernel K3(x) = normalization * W(|x|).

    Attributes
    ----------
    family : str
        One of ``"ngp3"``, ``"cic3"``, ``"tsc3"``.
    width_w : int
        Radial support in bandwidth units: K3(x) = 0 for |x| > w/2.
    normalization : float
        Makes K3 integrate to 1 over R^3 (6/pi, 3/pi, 2/pi respectively).
    roughness_RK3 : float
        R(K3) = integral of K3(x)^2 d^3x.
    second_moment_mu2 : float
        Per-axis second moment: integral of x1^2 K3(x) d^3x.
    """

    family: str
    width_w: int
    normalization: float
    roughness_RK3: float
    second_moment_mu2: float


# Exact constants.  1D: R(K) and mu2 are elementary integrals of the
# piecewise shapes.  3D: normalization = 1 / (4 pi integral r^2 W(r) dr),
# RK3 = 4 pi normalization^2 integral r^2 W(r)^2 dr, and mu2 is one third
# of the radial second moment 4 pi normalization integral r^4 W(r) dr.
_CONSTANTS_1D = {
    "ngp": Kernel1D("ngp", 1, 1.0, 1.0 / 12.0),
    "cic": Kernel1D("cic", 2, 2.0 / 3.0, 1.0 / 6.0),
    "tsc": Kernel1D("tsc", 3, 11.0 / 20.0, 1.0 / 4.0),
}

_CONSTANTS_3D = {
    "ngp": Kernel3D("ngp3", 1, 6.0 / np.pi, 6.0 / np.pi, 1.0 / 20.0),
    "cic": Kernel3D("cic3", 2, 3.0 / np.pi, 6.0 / (5.0 * np.pi), 2.0 / 15.0),
    "tsc": Kernel3D("tsc3", 3, 2.0 / np.pi, 43.0 / (70.0 * np.pi), 13.0 / 60.0),
}


def _base_family(family: str) -> str:
    """Map a 3D family token to its 1D base shape ('tsc3' -> 'tsc')."""
    return family[:-1] if family.endswith("3") else family


def kernel_constants_1d(family: str) -> Kernel1D:
    """Return the 1D kernel descriptor for a (case-insensitive) family token."""
    try:
        return _CONSTANTS_1D[str(family).lower()]
    except KeyError:
        raise DomainError(
            f"unknown kernel family {family!r}; expected one of {KERNEL_FAMILIES}"
        ) from None


def kernel_constants_3d(family: str) -> Kernel3D:
    """Return the 3D kernel descriptor; accepts 'tsc' or 'tsc3' style tokens,
    case-insensitive."""
    try:
        return _CONSTANTS_3D[_base_family(str(family).lower())]
    except KeyError:
        raise DomainError(
            f"unknown kernel family {family!r}; expected one of {KERNEL_FAMILIES}"
        ) from None


def _piecewise_shape(family: str, a: np.ndarray) -> np.ndarray:
    """Evaluate the dimensionless shape W at |u| = a >= 0.

    Branch boundaries are closed and the first matching branch wins, so
    e.g. the NGP kernel is 1 at |u| = 1/2 exactly.
    """
    if family == "ngp":
        return np.where(a <= 0.5, 1.0, 0.0)
    if family == "cic":
        return np.where(a <= 1.0, 1.0 - a, 0.0)
    if family == "tsc":
        return np.select(
            [a <= 0.5, a <= 1.5],
            [0.75 - a * a, 0.5 * (1.5 - a) ** 2],
            default=0.0,
        )
    raise DomainError(
        f"unknown kernel family {family!r}; expected one of {KERNEL_FAMILIES}"
    )


def eval_kernel_1d(kernel: Kernel1D, u):
    """Evaluate K(u) elementwise.

    Parameters
    ----------
    kernel : Kernel1D
    u : array_like
        Dimensionless offsets (x - x_i) / h.

    Returns
    -------
    ndarray or float
        Kernel values; zero outside |u| <= w/2.
    """
    u = np.asarray(u, dtype=float)
    out = _piecewise_shape(kernel.family, np.abs(u))
    return out if out.ndim else float(out)


def eval_kernel_3d_radial(kernel: Kernel3D, r):
    """Evaluate the radial kernel at radius r >= 0 (in bandwidth units)."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0.0):
        raise DomainError("radial kernel argument must be non-negative")
    out = kernel.normalization * _piecewise_shape(_base_family(kernel.family), r)
    return out if out.ndim else float(out)


def eval_kernel_3d(kernel: Kernel3D, x):
    """Evaluate K3 at one 3-vector, or at each row of an (M, 3) array.

    K3(x) = normalization * W(|x|) with the piecewise shape of the
    kernel's 1D base family.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim == 1 and x.shape == (3,):
        return eval_kernel_3d_radial(kernel, float(np.sqrt(np.dot(x, x))))
    if x.ndim != 2 or x.shape[1] != 3:
        raise DomainError("x must be a 3-vector or an (M, 3) array")
    return eval_kernel_3d_radial(kernel, np.sqrt(np.einsum("ij,ij->i", x, x)))
