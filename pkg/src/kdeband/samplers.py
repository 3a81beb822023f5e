"""Deterministic synthetic samples for the validation studies.

Every sampler takes an integer seed and builds its own
``numpy.random.default_rng(seed)``, so a (sampler, Np, seed) triple pins
the returned sample exactly.  The generator identity is exported as
``RNG_NAME`` and recorded in experiment reports, because reproducing the
byte-identical sample stream requires the same generator and numpy
version.

Available laws:

* standard normal in 1D and 3D,
* the triangular-shaped-cloud kernel itself used as a density (it is a
  valid pdf: non-negative with unit integral), drawn by rejection,
* a three-component normal mixture with well separated scales,
* radii of a truncated Hernquist sphere, drawn by inverting the enclosed
  mass fraction M(<r)/MT = (r/(r+r_c))^2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .estimator import Sample1D, Sample3D
from .kernels import eval_kernel_1d, kernel_constants_1d

__all__ = [
    "RNG_NAME",
    "HernquistParams",
    "TRIMODAL_MEANS",
    "TRIMODAL_SIGMAS",
    "TRIMODAL_WEIGHTS",
    "sample_gaussian_1d",
    "sample_tsc_density",
    "sample_trimodal",
    "sample_gaussian_3d",
    "sample_hernquist_radii",
]

RNG_NAME = f"numpy.random.Generator(PCG64), numpy=={np.__version__}"

# Three-component normal mixture: means, per-component sigmas, equal weights.
TRIMODAL_MEANS = (0.0, -4.0, 4.0)
TRIMODAL_SIGMAS = (1.0, 2.0, 0.5)
TRIMODAL_WEIGHTS = (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)


@dataclass(frozen=True)
class HernquistParams:
    """Parameters of the truncated Hernquist sphere.

    The mass density is rho(r) = (MT/(2 pi)) * (r_c/r) / (r + r_c)^3,
    sampled only between the two truncation radii (given in units of
    r_c).  MT is carried along for profile conversions; the radial pdf
    itself is MT-independent.
    """

    total_mass_MT: float = 1.0
    scale_length_rc: float = 1.0
    truncation_min_r_over_rc: float = 0.05
    truncation_max_r_over_rc: float = 1000.0

    def __post_init__(self):
        if not self.total_mass_MT > 0.0:
            raise DomainError("total_mass_MT must be positive")
        if not self.scale_length_rc > 0.0:
            raise DomainError("scale_length_rc must be positive")
        if self.truncation_min_r_over_rc < 0.0:
            raise DomainError("truncation_min_r_over_rc must be non-negative")
        if not self.truncation_min_r_over_rc < self.truncation_max_r_over_rc:
            raise DomainError("need truncation_min_r_over_rc < truncation_max_r_over_rc")


def _check_count(Np: int) -> int:
    Np = int(Np)
    if Np < 1:
        raise DomainError("Np must be at least 1")
    return Np


def sample_gaussian_1d(Np: int, seed: int) -> Sample1D:
    """Np standard normal draws."""
    Np = _check_count(Np)
    rng = np.random.default_rng(seed)
    return Sample1D(rng.standard_normal(Np))


def sample_gaussian_3d(Np: int, seed: int) -> Sample3D:
    """Np isotropic standard normal draws in 3D."""
    Np = _check_count(Np)
    rng = np.random.default_rng(seed)
    return Sample3D(rng.standard_normal((Np, 3)))


def sample_tsc_density(Np: int, seed: int) -> Sample1D:
    """Draw from the TSC shape used as a pdf, by rejection.

    Proposal: y uniform on [-3/2, 3/2], height uniform on [0, 3/4]
    (the kernel's maximum), acceptance rate 4/9.  Chunk sizes depend
    only on the remaining deficit, so the draw is reproducible for a
    given seed.
    """
    Np = _check_count(Np)
    tsc = kernel_constants_1d("tsc")
    rng = np.random.default_rng(seed)
    out = np.empty(Np, dtype=float)
    filled = 0
    while filled < Np:
        m = max(4096, int(np.ceil((Np - filled) * 9.0 / 4.0 * 1.05)))
        y = rng.uniform(-1.5, 1.5, m)
        u = rng.uniform(0.0, 0.75, m)
        acc = y[u <= eval_kernel_1d(tsc, y)]
        take = min(Np - filled, acc.size)
        out[filled : filled + take] = acc[:take]
        filled += take
    return Sample1D(out)


def sample_trimodal(Np: int, seed: int) -> Sample1D:
    """Draw from the equal-weight three-component normal mixture."""
    Np = _check_count(Np)
    rng = np.random.default_rng(seed)
    labels = rng.integers(0, 3, Np)
    mus = np.asarray(TRIMODAL_MEANS)[labels]
    sigs = np.asarray(TRIMODAL_SIGMAS)[labels]
    return Sample1D(mus + sigs * rng.standard_normal(Np))


def sample_hernquist_radii(Np: int, params: HernquistParams, seed: int) -> Sample1D:
    """Radii of a truncated Hernquist sphere by inverse transform.

    The enclosed mass fraction F(r) = (r/(r+r_c))^2 inverts in closed
    form: r = r_c sqrt(q) / (1 - sqrt(q)).  Drawing q uniformly between
    F(r_min) and F(r_max) yields radii from the truncated law exactly.
    """
    Np = _check_count(Np)
    rc = params.scale_length_rc
    r_lo = params.truncation_min_r_over_rc * rc
    r_hi = params.truncation_max_r_over_rc * rc
    f_lo = (r_lo / (r_lo + rc)) ** 2
    f_hi = (r_hi / (r_hi + rc)) ** 2
    rng = np.random.default_rng(seed)
    q = rng.uniform(f_lo, f_hi, Np)
    s = np.sqrt(q)
    return Sample1D(rc * s / (1.0 - s))
