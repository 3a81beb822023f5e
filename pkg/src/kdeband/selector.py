"""Data-driven optimal bandwidth selection by iterated plug-in.

For a kernel K with roughness R(K) and second moment mu2, the asymptotic
mean integrated squared error of the density estimate at bandwidth h is

    AMISE(h) = R(K) / (h^d Np) + h^4 * R_d(f) * (mu2 / 2)^2,

where R_d(f) is the curvature roughness of the true density (integral of
f''^2 in 1D, of (laplacian f)^2 in 3D).  Minimising over h gives the
closed-form optimum

    h_opt = [ R(K)   / (R_1 mu2^2) ]^(1/5) * Np^(-1/5)   (d = 1)
    h_opt = [ 3 R(K3) / (R_3 mu2^2) ]^(1/7) * Np^(-1/7)  (d = 3).

R_d(f) is unknown, so it is estimated from the sample itself with
:mod:`kdeband.roughness` and the two equations are iterated to a fixed
point: measure the corrected roughness at the current h, plug it into the
h_opt formula, repeat until the relative change in h falls below the
tolerance.  If the corrected roughness comes back non-positive (noise
dominated), the bandwidth is multiplied by a backoff factor and the
iteration continues from there.

The full history is returned as a :class:`BandwidthTrace` so callers can
inspect convergence behaviour; nothing about the procedure requires
knowledge of the true density.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    BackoffExhausted,
    DegenerateSample,
    DomainError,
    NonPositiveBandwidth,
    NonPositiveRoughness,
)
from .estimator import Sample1D, Sample3D
from .kernels import Kernel1D, Kernel3D
from .roughness import corrected_roughness_1d, corrected_roughness_3d

__all__ = [
    "SelectorConfig",
    "IterationRecord",
    "BandwidthTrace",
    "optimal_bandwidth_1d",
    "optimal_bandwidth_3d",
    "amise_1d",
    "select_bandwidth_1d",
    "select_bandwidth_3d",
]


@dataclass(frozen=True)
class SelectorConfig:
    """Tunables of the fixed-point iteration.

    Attributes
    ----------
    rel_tolerance : float
        Stop once |h_new - h_old| / h_old drops to this level.
    max_iterations : int
        Cap on bandwidth updates (backoffs are counted separately).
    initial_scale_c0 : float
        The starting bandwidth is c0 * std * Np^(-1/(4+d)).
    backoff_factor : float
        Multiplier applied to h when corrected roughness is non-positive.
    max_backoffs : int
        Total backoffs allowed before giving up.
    """

    rel_tolerance: float = 1e-3
    max_iterations: int = 100
    initial_scale_c0: float = 2.0
    backoff_factor: float = 2.0
    max_backoffs: int = 60

    def __post_init__(self):
        if not 0.0 < self.rel_tolerance < 1.0:
            raise DomainError("rel_tolerance must lie in (0, 1)")
        if self.max_iterations < 1:
            raise DomainError("max_iterations must be at least 1")
        if not self.initial_scale_c0 > 0.0:
            raise DomainError("initial_scale_c0 must be positive")
        if not self.backoff_factor > 1.0:
            raise DomainError("backoff_factor must exceed 1")
        if self.max_backoffs < 1:
            raise DomainError("max_backoffs must be at least 1")


@dataclass(frozen=True)
class IterationRecord:
    """One step of the iteration.

    ``raw_roughness`` and ``corrected_roughness`` were measured at the
    step's input bandwidth; ``h`` is the bandwidth the step produced
    (the plug-in update, or the backed-off value when
    ``backoff_applied`` is set).
    """

    h: float
    raw_roughness: float
    corrected_roughness: float
    backoff_applied: bool


@dataclass(frozen=True)
class BandwidthTrace:
    """Complete history of a selection run."""

    iterations: tuple[IterationRecord, ...]
    converged: bool
    final_h: float


def _check_np(Np: int) -> int:
    Np = int(Np)
    if Np < 1:
        raise DomainError("Np must be at least 1")
    return Np


def optimal_bandwidth_1d(roughness_f2: float, kernel: Kernel1D, Np: int) -> float:
    """Closed-form AMISE-optimal 1D bandwidth for a known curvature roughness."""
    Np = _check_np(Np)
    roughness_f2 = float(roughness_f2)
    if not roughness_f2 > 0.0:
        raise NonPositiveRoughness(
            f"curvature roughness must be positive, got {roughness_f2!r}"
        )
    mu2 = kernel.second_moment_mu2
    return (kernel.roughness_RK / (roughness_f2 * mu2 ** 2)) ** 0.2 * Np ** -0.2


def optimal_bandwidth_3d(roughness_lap: float, kernel: Kernel3D, Np: int) -> float:
    """Closed-form AMISE-optimal 3D bandwidth for a known Laplacian roughness."""
    Np = _check_np(Np)
    roughness_lap = float(roughness_lap)
    if not roughness_lap > 0.0:
        raise NonPositiveRoughness(
            f"Laplacian roughness must be positive, got {roughness_lap!r}"
        )
    mu2 = kernel.second_moment_mu2
    return (3.0 * kernel.roughness_RK3 / (roughness_lap * mu2 ** 2)) ** (1.0 / 7.0) * Np ** (
        -1.0 / 7.0
    )


def amise_1d(h: float, kernel: Kernel1D, roughness_f2: float, Np: int) -> float:
    """Asymptotic MISE of the 1D estimate at bandwidth h.

    AMISE(h) = R(K)/(h Np) + h^4 * R_1 * (mu2/2)^2.
    """
    Np = _check_np(Np)
    h = float(h)
    if not h > 0.0:
        raise NonPositiveBandwidth(f"bandwidth must be positive, got {h!r}")
    roughness_f2 = float(roughness_f2)
    if not roughness_f2 > 0.0:
        raise NonPositiveRoughness(
            f"curvature roughness must be positive, got {roughness_f2!r}"
        )
    variance = kernel.roughness_RK / (h * Np)
    bias = h ** 4 * roughness_f2 * (kernel.second_moment_mu2 / 2.0) ** 2
    return variance + bias


def _run_selection(measure, update, h0: float, config: SelectorConfig) -> BandwidthTrace:
    """Shared fixed-point driver for both dimensionalities."""
    h = h0
    records: list[IterationRecord] = []
    n_updates = 0
    n_backoffs = 0
    converged = False
    while n_updates < config.max_iterations:
        res = measure(h)
        if res.corrected <= 0.0:
            if n_backoffs >= config.max_backoffs:
                raise BackoffExhausted(
                    f"corrected roughness stayed non-positive after "
                    f"{config.max_backoffs} backoffs (h reached {h:g})"
                )
            h_new = h * config.backoff_factor
            records.append(
                IterationRecord(
                    h=h_new,
                    raw_roughness=res.raw,
                    corrected_roughness=res.corrected,
                    backoff_applied=True,
                )
            )
            h = h_new
            n_backoffs += 1
            continue
        h_new = update(res.corrected)
        records.append(
            IterationRecord(
                h=h_new,
                raw_roughness=res.raw,
                corrected_roughness=res.corrected,
                backoff_applied=False,
            )
        )
        n_updates += 1
        rel_change = abs(h_new - h) / h
        h = h_new
        if rel_change <= config.rel_tolerance:
            converged = True
            break
    return BandwidthTrace(iterations=tuple(records), converged=converged, final_h=h)


def select_bandwidth_1d(
    sample: Sample1D,
    kernel: Kernel1D,
    config: SelectorConfig | None = None,
    *,
    grid_cap: int | None = None,
) -> BandwidthTrace:
    """Select the 1D bandwidth from the data alone.

    Starts from h0 = c0 * std * Np^(-1/5) and iterates the corrected
    roughness measurement against the closed-form optimum until the
    bandwidth is stable to the configured relative tolerance.
    """
    config = config or SelectorConfig()
    Np = sample.size_Np
    if Np < 2:
        raise DegenerateSample("bandwidth selection needs at least 2 points")
    std = sample.std
    if not std > 0.0:
        raise DegenerateSample("sample has zero spread; no finite bandwidth exists")
    h0 = config.initial_scale_c0 * std * Np ** -0.2
    return _run_selection(
        measure=lambda h: corrected_roughness_1d(sample, kernel, h, grid_cap=grid_cap),
        update=lambda rough: optimal_bandwidth_1d(rough, kernel, Np),
        h0=h0,
        config=config,
    )


def select_bandwidth_3d(
    sample: Sample3D,
    kernel: Kernel3D,
    config: SelectorConfig | None = None,
    *,
    grid_cap: int | None = None,
) -> BandwidthTrace:
    """Select the 3D bandwidth from the data alone.

    Starts from h0 = c0 * std_bar * Np^(-1/7), with std_bar the mean of
    the per-axis standard deviations, and iterates as in 1D with the
    3D roughness and optimum.
    """
    config = config or SelectorConfig()
    Np = sample.size_Np
    if Np < 2:
        raise DegenerateSample("bandwidth selection needs at least 2 points")
    std = sample.std
    if not std > 0.0:
        raise DegenerateSample("sample has zero spread; no finite bandwidth exists")
    h0 = config.initial_scale_c0 * std * Np ** (-1.0 / 7.0)
    return _run_selection(
        measure=lambda h: corrected_roughness_3d(sample, kernel, h, grid_cap=grid_cap),
        update=lambda rough: optimal_bandwidth_3d(rough, kernel, Np),
        h0=h0,
        config=config,
    )
