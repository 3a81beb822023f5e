"""Command line driver: selection, validation experiments, tables, samples.

Subcommands
-----------
select      run bandwidth selection on a numeric sample file
experiment  run a named validation study and emit a JSON document
density     tabulate a density estimate as a plain-text table
sample      draw a synthetic sample and write it to a text file

Exit codes: 0 on success, 1 on any usage or data error, 2 when a
selection run finished without converging (outputs are still written).

All outputs are deterministic for fixed inputs and seeds, except the
``wall_time_ms`` field of experiment reports, which records the actual
selection time of the run that produced the report.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
import warnings

import numpy as np

from .errors import KdebandError
from .estimator import Sample1D, Sample3D, build_grid_1d, estimate_density_1d
from .kernels import (
    KERNEL_FAMILIES,
    kernel_constants_1d,
    kernel_constants_3d,
)
from .reference import (
    analytic_optimal_bandwidth,
    eval_density,
    gaussian_1d,
    gaussian_3d,
    hernquist_profile,
    hernquist_radial_pdf,
    profile_from_radial_pdf,
    trimodal_1d,
    tsc_density_1d,
)
from .samplers import (
    RNG_NAME,
    HernquistParams,
    sample_gaussian_1d,
    sample_gaussian_3d,
    sample_hernquist_radii,
    sample_trimodal,
    sample_tsc_density,
)
from .selector import (
    BandwidthTrace,
    SelectorConfig,
    select_bandwidth_1d,
    select_bandwidth_3d,
)

__all__ = ["main", "build_parser"]

# Previously published comparison values for the truncated-sphere study at
# Np = 1.05e6 (analytic vs data-driven bandwidth).  The scale and window
# conventions behind them were not fully specified, so they are recorded
# in the hernquist experiment document for qualitative comparison only,
# never used as a pass/fail oracle.
HERNQUIST_EXTERNAL_REFERENCE = {
    "analytic_h": 0.1712,
    "data_based_h": 0.1678,
    "relative_error_percent": -1.9,
    "note": (
        "published comparison values for a truncated-sphere sample of "
        "1.05e6 radii; conventions not fully specified, qualitative only"
    ),
}

_GENERATORS_1D = {
    "gauss1d": sample_gaussian_1d,
    "tscdens1d": sample_tsc_density,
    "trimodal": sample_trimodal,
}

_DECADES_1D = [1_000, 10_000, 100_000, 1_000_000]
_DECADES_3D = [1_000, 10_000, 100_000]
_DEFAULT_SEEDS = [1, 2, 3, 4, 5]

_EXPERIMENTS = {
    "gauss1d": {"dim": 1, "np": _DECADES_1D},
    "tscdens1d": {"dim": 1, "np": _DECADES_1D},
    "trimodal": {"dim": 1, "np": _DECADES_1D},
    "gauss3d": {"dim": 3, "np": _DECADES_3D},
    "hernquist": {"dim": 1, "np": [1_050_000]},
}


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1 (2 means not
    converged in this tool)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(1)


def _parse_count(text: str) -> int:
    """Parse a point count, accepting scientific notation like 1e5."""
    value = float(text)
    count = int(round(value))
    if count < 1 or abs(value - count) > 1e-9 * max(1.0, abs(value)):
        raise argparse.ArgumentTypeError(f"not a positive integer count: {text!r}")
    return count


def _parse_count_list(text: str) -> list[int]:
    return [_parse_count(part) for part in text.split(",") if part.strip()]


def _parse_int_list(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part.strip()]


def _selector_config(args) -> SelectorConfig:
    return SelectorConfig(
        rel_tolerance=args.tol,
        max_iterations=args.max_iters,
        initial_scale_c0=args.c0,
    )


def _hernquist_params(args) -> HernquistParams:
    return HernquistParams(
        total_mass_MT=1.0,
        scale_length_rc=args.rc,
        truncation_min_r_over_rc=args.r_min_over_rc,
        truncation_max_r_over_rc=args.r_max_over_rc,
    )


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def _load_sample_file(path: str, dim: int):
    """Read a whitespace-separated numeric sample file ('#' comments)."""
    try:
        with warnings.catch_warnings():
            # An empty file is reported as a clean "no data rows" error
            # below, not as a loadtxt warning.
            warnings.simplefilter("ignore", UserWarning)
            data = np.loadtxt(path, comments="#", ndmin=2)
    except OSError as exc:
        raise KdebandError(f"cannot read sample file {path!r}: {exc}") from exc
    except ValueError as exc:
        raise KdebandError(f"malformed sample file {path!r}: {exc}") from exc
    if data.size == 0:
        raise KdebandError(f"{path!r}: no data rows")
    if dim == 1:
        if data.shape[1] != 1:
            raise KdebandError(
                f"{path!r}: expected 1 column for --dim 1, found {data.shape[1]}"
            )
        return Sample1D(data[:, 0])
    if data.shape[1] != 3:
        raise KdebandError(
            f"{path!r}: expected 3 columns for --dim 3, found {data.shape[1]}"
        )
    return Sample3D(data)


def _report(
    experiment_id: str,
    kernel_token: str,
    Np: int,
    seed: int,
    trace: BandwidthTrace,
    analytic_h,
    wall_time_ms: float,
) -> dict:
    """Assemble one experiment report with the fixed field set.

    ``seed`` is -1 when no generator seed applies (user-supplied sample).
    """
    selected = trace.final_h
    relative_error = None
    if analytic_h is not None:
        relative_error = (selected - analytic_h) / analytic_h
    return {
        "experiment_id": experiment_id,
        "kernel": kernel_token,
        "Np": Np,
        "seed": seed,
        "selected_h": selected,
        "analytic_h": analytic_h,
        "relative_error": relative_error,
        "iterations": sum(1 for it in trace.iterations if not it.backoff_applied),
        "backoffs": sum(1 for it in trace.iterations if it.backoff_applied),
        "converged": trace.converged,
        "wall_time_ms": int(round(wall_time_ms)),
        "rng_name": RNG_NAME,
    }


def _json_document(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


# ---------------------------------------------------------------------------
# experiment machinery
# ---------------------------------------------------------------------------

def _experiment_sample(name: str, Np: int, seed: int, hq_params: HernquistParams):
    if name in _GENERATORS_1D:
        return _GENERATORS_1D[name](Np, seed)
    if name == "gauss3d":
        return sample_gaussian_3d(Np, seed)
    return sample_hernquist_radii(Np, hq_params, seed)


def _experiment_density(name: str, hq_params: HernquistParams):
    """Reference law matching an experiment's sampler."""
    if name == "gauss1d":
        return gaussian_1d()
    if name == "tscdens1d":
        return tsc_density_1d()
    if name == "trimodal":
        return trimodal_1d()
    if name == "gauss3d":
        return gaussian_3d()
    rc = hq_params.scale_length_rc
    window = (
        hq_params.truncation_min_r_over_rc * rc,
        hq_params.truncation_max_r_over_rc * rc,
    )
    return hernquist_radial_pdf(rc=rc, r_window=window)


def _curve_path(out: str | None, name: str, Np: int, seed: int) -> str:
    if out is None:
        base = name
    else:
        base = out[: -len(".json")] if out.endswith(".json") else out
    return f"{base}_np{Np}_seed{seed}_curve.dat"


def _curve_table_1d(name, kernel, sample, h, density, extra_header=()) -> str:
    """Tabulate (x, estimate, analytic) on the deposit grid at h."""
    grid = build_grid_1d(sample, kernel, h)
    xs = grid.node_coordinates()
    fhat = grid.values
    f_true = eval_density(density, xs)
    lines = [
        f"# experiment: {name}",
        f"# kernel: {kernel.family}",
        f"# Np: {sample.size_Np}",
        f"# selected_h: {_fmt(h)}",
        *extra_header,
        "# columns: x f_hat f_analytic",
    ]
    for x, fh, ft in zip(xs, fhat, f_true):
        lines.append(f"{_fmt(x)} {_fmt(fh)} {_fmt(ft)}")
    return "\n".join(lines) + "\n"


def _curve_table_hernquist(name, kernel, sample, h, hq_params) -> str:
    """Tabulate the mass-density profile (r, rho_hat, rho_analytic).

    The estimate tabulates the truncated radial pdf; each particle then
    carries a mass MT * Z / Np with Z the mass fraction inside the
    truncation window, so the profile conversion uses MT * Z as the
    total mass.  Grid nodes at r <= 0 (lattice padding below the inner
    truncation radius) are dropped because the profile is undefined there.
    """
    grid = build_grid_1d(sample, kernel, h)
    rs = grid.node_coordinates()
    keep = rs > 0.0
    rs = rs[keep]
    fhat = grid.values[keep]
    rc = hq_params.scale_length_rc
    r_lo = hq_params.truncation_min_r_over_rc * rc
    r_hi = hq_params.truncation_max_r_over_rc * rc
    z = (r_hi / (r_hi + rc)) ** 2 - (r_lo / (r_lo + rc)) ** 2
    mass_in_window = hq_params.total_mass_MT * z
    rho_hat = profile_from_radial_pdf(fhat, rs, mass_in_window)
    rho_true = hernquist_profile(rs, hq_params)
    lines = [
        f"# experiment: {name}",
        f"# kernel: {kernel.family}",
        f"# Np: {sample.size_Np}",
        f"# selected_h: {_fmt(h)}",
        f"# scale_length_rc: {rc:g}",
        f"# truncation_r: [{r_lo:g}, {r_hi:g}]",
        f"# mass_in_window: {_fmt(mass_in_window)}",
        "# columns: r rho_hat rho_analytic",
    ]
    for r, ph, pt in zip(rs, rho_hat, rho_true):
        lines.append(f"{_fmt(r)} {_fmt(ph)} {_fmt(pt)}")
    return "\n".join(lines) + "\n"


def cmd_experiment(args) -> int:
    name = args.name
    study = _EXPERIMENTS[name]
    dim = study["dim"]
    np_values = sorted(set(args.np or study["np"]))
    seeds = sorted(set(args.seed or _DEFAULT_SEEDS))
    config = _selector_config(args)
    hq_params = _hernquist_params(args)
    density = _experiment_density(name, hq_params)
    if dim == 1:
        kernel = kernel_constants_1d(args.kernel)
    else:
        kernel = kernel_constants_3d(args.kernel)

    reports = []
    curves = []
    for Np in sorted(np_values):
        analytic_h = analytic_optimal_bandwidth(density, kernel, Np, dim)
        for seed in sorted(seeds):
            sample = _experiment_sample(name, Np, seed, hq_params)
            t0 = time.perf_counter()
            if dim == 1:
                trace = select_bandwidth_1d(sample, kernel, config, grid_cap=args.grid_cap)
            else:
                trace = select_bandwidth_3d(sample, kernel, config, grid_cap=args.grid_cap)
            wall_ms = (time.perf_counter() - t0) * 1e3
            reports.append(
                _report(name, args.kernel, Np, seed, trace, analytic_h, wall_ms)
            )
            if args.emit_curves and dim == 1:
                if name == "hernquist":
                    table = _curve_table_hernquist(
                        name, kernel, sample, trace.final_h, hq_params
                    )
                else:
                    table = _curve_table_1d(
                        name, kernel, sample, trace.final_h, density,
                        extra_header=(f"# seed: {seed}",),
                    )
                path = _curve_path(args.out, name, Np, seed)
                curves.append(path)
                _write_text(path, table)

    reports.sort(key=lambda r: (r["Np"], r["seed"]))
    aggregate = []
    for Np in sorted(set(np_values)):
        group = [r for r in reports if r["Np"] == Np]
        aggregate.append(
            {
                "Np": Np,
                "n_seeds": len(group),
                "analytic_h": group[0]["analytic_h"],
                "mean_selected_h": float(np.mean([r["selected_h"] for r in group])),
                "mean_abs_relative_error": float(
                    np.mean([abs(r["relative_error"]) for r in group])
                ),
            }
        )
    doc = {
        "experiment": name,
        "kernel": args.kernel,
        "dimension": dim,
        "np_values": sorted(np_values),
        "seeds": sorted(seeds),
        "config": {
            "rel_tolerance": config.rel_tolerance,
            "max_iterations": config.max_iterations,
            "initial_scale_c0": config.initial_scale_c0,
            "backoff_factor": config.backoff_factor,
            "max_backoffs": config.max_backoffs,
        },
        "rng_name": RNG_NAME,
        "reports": reports,
        "aggregate": aggregate,
    }
    if name == "hernquist":
        doc["external_reference"] = dict(HERNQUIST_EXTERNAL_REFERENCE)
    if curves:
        doc["curve_files"] = curves
    _write_text(args.out, _json_document(doc))
    return 0 if all(r["converged"] for r in reports) else 2


# ---------------------------------------------------------------------------
# select
# ---------------------------------------------------------------------------

def cmd_select(args) -> int:
    sample = _load_sample_file(args.input, args.dim)
    config = _selector_config(args)
    if args.dim == 1:
        kernel = kernel_constants_1d(args.kernel)
        t0 = time.perf_counter()
        trace = select_bandwidth_1d(sample, kernel, config, grid_cap=args.grid_cap)
    else:
        kernel = kernel_constants_3d(args.kernel)
        t0 = time.perf_counter()
        trace = select_bandwidth_3d(sample, kernel, config, grid_cap=args.grid_cap)
    wall_ms = (time.perf_counter() - t0) * 1e3
    report = _report(
        f"select-{args.dim}d", args.kernel, sample.size_Np, -1, trace, None, wall_ms
    )
    _write_text(args.out, _json_document(report))
    return 0 if trace.converged else 2


# ---------------------------------------------------------------------------
# density
# ---------------------------------------------------------------------------

def cmd_density(args) -> int:
    if (args.input is None) == (args.generator is None):
        raise KdebandError("density needs exactly one of --input or --generator")
    hq_params = _hernquist_params(args)
    density = None
    if args.generator is not None:
        if args.generator == "gauss3d":
            raise KdebandError("density tables are 1D only; gauss3d is not supported")
        sample = _experiment_sample(args.generator, args.np, args.seed, hq_params)
        density = _experiment_density(args.generator, hq_params)
        source = f"{args.generator} Np={args.np} seed={args.seed}"
    else:
        sample = _load_sample_file(args.input, 1)
        source = args.input
    kernel = kernel_constants_1d(args.kernel)

    exit_code = 0
    if args.h is not None:
        h = args.h
        h_note = "fixed"
    else:
        config = _selector_config(args)
        trace = select_bandwidth_1d(sample, kernel, config, grid_cap=args.grid_cap)
        h = trace.final_h
        h_note = "auto"
        if not trace.converged:
            exit_code = 2

    lines = [
        f"# source: {source}",
        f"# kernel: {args.kernel}",
        f"# Np: {sample.size_Np}",
        f"# h: {_fmt(h)} ({h_note})",
    ]
    if args.grid_min is not None or args.grid_max is not None or args.grid_points is not None:
        if None in (args.grid_min, args.grid_max, args.grid_points):
            raise KdebandError(
                "--grid-min, --grid-max and --grid-points must be given together"
            )
        if not args.grid_max > args.grid_min or args.grid_points < 2:
            raise KdebandError("need grid_max > grid_min and at least 2 grid points")
        xs = np.linspace(args.grid_min, args.grid_max, args.grid_points)
        fhat = estimate_density_1d(sample, kernel, h, xs)
    else:
        grid = build_grid_1d(sample, kernel, h, grid_cap=args.grid_cap)
        xs = grid.node_coordinates()
        fhat = grid.values
        if density is not None and density.identifier == "hernquist_radial_pdf":
            # Lattice padding can reach below r=0 where the radial law is
            # undefined; drop those nodes from the table.
            keep = xs >= 0.0
            xs, fhat = xs[keep], fhat[keep]
    if density is not None:
        f_true = eval_density(density, xs)
        lines.append("# columns: x f_hat f_analytic")
        for x, fh, ft in zip(xs, fhat, f_true):
            lines.append(f"{_fmt(x)} {_fmt(fh)} {_fmt(ft)}")
    else:
        lines.append("# columns: x f_hat f_analytic(NA)")
        for x, fh in zip(xs, fhat):
            lines.append(f"{_fmt(x)} {_fmt(fh)} NA")
    _write_text(args.out, "\n".join(lines) + "\n")
    return exit_code


# ---------------------------------------------------------------------------
# sample
# ---------------------------------------------------------------------------

def cmd_sample(args) -> int:
    hq_params = _hernquist_params(args)
    sample = _experiment_sample(args.generator, args.np, args.seed, hq_params)
    lines = [
        f"# generator: {args.generator}",
        f"# Np: {args.np}",
        f"# seed: {args.seed}",
        f"# rng: {RNG_NAME}",
    ]
    if args.generator == "hernquist":
        lines += [
            f"# total_mass_MT: {hq_params.total_mass_MT:g}",
            f"# scale_length_rc: {hq_params.scale_length_rc:g}",
            f"# truncation_r_over_rc: [{hq_params.truncation_min_r_over_rc:g}, "
            f"{hq_params.truncation_max_r_over_rc:g}]",
        ]
    pts = sample.points
    if pts.ndim == 1:
        lines += [_fmt(v) for v in pts]
    else:
        lines += [" ".join(_fmt(v) for v in row) for row in pts]
    _write_text(args.out, "\n".join(lines) + "\n")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_selector_flags(p) -> None:
    p.add_argument("--kernel", type=str.lower,
                   choices=list(KERNEL_FAMILIES) + [f + "3" for f in KERNEL_FAMILIES],
                   default="tsc",
                   help="assignment kernel family; the explicit 3D spellings "
                        "(ngp3/cic3/tsc3) are accepted with --dim 3 "
                        "(default tsc)")
    p.add_argument("--tol", type=float, default=1e-3,
                   help="relative convergence tolerance on h (default 1e-3)")
    p.add_argument("--max-iters", type=int, default=100,
                   help="cap on bandwidth updates (default 100)")
    p.add_argument("--c0", type=float, default=2.0,
                   help="initial bandwidth scale c0 (default 2.0)")
    p.add_argument("--grid-cap", type=int, default=None,
                   help="override the node/cell cap on deposit grids")


def _add_hernquist_flags(p) -> None:
    p.add_argument("--rc", type=float, default=1.0,
                   help="Hernquist scale length r_c (default 1)")
    p.add_argument("--r-min-over-rc", type=float, default=0.05,
                   help="inner truncation radius in units of r_c (default 0.05)")
    p.add_argument("--r-max-over-rc", type=float, default=1000.0,
                   help="outer truncation radius in units of r_c (default 1000)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="kdeband",
        description="Kernel density estimation with data-driven bandwidth selection.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sel = sub.add_parser("select", help="select a bandwidth for a sample file")
    p_sel.add_argument("--input", required=True, help="numeric sample file")
    p_sel.add_argument("--dim", type=int, choices=[1, 3], required=True)
    _add_selector_flags(p_sel)
    p_sel.add_argument("--out", default=None, help="write the JSON report here")
    p_sel.set_defaults(func=cmd_select)

    p_exp = sub.add_parser("experiment", help="run a named validation study")
    p_exp.add_argument("name", choices=sorted(_EXPERIMENTS))
    p_exp.add_argument("--np", type=_parse_count_list, default=None,
                       help="comma-separated point counts (default: study decades)")
    p_exp.add_argument("--seed", type=_parse_int_list, default=None,
                       help="comma-separated seeds (default: 1,2,3,4,5)")
    _add_selector_flags(p_exp)
    _add_hernquist_flags(p_exp)
    p_exp.add_argument("--emit-curves", action="store_true",
                       help="also write (x, estimate, analytic) tables per run "
                            "(1D studies only)")
    p_exp.add_argument("--out", default=None, help="write the JSON document here")
    p_exp.set_defaults(func=cmd_experiment)

    p_den = sub.add_parser("density", help="tabulate a 1D density estimate")
    p_den.add_argument("--input", default=None, help="numeric 1D sample file")
    p_den.add_argument("--generator", choices=sorted(_GENERATORS_1D) + ["hernquist"],
                       default=None, help="draw the sample instead of reading a file")
    p_den.add_argument("--np", type=_parse_count, default=10_000,
                       help="points to draw with --generator (default 1e4)")
    p_den.add_argument("--seed", type=int, default=1,
                       help="seed for --generator (default 1)")
    group = p_den.add_mutually_exclusive_group(required=True)
    group.add_argument("--h", type=float, default=None, help="fixed bandwidth")
    group.add_argument("--auto", action="store_true",
                       help="select the bandwidth from the data")
    _add_selector_flags(p_den)
    _add_hernquist_flags(p_den)
    p_den.add_argument("--grid-min", type=float, default=None)
    p_den.add_argument("--grid-max", type=float, default=None)
    p_den.add_argument("--grid-points", type=int, default=None)
    p_den.add_argument("--out", default=None, help="write the table here")
    p_den.set_defaults(func=cmd_density)

    p_sam = sub.add_parser("sample", help="draw a synthetic sample")
    p_sam.add_argument("--generator", required=True,
                       choices=sorted(_GENERATORS_1D) + ["gauss3d", "hernquist"])
    p_sam.add_argument("--np", type=_parse_count, required=True)
    p_sam.add_argument("--seed", type=int, required=True)
    _add_hernquist_flags(p_sam)
    p_sam.add_argument("--out", default=None, help="write the sample here")
    p_sam.set_defaults(func=cmd_sample)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 0 for --help and (via _Parser.error) 1 for usage
        # errors; surface those as return codes so main() is embeddable.
        return exc.code if isinstance(exc.code, int) else 1
    try:
        return args.func(args)
    except KdebandError as exc:
        sys.stderr.write(f"kdeband: error: {exc}\n")
        return 1
    except OSError as exc:
        sys.stderr.write(f"kdeband: error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
