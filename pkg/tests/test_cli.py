"""End-to-end tests of the command line driver.

All invocations go through ``kdeband.cli.main(argv)`` in process, so exit
codes, stdout/stderr, and written files are all observable.  Exit code
conventions: 0 success, 1 usage or data error, 2 selection finished
without converging (outputs still written).
"""

import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from kdeband.cli import HERNQUIST_EXTERNAL_REFERENCE, main
from kdeband.kernels import kernel_constants_1d
from kdeband.reference import (
    analytic_optimal_bandwidth,
    eval_density,
    gaussian_1d,
    hernquist_radial_pdf,
)
from kdeband.samplers import RNG_NAME, sample_gaussian_1d, sample_gaussian_3d

REPORT_FIELDS = [
    "experiment_id",
    "kernel",
    "Np",
    "seed",
    "selected_h",
    "analytic_h",
    "relative_error",
    "iterations",
    "backoffs",
    "converged",
    "wall_time_ms",
    "rng_name",
]

H_TSC_GAUSS_1E5 = 0.2107682881168361


def _write_sample(path, values):
    np.savetxt(path, np.asarray(values))
    return str(path)


def _strip_wall_times(doc):
    doc = json.loads(json.dumps(doc))
    for rep in doc.get("reports", []):
        rep.pop("wall_time_ms", None)
    doc.pop("wall_time_ms", None)
    return doc


# ---------------------------------------------------------------------------
# select
# ---------------------------------------------------------------------------


def test_select_gaussian_file_report(tmp_path, capsys):
    """Selecting on a 1e5-point normal sample file prints one JSON report
    with the fixed field set (in order), a -1 seed for file input, and a
    bandwidth within 5 percent of the closed-form optimum."""
    path = _write_sample(tmp_path / "g.txt", sample_gaussian_1d(100_000, seed=1).points)
    rc = main(["select", "--input", path, "--dim", "1"])
    out = capsys.readouterr().out
    assert rc == 0
    report = json.loads(out)
    assert list(report) == REPORT_FIELDS
    assert report["experiment_id"] == "select-1d"
    assert report["kernel"] == "tsc"
    assert report["Np"] == 100_000
    assert report["seed"] == -1
    assert report["analytic_h"] is None
    assert report["relative_error"] is None
    assert report["converged"] is True
    assert isinstance(report["wall_time_ms"], int)
    assert report["wall_time_ms"] >= 0
    assert report["rng_name"] == RNG_NAME
    assert abs(report["selected_h"] - H_TSC_GAUSS_1E5) / H_TSC_GAUSS_1E5 < 0.05


def test_select_3d_file(tmp_path, capsys):
    path = _write_sample(tmp_path / "g3.txt", sample_gaussian_3d(2000, seed=2).points)
    rc = main(["select", "--input", path, "--dim", "3", "--kernel", "tsc"])
    report = json.loads(capsys.readouterr().out)
    assert rc == 0
    assert report["experiment_id"] == "select-3d"
    assert report["Np"] == 2000
    assert report["converged"] is True
    assert report["selected_h"] > 0.0


def test_select_kernel_token_case_insensitive(tmp_path, capsys):
    path = _write_sample(tmp_path / "g.txt", sample_gaussian_1d(2000, seed=1).points)
    rc = main(["select", "--input", path, "--dim", "1", "--kernel", "TSC"])
    report = json.loads(capsys.readouterr().out)
    assert rc == 0
    assert report["kernel"] == "tsc"


def test_select_explicit_3d_kernel_spelling(tmp_path, capsys):
    """The explicit 3D spelling names the same kernel as the base family
    with --dim 3, and is rejected cleanly for 1D input."""
    path = _write_sample(tmp_path / "g3.txt", sample_gaussian_3d(2000, seed=2).points)
    rc = main(["select", "--input", path, "--dim", "3", "--kernel", "tsc3"])
    explicit = json.loads(capsys.readouterr().out)
    assert rc == 0
    assert explicit["kernel"] == "tsc3"
    rc = main(["select", "--input", path, "--dim", "3", "--kernel", "tsc"])
    base = json.loads(capsys.readouterr().out)
    assert rc == 0
    assert base["selected_h"] == explicit["selected_h"]

    path1 = _write_sample(tmp_path / "g1.txt", sample_gaussian_1d(2000, seed=1).points)
    rc = main(["select", "--input", path1, "--dim", "1", "--kernel", "tsc3"])
    err = capsys.readouterr().err
    assert rc == 1
    assert "unknown kernel family" in err


def test_select_empty_file(tmp_path, capsys):
    path = tmp_path / "empty.txt"
    path.write_text("# only a comment\n")
    rc = main(["select", "--input", str(path), "--dim", "1"])
    err = capsys.readouterr().err
    assert rc == 1
    assert "no data rows" in err


def test_select_malformed_file(tmp_path, capsys):
    path = tmp_path / "bad.txt"
    path.write_text("0.5\n0.7\nnot-a-number\n")
    rc = main(["select", "--input", str(path), "--dim", "1"])
    err = capsys.readouterr().err
    assert rc == 1
    assert "malformed sample file" in err
    assert "bad.txt" in err


def test_select_dimension_mismatch(tmp_path, capsys):
    path = _write_sample(tmp_path / "g3.txt", sample_gaussian_3d(100, seed=0).points)
    rc = main(["select", "--input", path, "--dim", "1"])
    err = capsys.readouterr().err
    assert rc == 1
    assert "expected 1 column" in err


def test_select_missing_file(tmp_path, capsys):
    rc = main(["select", "--input", str(tmp_path / "nope.txt"), "--dim", "1"])
    err = capsys.readouterr().err
    assert rc == 1
    assert "cannot read sample file" in err


def test_select_not_converged_exit_2(tmp_path, capsys):
    """An iteration cap of 1 cannot satisfy the tolerance; the report is
    still written but the exit code flags the non-convergence."""
    path = _write_sample(tmp_path / "g.txt", sample_gaussian_1d(5000, seed=4).points)
    rc = main(["select", "--input", path, "--dim", "1", "--max-iters", "1"])
    report = json.loads(capsys.readouterr().out)
    assert rc == 2
    assert report["converged"] is False
    assert report["iterations"] == 1
    assert report["selected_h"] > 0.0


def test_select_out_file(tmp_path, capsys):
    sample_path = _write_sample(tmp_path / "g.txt", sample_gaussian_1d(2000, seed=1).points)
    out_path = tmp_path / "report.json"
    rc = main(["select", "--input", sample_path, "--dim", "1", "--out", str(out_path)])
    assert rc == 0
    assert capsys.readouterr().out == ""
    report = json.loads(out_path.read_text())
    assert list(report) == REPORT_FIELDS


# ---------------------------------------------------------------------------
# experiment
# ---------------------------------------------------------------------------


def test_experiment_document_structure(tmp_path):
    out = tmp_path / "doc.json"
    argv = [
        "experiment", "gauss1d", "--np", "2000,1000", "--seed", "2,1",
        "--out", str(out),
    ]
    rc = main(argv)
    assert rc == 0
    doc = json.loads(out.read_text())
    assert list(doc) == [
        "experiment", "kernel", "dimension", "np_values", "seeds",
        "config", "rng_name", "reports", "aggregate",
    ]
    assert doc["experiment"] == "gauss1d"
    assert doc["dimension"] == 1
    assert doc["np_values"] == [1000, 2000]
    assert doc["seeds"] == [1, 2]
    assert doc["config"]["rel_tolerance"] == 1e-3
    assert doc["rng_name"] == RNG_NAME

    # reports are sorted by (Np, seed) and carry the fixed field set
    assert [(r["Np"], r["seed"]) for r in doc["reports"]] == [
        (1000, 1), (1000, 2), (2000, 1), (2000, 2),
    ]
    for rep in doc["reports"]:
        assert list(rep) == REPORT_FIELDS
        assert rep["experiment_id"] == "gauss1d"
        expected_h = analytic_optimal_bandwidth(
            gaussian_1d(), kernel_constants_1d("tsc"), rep["Np"], dimension=1
        )
        assert_allclose(rep["analytic_h"], expected_h, rtol=1e-12)
        assert_allclose(
            rep["relative_error"],
            (rep["selected_h"] - rep["analytic_h"]) / rep["analytic_h"],
            rtol=1e-12,
        )

    assert [a["Np"] for a in doc["aggregate"]] == [1000, 2000]
    for agg in doc["aggregate"]:
        group = [r for r in doc["reports"] if r["Np"] == agg["Np"]]
        assert agg["n_seeds"] == len(group)
        assert_allclose(
            agg["mean_selected_h"], np.mean([r["selected_h"] for r in group]), rtol=1e-12
        )
        assert_allclose(
            agg["mean_abs_relative_error"],
            np.mean([abs(r["relative_error"]) for r in group]),
            rtol=1e-12,
        )


def test_experiment_deterministic_modulo_wall_time(tmp_path):
    argv = lambda out: [
        "experiment", "trimodal", "--np", "1500", "--seed", "1,2", "--out", out,
    ]
    assert main(argv(str(tmp_path / "a.json"))) == 0
    assert main(argv(str(tmp_path / "b.json"))) == 0
    doc_a = json.loads((tmp_path / "a.json").read_text())
    doc_b = json.loads((tmp_path / "b.json").read_text())
    assert _strip_wall_times(doc_a) == _strip_wall_times(doc_b)


def test_experiment_np_accepts_scientific_notation(tmp_path):
    out = tmp_path / "doc.json"
    rc = main(["experiment", "gauss1d", "--np", "1e3", "--seed", "1", "--out", str(out)])
    assert rc == 0
    doc = json.loads(out.read_text())
    assert doc["np_values"] == [1000]


def test_experiment_hernquist_external_reference(tmp_path):
    """The hernquist document embeds the previously published comparison
    numbers verbatim, as context only; the analytic oracle in the reports
    is the truncated law's closed form, not those numbers."""
    out = tmp_path / "hq.json"
    rc = main(["experiment", "hernquist", "--np", "5000", "--seed", "1", "--out", str(out)])
    assert rc == 0
    doc = json.loads(out.read_text())
    ref = doc["external_reference"]
    assert ref["analytic_h"] == 0.1712
    assert ref["data_based_h"] == 0.1678
    assert ref["relative_error_percent"] == -1.9
    assert "qualitative" in ref["note"]
    assert ref == dict(HERNQUIST_EXTERNAL_REFERENCE)

    expected_h = analytic_optimal_bandwidth(
        hernquist_radial_pdf(rc=1.0, r_window=(0.05, 1000.0)),
        kernel_constants_1d("tsc"),
        5000,
        dimension=1,
    )
    assert_allclose(doc["reports"][0]["analytic_h"], expected_h, rtol=1e-12)


def test_experiment_emit_curves(tmp_path):
    out = tmp_path / "exp.json"
    rc = main([
        "experiment", "gauss1d", "--np", "1000", "--seed", "3",
        "--emit-curves", "--out", str(out),
    ])
    assert rc == 0
    doc = json.loads(out.read_text())
    curve_path = tmp_path / "exp_np1000_seed3_curve.dat"
    assert doc["curve_files"] == [str(curve_path)]
    assert curve_path.exists()

    text = curve_path.read_text()
    assert "# columns: x f_hat f_analytic" in text
    table = np.loadtxt(curve_path, comments="#", ndmin=2)
    assert table.shape[1] == 3
    xs, fhat, ftrue = table.T
    # third column is the reference pdf at the node
    assert_allclose(ftrue, eval_density(gaussian_1d(), xs), rtol=1e-12, atol=1e-300)
    # the tabulated estimate is a density: unit mass on its own lattice
    h = doc["reports"][0]["selected_h"]
    assert_allclose(np.sum(fhat) * h, 1.0, atol=1e-9)
    assert f"# selected_h: {h:.17g}" in text


def test_experiment_unknown_name_exit_1(capsys):
    rc = main(["experiment", "nosuchstudy"])
    assert rc == 1
    assert "error" in capsys.readouterr().err


def test_experiment_unknown_kernel_exit_1(capsys):
    rc = main(["experiment", "gauss1d", "--kernel", "boxcar"])
    assert rc == 1
    assert "error" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# density
# ---------------------------------------------------------------------------


def test_density_auto_gaussian(tmp_path):
    """An auto-bandwidth table for a 1e5-point normal sample tracks the
    true pdf to 0.02 everywhere."""
    out = tmp_path / "table.dat"
    rc = main([
        "density", "--generator", "gauss1d", "--np", "1e5", "--seed", "1",
        "--auto", "--out", str(out),
    ])
    assert rc == 0
    text = out.read_text()
    assert "# columns: x f_hat f_analytic" in text
    xs, fhat, ftrue = np.loadtxt(out, comments="#", ndmin=2).T
    assert_allclose(ftrue, eval_density(gaussian_1d(), xs), rtol=1e-12, atol=1e-300)
    assert np.max(np.abs(fhat - ftrue)) < 0.02


def test_density_fixed_h_user_file_na_column(tmp_path):
    path = _write_sample(tmp_path / "u.txt", sample_gaussian_1d(3000, seed=6).points)
    out = tmp_path / "table.dat"
    rc = main(["density", "--input", path, "--h", "0.3", "--out", str(out)])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert "# columns: x f_hat f_analytic(NA)" in lines
    data_rows = [ln for ln in lines if not ln.startswith("#")]
    assert data_rows
    assert all(row.split()[2] == "NA" for row in data_rows)
    h_line = next(ln for ln in lines if ln.startswith("# h:"))
    assert float(h_line.split()[2]) == 0.3
    assert "(fixed)" in h_line


def test_density_explicit_grid(tmp_path):
    path = _write_sample(tmp_path / "u.txt", sample_gaussian_1d(1000, seed=6).points)
    out = tmp_path / "table.dat"
    rc = main([
        "density", "--input", path, "--h", "0.5", "--out", str(out),
        "--grid-min", "-1", "--grid-max", "1", "--grid-points", "5",
    ])
    assert rc == 0
    xs = np.loadtxt(out, comments="#", usecols=0)
    assert_allclose(xs, np.linspace(-1.0, 1.0, 5), atol=1e-15)


def test_density_partial_grid_flags_rejected(tmp_path, capsys):
    path = _write_sample(tmp_path / "u.txt", sample_gaussian_1d(100, seed=6).points)
    rc = main(["density", "--input", path, "--h", "0.5", "--grid-min", "-1"])
    err = capsys.readouterr().err
    assert rc == 1
    assert "must be given together" in err


def test_density_nonpositive_h_rejected(tmp_path, capsys):
    path = _write_sample(tmp_path / "u.txt", sample_gaussian_1d(100, seed=6).points)
    rc = main(["density", "--input", path, "--h", "0"])
    assert rc == 1
    assert "error" in capsys.readouterr().err


def test_density_needs_exactly_one_source(tmp_path, capsys):
    path = _write_sample(tmp_path / "u.txt", sample_gaussian_1d(100, seed=6).points)
    rc = main([
        "density", "--input", path, "--generator", "gauss1d", "--h", "0.5",
    ])
    assert rc == 1
    assert "exactly one of" in capsys.readouterr().err


def test_density_gauss3d_rejected(capsys):
    """Density tables are 1D only; the 3D generator is not an accepted
    choice for this subcommand."""
    rc = main(["density", "--generator", "gauss3d", "--h", "0.5"])
    assert rc == 1
    assert "invalid choice" in capsys.readouterr().err


def test_density_hernquist_table_stays_in_domain(tmp_path):
    """The radial table drops lattice padding at r < 0 and tabulates the
    truncated law in the third column."""
    out = tmp_path / "hq.dat"
    rc = main([
        "density", "--generator", "hernquist", "--np", "2000", "--seed", "1",
        "--h", "0.2", "--out", str(out),
    ])
    assert rc == 0
    rs, fhat, ftrue = np.loadtxt(out, comments="#", ndmin=2).T
    assert np.all(rs >= 0.0)
    dens = hernquist_radial_pdf(rc=1.0, r_window=(0.05, 1000.0))
    assert_allclose(ftrue, eval_density(dens, rs), rtol=1e-12, atol=1e-300)


# ---------------------------------------------------------------------------
# sample
# ---------------------------------------------------------------------------


def test_sample_deterministic_bytes_and_round_trip(tmp_path, capsys):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    argv = lambda out: ["sample", "--generator", "gauss1d", "--np", "1000",
                        "--seed", "7", "--out", out]
    assert main(argv(str(a))) == 0
    assert main(argv(str(b))) == 0
    assert a.read_bytes() == b.read_bytes()

    header = a.read_text().splitlines()[:4]
    assert header[0] == "# generator: gauss1d"
    assert header[1] == "# Np: 1000"
    assert header[2] == "# seed: 7"
    assert header[3] == f"# rng: {RNG_NAME}"

    # the emitted file round-trips through select without loss
    rc = main(["select", "--input", str(a), "--dim", "1"])
    report = json.loads(capsys.readouterr().out)
    assert rc == 0
    assert report["Np"] == 1000
    expected = sample_gaussian_1d(1000, seed=7).points
    written = np.loadtxt(a, comments="#")
    assert_allclose(written, expected, rtol=0, atol=0)


def test_sample_3d_has_three_columns(tmp_path):
    out = tmp_path / "g3.txt"
    rc = main(["sample", "--generator", "gauss3d", "--np", "500", "--seed", "2",
               "--out", str(out)])
    assert rc == 0
    data = np.loadtxt(out, comments="#", ndmin=2)
    assert data.shape == (500, 3)
    assert np.array_equal(data, sample_gaussian_3d(500, seed=2).points)


def test_sample_hernquist_header(tmp_path):
    out = tmp_path / "hq.txt"
    rc = main([
        "sample", "--generator", "hernquist", "--np", "100", "--seed", "3",
        "--rc", "2.0", "--r-min-over-rc", "0.1", "--r-max-over-rc", "50",
        "--out", str(out),
    ])
    assert rc == 0
    text = out.read_text()
    assert "# total_mass_MT: 1" in text
    assert "# scale_length_rc: 2" in text
    assert "# truncation_r_over_rc: [0.1, 50]" in text
    radii = np.loadtxt(out, comments="#")
    assert np.all(radii >= 0.1 * 2.0)
    assert np.all(radii <= 50 * 2.0)


def test_sample_rejects_bad_count(capsys):
    rc = main(["sample", "--generator", "gauss1d", "--np", "2.5", "--seed", "1"])
    assert rc == 1
    assert "error" in capsys.readouterr().err
