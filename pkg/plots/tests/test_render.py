import csv
from pathlib import Path

import numpy as np
import pytest

from krylovplots import FigureSpec, SpecError, read_table, render

GOLDEN = Path(__file__).parent / "golden"


def _sample_spec(tmp_path, ell=4, out="paths.svg", **extra):
    return FigureSpec(kind="sample_paths",
                      inputs={"trials": str(GOLDEN / "sample_paths_trials.csv"),
                              "mean": str(GOLDEN / "sample_paths_mean.csv")},
                      out=str(tmp_path / out), ell=ell, **extra)


def test_all_four_kinds_render(tmp_path):
    specs = [
        _sample_spec(tmp_path),
        FigureSpec(kind="burn_in",
                   inputs={"table": str(GOLDEN / "burn_in_mean.csv")},
                   out=str(tmp_path / "burn.svg"), series_label="n"),
        FigureSpec(kind="srank_profile",
                   inputs={"table": str(GOLDEN / "srank_profile.csv")},
                   out=str(tmp_path / "srank.pdf"), series_label="n"),
        FigureSpec(kind="bound_overlay",
                   inputs={"table": str(GOLDEN / "bound_check_prob.csv")},
                   out=str(tmp_path / "bounds.svg"), table="prob", eps=0.1),
    ]
    for spec in specs:
        result = render(spec)
        assert result.path.is_file()
        assert result.path.stat().st_size > 500
        assert result.kind == spec.kind


def test_mean_overlay_equals_csv_column(tmp_path):
    result = render(_sample_spec(tmp_path))
    with open(GOLDEN / "sample_paths_mean.csv", newline="") as fh:
        rows = list(csv.reader(fh))[1:]
    expected = np.array([float(r[2]) for r in rows if float(r[0]) == 4.0])
    assert np.array_equal(result.table["mean"], expected)


def test_expect_overlay_renders(tmp_path):
    spec = FigureSpec(kind="bound_overlay",
                      inputs={"table": str(GOLDEN / "bound_check_expect.csv")},
                      out=str(tmp_path / "expect.svg"), table="expect")
    result = render(spec)
    cols = read_table(GOLDEN / "bound_check_expect.csv", "bound_check_expect")
    assert np.array_equal(result.table["mean_err"], cols["mean_err"])
    assert np.array_equal(result.table["expect_best"], cols["expect_best"])


def test_svg_output_is_deterministic(tmp_path):
    a = render(_sample_spec(tmp_path, out="a.svg")).path.read_bytes()
    b = render(_sample_spec(tmp_path, out="b.svg")).path.read_bytes()
    assert a == b


def test_pdf_output_is_deterministic(tmp_path):
    a = render(_sample_spec(tmp_path, out="a.pdf")).path.read_bytes()
    b = render(_sample_spec(tmp_path, out="b.pdf")).path.read_bytes()
    assert a == b


def test_reference_overlay_is_drawn_from_columns(tmp_path):
    spec = FigureSpec(kind="burn_in",
                      inputs={"table": str(GOLDEN / "burn_in_mean.csv")},
                      out=str(tmp_path / "burn.svg"),
                      overlay={"csv": str(GOLDEN / "bound_check_expect.csv"),
                               "x": "q", "y": "expect_best", "label": "bound"})
    result = render(spec)
    cols = read_table(GOLDEN / "bound_check_expect.csv", "bound_check_expect")
    assert np.array_equal(result.table["overlay_x"], cols["q"])
    assert np.array_equal(result.table["overlay_y"], cols["expect_best"])


def test_header_mismatch_is_descriptive(tmp_path):
    bad = tmp_path / "srank_profile.csv"
    lines = (GOLDEN / "srank_profile.csv").read_text().splitlines()
    bad.write_text("\n".join(["series,nu,rank,log_srk"] + lines[1:]) + "\n")
    spec = FigureSpec(kind="srank_profile", inputs={"table": str(bad)},
                      out=str(tmp_path / "fig.svg"))
    with pytest.raises(SpecError, match="srank_profile schema"):
        render(spec)


def test_empty_table_refused(tmp_path):
    bad = tmp_path / "burn_in_mean.csv"
    bad.write_text("series,q,mean_err\n")
    spec = FigureSpec(kind="burn_in", inputs={"table": str(bad)},
                      out=str(tmp_path / "fig.svg"))
    with pytest.raises(SpecError, match="no data rows"):
        render(spec)


def test_non_numeric_value_refused(tmp_path):
    bad = tmp_path / "burn_in_mean.csv"
    bad.write_text("series,q,mean_err\n16,0,high\n")
    spec = FigureSpec(kind="burn_in", inputs={"table": str(bad)},
                      out=str(tmp_path / "fig.svg"))
    with pytest.raises(SpecError, match="non-numeric"):
        render(spec)


def test_absent_ell_lists_choices(tmp_path):
    with pytest.raises(SpecError, match=r"ell in \[2, 4\]"):
        render(_sample_spec(tmp_path, ell=3))


def test_absent_eps_lists_choices(tmp_path):
    spec = FigureSpec(kind="bound_overlay",
                      inputs={"table": str(GOLDEN / "bound_check_prob.csv")},
                      out=str(tmp_path / "fig.svg"), table="prob", eps=0.25)
    with pytest.raises(SpecError, match="eps in \\{0.1, 0.5\\}"):
        render(spec)


def test_linear_scale_flag(tmp_path):
    result = render(_sample_spec(tmp_path, log_y=False, out="lin.svg"))
    assert result.path.is_file()
