"""Experiment harness: seeding, statistics, config resolution, determinism."""

import math
from pathlib import Path

import numpy as np
import pytest

from blockkrylov import (
    ConfigError,
    ExperimentConfig,
    InvariantViolation,
    build_config,
    run_bound_check,
    run_burn_in,
    run_experiment,
    run_sample_paths,
    run_srank_profile,
)
from blockkrylov.bounds import best_bound
from blockkrylov.engine import DepthSweep
from blockkrylov.harness import (
    derive_seed,
    first_depth_at_or_below,
    load_config_file,
    log_slope,
    wilson_halfwidth,
    workers_from_env,
    write_csv,
)


def test_derive_seed_determinism_and_spread():
    assert derive_seed(1, 2, 3) == derive_seed(1, 2, 3)
    seen = {derive_seed(7, ell, t) for ell in range(4) for t in range(50)}
    assert len(seen) == 200
    assert derive_seed(1, 2, 3) != derive_seed(3, 2, 1)
    s = derive_seed(0)
    assert 0 <= s < 2 ** 64


def test_wilson_frozen_values():
    assert wilson_halfwidth(50, 100) == pytest.approx(0.049751859510499458, rel=1e-15)
    assert wilson_halfwidth(0, 100) == pytest.approx(0.0049504950495049506, rel=1e-15)
    assert wilson_halfwidth(100, 100) == wilson_halfwidth(0, 100)
    assert wilson_halfwidth(3, 10, z=2.0) == pytest.approx(0.25152595516655729, rel=1e-15)
    with pytest.raises(ValueError):
        wilson_halfwidth(1, 0)
    with pytest.raises(ValueError):
        wilson_halfwidth(-1, 10)
    with pytest.raises(ValueError):
        wilson_halfwidth(11, 10)


def test_log_slope_recovers_exact_decay():
    q = np.arange(0, 20)
    means = 0.8 * np.exp(-0.45 * q)
    assert log_slope(q, means, 1e-12, 1.0) == pytest.approx(-0.45, abs=1e-12)
    # window excludes the plateau rows
    means2 = means.copy()
    means2[:5] = 0.9
    fitted = log_slope(q, means2, 1e-12, 0.5)
    assert fitted == pytest.approx(-0.45, abs=1e-12)
    with pytest.raises(ValueError, match="fewer than 3"):
        log_slope(q, means, 1e-12, 1e-11)


def test_first_depth_at_or_below():
    means = [0.9, 0.5, 0.2, 0.05, 0.001]
    assert first_depth_at_or_below(means, 0.2) == 2
    assert first_depth_at_or_below(means, 0.9) == 0
    with pytest.raises(ValueError):
        first_depth_at_or_below(means, 1e-9)


def test_workers_from_env(monkeypatch):
    monkeypatch.delenv("KRYLOV_THREADS", raising=False)
    assert workers_from_env() == 1
    monkeypatch.setenv("KRYLOV_THREADS", "4")
    assert workers_from_env() == 4
    monkeypatch.setenv("KRYLOV_THREADS", "  ")
    assert workers_from_env() == 1
    monkeypatch.setenv("KRYLOV_THREADS", "three")
    with pytest.raises(ConfigError):
        workers_from_env()
    monkeypatch.setenv("KRYLOV_THREADS", "0")
    with pytest.raises(ConfigError):
        workers_from_env()


def test_build_config_defaults_and_layers():
    cfg = build_config("sample_paths")
    assert cfg.experiment == "sample_paths"
    assert cfg.ensemble == "gapped_goe" and cfg.n == 400 and cfg.trials == 200
    cfg2 = build_config("sample_paths",
                        file_values={"n": 100, "trials": 50},
                        overrides={"trials": 10, "gamma": None})
    assert cfg2.n == 100
    assert cfg2.trials == 10
    assert cfg2.gamma == 0.1


def test_build_config_paper_scale():
    cfg = build_config("sample_paths", overrides={"paper_scale": True})
    assert cfg.n == 1000 and cfg.trials == 1000 and cfg.q_max == 30
    # explicit values still beat the preset
    cfg2 = build_config("sample_paths", file_values={"paper_scale": True, "n": 123})
    assert cfg2.paper_scale and cfg2.n == 123 and cfg2.trials == 1000
    cfg3 = build_config("bound_check", overrides={"paper_scale": True})
    assert cfg3.n == 1024 and cfg3.trials == 5000


def test_build_config_coercion_and_rejection():
    cfg = build_config("sample_paths", file_values={"block_sizes": [1, 3], "n": "64"})
    assert cfg.block_sizes == (1, 3)
    assert cfg.n == 64
    with pytest.raises(ConfigError, match="unknown config keys"):
        build_config("sample_paths", file_values={"blocksizes": [1]})
    with pytest.raises(ConfigError, match="unknown experiment"):
        build_config("warmup")
    with pytest.raises(ConfigError):
        build_config("sample_paths", overrides={"n": 1})
    with pytest.raises(ConfigError):
        build_config("sample_paths", overrides={"trials": 0})
    with pytest.raises(ConfigError):
        build_config("bound_check", overrides={"q_grid": (99,)})
    # experiments that never read q_grid tolerate an out-of-range default
    assert build_config("sample_paths", overrides={"q_max": 4}).q_max == 4
    with pytest.raises(ConfigError):
        build_config("sample_paths", overrides={"eps_grid": (0.0,)})
    with pytest.raises(ConfigError):
        build_config("sample_paths", overrides={"ensemble": "wishart"})
    with pytest.raises(ConfigError):
        build_config("sample_paths", overrides={"n": "many"})


def test_load_config_file(tmp_path):
    good = tmp_path / "run.toml"
    good.write_text('n = 64\ntrials = 5\nblock_sizes = [2]\n')
    values = load_config_file(good)
    assert values == {"n": 64, "trials": 5, "block_sizes": [2]}
    bad = tmp_path / "bad.toml"
    bad.write_text("n = = 3\n")
    with pytest.raises(ConfigError, match="invalid config"):
        load_config_file(bad)
    with pytest.raises(ConfigError, match="cannot read"):
        load_config_file(tmp_path / "missing.toml")


def _small_config(tmp_path, **kw):
    base = dict(ensemble="gapped_goe", n=24, gamma=0.2, block_sizes=(2,),
                q_max=4, trials=5, output_dir=str(tmp_path))
    base.update(kw)
    return build_config("sample_paths", overrides=base)


def test_sample_paths_csvs_are_deterministic(tmp_path):
    cfg_a = _small_config(tmp_path / "a")
    cfg_b = _small_config(tmp_path / "b")
    res_a = run_sample_paths(cfg_a)
    res_b = run_sample_paths(cfg_b)
    assert res_a.trials_csv.read_bytes() == res_b.trials_csv.read_bytes()
    assert res_a.mean_csv.read_bytes() == res_b.mean_csv.read_bytes()


def test_sample_paths_worker_count_does_not_change_output(tmp_path):
    res_1 = run_sample_paths(_small_config(tmp_path / "w1", workers=1))
    res_3 = run_sample_paths(_small_config(tmp_path / "w3", workers=3))
    assert res_1.trials_csv.read_bytes() == res_3.trials_csv.read_bytes()
    assert res_1.mean_csv.read_bytes() == res_3.mean_csv.read_bytes()


def test_sample_paths_schema_and_content(tmp_path):
    cfg = _small_config(tmp_path)
    res = run_sample_paths(cfg)
    lines = res.trials_csv.read_text().splitlines()
    assert lines[0] == "ell,trial,q,err,deflated"
    assert len(lines) == 1 + 5 * 5
    first = lines[1].split(",")
    assert first[0] == "2" and first[1] == "0" and first[2] == "0"
    # 17 significant digits survive the text round trip exactly
    assert float(first[3]) == res.errors[2][0, 0]
    mean_lines = res.mean_csv.read_text().splitlines()
    assert mean_lines[0] == "ell,q,mean_err"
    assert len(mean_lines) == 1 + 5
    assert res.mean_errors[2].shape == (5,)
    assert res.mean_errors[2][3] == pytest.approx(res.errors[2][:, 3].mean())
    assert len(res.records) == 25
    assert all(r.wall_time >= 0.0 for r in res.records)
    assert np.all(res.errors[2] >= -1e-12)
    assert np.all(res.errors[2] <= 1.0 + 1e-12)


def test_burn_in_series_over_n(tmp_path):
    cfg = build_config("burn_in", overrides=dict(
        ensemble="goe", n_sweep=(12, 16), block_sizes=(2,), q_max=3,
        trials=4, output_dir=str(tmp_path)))
    res = run_burn_in(cfg)
    assert res.series_kind == "n"
    assert res.series == (12, 16)
    assert set(res.mean_errors) == {12, 16}
    lines = res.csv_path.read_text().splitlines()
    assert lines[0] == "series,q,mean_err"
    assert len(lines) == 1 + 2 * 4
    assert lines[1].split(",")[0] == "12"


def test_burn_in_series_over_power(tmp_path):
    cfg = build_config("burn_in", overrides=dict(
        ensemble="gapped_power_law", n=32, p_sweep=(1.0, 2.0), gamma=0.1,
        block_sizes=(2,), q_max=3, trials=4, output_dir=str(tmp_path)))
    res = run_burn_in(cfg)
    assert res.series_kind == "power"
    assert res.series == (1.0, 2.0)


def test_burn_in_rejects_fixed_spectra(tmp_path):
    cfg = build_config("burn_in", overrides=dict(
        ensemble="laplacian_1d", output_dir=str(tmp_path)))
    with pytest.raises(ConfigError):
        run_burn_in(cfg)


def test_bound_check_rows(tmp_path):
    cfg = build_config("bound_check", overrides=dict(
        n=48, block_sizes=(1, 2), q_max=6, q_grid=(2, 6), trials=30,
        eps_grid=(0.5, 0.1), output_dir=str(tmp_path)))
    res = run_bound_check(cfg)
    assert len(res.prob_rows) == 2 * 2 * 2
    assert len(res.expect_rows) == 2 * 2
    header = res.prob_csv.read_text().splitlines()[0]
    assert header == ("ell,q,eps,trials,p_hat,wilson_halfwidth,"
                      "prob_gapfree,prob_gap,prob_best")
    header2 = res.expect_csv.read_text().splitlines()[0]
    assert header2 == "ell,q,trials,mean_err,stderr,expect_gapfree,expect_gap,expect_best"
    for row in res.prob_rows:
        ell, q, eps, trials, p_hat, hw, b_free, b_gap, b_best = row
        assert trials == 30
        assert 0.0 <= p_hat <= 1.0
        assert b_best == min(b_free, b_gap)
        rep = best_bound(ell, q, eps, spectrum=res.spectrum)
        assert b_free == rep.best_prob_gapfree
        assert b_gap == rep.best_prob_gap
        hand = np.count_nonzero(res.errors[ell][:, q] >= eps) / 30
        assert p_hat == pytest.approx(hand, abs=1e-16)
    for row in res.expect_rows:
        ell, q, trials, mean, stderr, e_free, e_gap, e_best = row
        assert e_best == min(e_free, e_gap)
        assert mean == pytest.approx(res.errors[ell][:, q].mean())
        assert stderr >= 0.0


def test_srank_profile_rows(tmp_path):
    cfg = build_config("srank_profile", overrides=dict(
        ensemble="gapped_goe", n_sweep=(16, 24), gamma=0.3,
        nu_grid=(0.0, 0.5, 1.0), output_dir=str(tmp_path)))
    res = run_srank_profile(cfg)
    assert res.series_kind == "n"
    assert len(res.rows) == 2 * 3
    for value, nu, srk, log_srk in res.rows:
        assert log_srk == pytest.approx(math.log(srk), rel=1e-15)
        if nu == 0.0:
            assert srk == value
    lines = res.csv_path.read_text().splitlines()
    assert lines[0] == "series,nu,srk,log_srk"


def test_srank_profile_rejects_identity_multiple(tmp_path):
    cfg = build_config("srank_profile", overrides=dict(
        ensemble="goe", n_sweep=(8,), nu_grid=(0.0, 1.0),
        base_seed=777, output_dir=str(tmp_path)))
    spectra = Path(str(tmp_path)) / "spectra"
    spectra.mkdir(parents=True)
    (spectra / "goe_n8_seed777.txt").write_text("3.5\n" * 8)
    with pytest.raises(ConfigError, match="identity"):
        run_srank_profile(cfg)


def test_invariant_violations_raise(tmp_path, monkeypatch):
    cfg = _small_config(tmp_path)

    def too_big(A, ell, q_max, seed, ortho_tol=1e-10):
        return DepthSweep(xis=np.full(q_max + 1, 99.0), ell=ell, q_max=q_max,
                          seed=seed, deflated=False, depth_built=q_max)

    monkeypatch.setattr("blockkrylov.harness.max_eig_sweep", too_big)
    with pytest.raises(InvariantViolation, match="left"):
        run_sample_paths(cfg)

    def decreasing(A, ell, q_max, seed, ortho_tol=1e-10):
        xis = np.linspace(0.9, 0.1, q_max + 1)
        return DepthSweep(xis=xis, ell=ell, q_max=q_max, seed=seed,
                          deflated=False, depth_built=q_max)

    monkeypatch.setattr("blockkrylov.harness.max_eig_sweep", decreasing)
    with pytest.raises(InvariantViolation, match="decreased"):
        run_sample_paths(cfg)


def test_run_experiment_dispatch(tmp_path):
    cfg = _small_config(tmp_path)
    res = run_experiment(cfg)
    assert res.trials_csv.exists()
    bogus = ExperimentConfig(experiment="warmup", output_dir=str(tmp_path))
    with pytest.raises(ConfigError):
        run_experiment(bogus)


def test_write_csv_formats(tmp_path):
    path = write_csv(tmp_path / "x.csv", ("a", "b", "c", "d"),
                     [(1, 0.5, True, "t"), (2, 1e-17, False, "u")])
    text = path.read_text()
    assert text == "a,b,c,d\n1,0.5,1,t\n2,1.0000000000000001e-17,0,u\n"
    assert float("1.0000000000000001e-17") == 1e-17
