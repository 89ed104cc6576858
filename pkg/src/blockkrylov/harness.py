"""Seeded experiment harness with deterministic CSV output.

Four experiments cover the numerical study: depth sample paths, burn-in
sweeps across matrix size or decay power, empirical-versus-theoretical bound
checks, and stable-rank profiles.  A run is a pure function of its
configuration: trial t at block size ell draws its test block from the key
(base_seed, ell, t), spectra are generated once and cached on disk, and rows
are emitted in a fixed order with 17-significant-digit floats, so re-running
any experiment reproduces its CSV files byte for byte.  Worker count (capped
by KRYLOV_THREADS) affects speed only, never output.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .bounds import best_bound
from .engine import max_eig_sweep
from .ensembles import ENSEMBLE_KINDS, EnsembleSpec, ensure_spectrum
from .operators import DiagonalOperator
from .spectrum import Spectrum, stable_rank


class ConfigError(Exception):
    """Bad configuration or input data; the CLI exits with status 2."""


class InvariantViolation(Exception):
    """A runtime sanity check failed; the CLI exits with status 3."""


def derive_seed(*parts) -> int:
    """Collapse integer key parts into one 64-bit seed, splittably.

    Distinct part tuples give statistically independent seeds, so trials and
    block sizes never share randomness even under a common base seed.
    """
    ss = np.random.SeedSequence(tuple(int(p) for p in parts))
    return int(ss.generate_state(1, np.uint64)[0])


def wilson_halfwidth(successes: int, total: int, z: float = 1.0) -> float:
    """Half-width of the Wilson score interval for a binomial proportion."""
    if total < 1:
        raise ValueError("total must be positive")
    if not 0 <= successes <= total:
        raise ValueError("successes must lie in [0, total]")
    p = successes / total
    z2 = z * z
    return z * math.sqrt(p * (1.0 - p) / total + z2 / (4.0 * total * total)) / (1.0 + z2 / total)


def log_slope(depths, means, err_lo: float, err_hi: float) -> float:
    """Least-squares slope of log(mean error) against depth.

    Only depths whose mean lies in [err_lo, err_hi] enter the fit; the window
    excludes the burn-in plateau at the top and the floating-point floor at
    the bottom.
    """
    d = np.asarray(depths, dtype=np.float64)
    m = np.asarray(means, dtype=np.float64)
    mask = (m >= err_lo) & (m <= err_hi)
    if int(mask.sum()) < 3:
        raise ValueError("fewer than 3 depths fall inside the fit window")
    coeffs = np.polyfit(d[mask], np.log(m[mask]), 1)
    return float(coeffs[0])


def first_depth_at_or_below(means, threshold: float) -> int:
    """Smallest depth index whose mean error is <= threshold."""
    m = np.asarray(means, dtype=np.float64)
    hits = np.nonzero(m <= threshold)[0]
    if hits.size == 0:
        raise ValueError(f"mean error never reaches {threshold}")
    return int(hits[0])


@dataclass
class TrialRecord:
    """One (trial, block size, depth) observation."""

    trial_id: int
    ell: int
    q: int
    relative_error: float
    deflated: bool
    wall_time: float


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a run depends on.  Identical configs give identical CSVs."""

    experiment: str
    ensemble: str = "gapped_goe"
    n: int = 400
    gamma: float = 0.1
    power: float = 1.0
    block_sizes: tuple = (1, 2, 3, 4)
    q_max: int = 25
    q_grid: tuple = (2, 5, 10, 20)
    trials: int = 200
    base_seed: int = 20250801
    eps_grid: tuple = (0.5, 0.1, 0.01)
    nu_grid: tuple = tuple(k * 0.25 for k in range(21))
    n_sweep: tuple = (128, 256, 512, 1024)
    p_sweep: tuple = (1.0, 2.0, 4.0)
    output_dir: str = "results"
    paper_scale: bool = False
    workers: int = 1


EXPERIMENTS = ("sample_paths", "burn_in", "bound_check", "srank_profile")

# Desk-scale defaults per experiment; --paper-scale swaps in the full-size
# runs (large n, more trials), which take minutes instead of seconds.
_DESK_DEFAULTS = {
    "sample_paths": dict(ensemble="gapped_goe", n=400, gamma=0.1,
                         block_sizes=(1, 2, 3, 4), q_max=25, trials=200),
    "burn_in": dict(ensemble="gapped_goe", gamma=0.1, n=2048,
                    block_sizes=(2,), q_max=40, trials=200,
                    n_sweep=(128, 256, 512, 1024), p_sweep=(1.0, 2.0, 4.0)),
    "bound_check": dict(ensemble="gapped_power_law", n=256, power=1.0,
                        gamma=0.1, block_sizes=(1, 2, 4), q_max=20,
                        q_grid=(2, 5, 10, 20), trials=1000),
    "srank_profile": dict(ensemble="gapped_goe", gamma=0.1, n=1024,
                          n_sweep=(128, 256, 512, 1024),
                          p_sweep=(0.5, 1.0, 2.0, 4.0)),
}

_PAPER_SCALE = {
    "sample_paths": dict(n=1000, trials=1000, q_max=30),
    "burn_in": dict(n=8192, trials=1000,
                    n_sweep=(256, 512, 1024, 2048, 4096, 8192)),
    "bound_check": dict(n=1024, trials=5000),
    "srank_profile": dict(n=8192, n_sweep=(256, 512, 1024, 2048, 4096, 8192)),
}

_TUPLE_FIELDS = {"block_sizes", "q_grid", "eps_grid", "nu_grid", "n_sweep", "p_sweep"}
_INT_FIELDS = {"n", "q_max", "trials", "base_seed", "workers"}
_FLOAT_FIELDS = {"gamma", "power"}


def workers_from_env() -> int:
    """Worker cap from KRYLOV_THREADS; defaults to 1 (sequential)."""
    raw = os.environ.get("KRYLOV_THREADS")
    if raw is None or raw.strip() == "":
        return 1
    try:
        value = int(raw)
    except ValueError as exc:
        raise ConfigError(f"KRYLOV_THREADS must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ConfigError("KRYLOV_THREADS must be at least 1")
    return value


def load_config_file(path) -> dict:
    """Parse a flat TOML config file into a field dict."""
    try:
        import tomllib
    except ModuleNotFoundError:
        import tomli as tomllib
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid config file {path}: {exc}") from exc
    return data


def build_config(experiment: str, file_values: dict | None = None,
                 overrides: dict | None = None) -> ExperimentConfig:
    """Resolve a config: defaults, then paper-scale presets, then file, then flags."""
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {experiment!r}; "
                          f"expected one of {', '.join(EXPERIMENTS)}")
    merged = dict(_DESK_DEFAULTS[experiment])
    layers = [dict(file_values or {}), {k: v for k, v in (overrides or {}).items()
                                        if v is not None}]
    if any(layer.get("paper_scale") for layer in layers):
        merged.update(_PAPER_SCALE[experiment])
    for layer in layers:
        merged.update(layer)

    valid = {f.name for f in fields(ExperimentConfig)}
    unknown = set(merged) - valid
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    merged["experiment"] = experiment
    try:
        for key in _TUPLE_FIELDS & set(merged):
            merged[key] = tuple(merged[key])
        for key in _INT_FIELDS & set(merged):
            merged[key] = int(merged[key])
        for key in _FLOAT_FIELDS & set(merged):
            merged[key] = float(merged[key])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad config value: {exc}") from exc
    config = ExperimentConfig(**merged)
    _validate_config(config)
    return config


def _validate_config(config: ExperimentConfig) -> None:
    if config.ensemble not in ENSEMBLE_KINDS:
        raise ConfigError(f"unknown ensemble {config.ensemble!r}")
    if config.n < 2:
        raise ConfigError("n must be at least 2")
    if config.trials < 1:
        raise ConfigError("trials must be positive")
    if config.q_max < 0:
        raise ConfigError("q_max must be nonnegative")
    if not config.block_sizes or any(int(b) != b or b < 1 for b in config.block_sizes):
        raise ConfigError("block_sizes must be positive integers")
    if config.experiment == "bound_check":
        if any(int(q) != q or q < 0 or q > config.q_max for q in config.q_grid):
            raise ConfigError("q_grid entries must be integers in [0, q_max]")
    if any(not 0.0 < e <= 1.0 for e in config.eps_grid):
        raise ConfigError("eps_grid entries must lie in (0, 1]")
    if config.workers < 1:
        raise ConfigError("workers must be at least 1")


def _ensemble_spec(config: ExperimentConfig, **replacements) -> EnsembleSpec:
    params = dict(kind=config.ensemble, n=config.n, seed=config.base_seed)
    if config.ensemble in ("gapped_goe", "gapped_power_law"):
        params["gamma"] = config.gamma
    if config.ensemble == "gapped_power_law":
        params["power"] = config.power
        params["seed"] = None
    if config.ensemble in ("laplacian_1d", "inverse_laplacian_1d"):
        params["seed"] = None
    params.update(replacements)
    return EnsembleSpec(**params)


def _spectra_dir(config: ExperimentConfig) -> Path:
    return Path(config.output_dir) / "spectra"


def _map_trials(fn, items, workers: int):
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _sweep_errors(spectrum: Spectrum, ell: int, config: ExperimentConfig):
    """Depth-sweep relative errors for every trial at one block size.

    Returns (errors, deflated, wall_times) with errors of shape
    (trials, q_max + 1).  Each sweep is checked against the one-sided range
    and depth-monotonicity guarantees; a violation aborts the run.
    """
    a_max, a_min, rho = spectrum.a_max, spectrum.a_min, spectrum.rho
    tol = 1e-12 * max(1.0, abs(a_max), abs(a_min))
    A = DiagonalOperator(spectrum)

    def one(trial: int):
        start = time.perf_counter()
        sweep = max_eig_sweep(A, ell, config.q_max,
                              derive_seed(config.base_seed, ell, trial))
        elapsed = time.perf_counter() - start
        xis = sweep.xis
        if xis.max() > a_max + tol or xis.min() < a_min - tol:
            raise InvariantViolation(
                f"estimate left [{a_min}, {a_max}] at ell={ell} trial={trial}")
        if np.any(np.diff(xis) < -tol):
            raise InvariantViolation(
                f"estimate decreased with depth at ell={ell} trial={trial}")
        return (a_max - xis) / rho, sweep.deflated, elapsed

    out = _map_trials(one, range(config.trials), config.workers)
    errors = np.stack([r[0] for r in out])
    deflated = np.array([r[1] for r in out], dtype=bool)
    times = np.array([r[2] for r in out])
    return errors, deflated, times


def _format_value(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_format_value(v) for v in row) + "\n")
    return path


@dataclass
class SamplePathsResult:
    config: ExperimentConfig
    spectrum: Spectrum
    errors: dict
    deflated: dict
    mean_errors: dict
    records: list
    trials_csv: Path
    mean_csv: Path


def run_sample_paths(config: ExperimentConfig) -> SamplePathsResult:
    """Relative error of every trial at every depth, plus per-depth means.

    Emits one hairline row per (ell, trial, q) and one row per (ell, q) with
    the arithmetic mean over trials.
    """
    spectrum = ensure_spectrum(_ensemble_spec(config), _spectra_dir(config))
    out_dir = Path(config.output_dir)
    errors, deflated, means, records = {}, {}, {}, []
    trial_rows, mean_rows = [], []
    for ell in config.block_sizes:
        errs, defl, times = _sweep_errors(spectrum, ell, config)
        errors[ell], deflated[ell] = errs, defl
        means[ell] = errs.mean(axis=0)
        for trial in range(config.trials):
            for q in range(config.q_max + 1):
                trial_rows.append((ell, trial, q, errs[trial, q], bool(defl[trial])))
                records.append(TrialRecord(trial, ell, q, float(errs[trial, q]),
                                           bool(defl[trial]), float(times[trial])))
        for q in range(config.q_max + 1):
            mean_rows.append((ell, q, means[ell][q]))
    trials_csv = write_csv(out_dir / "sample_paths_trials.csv",
                           ("ell", "trial", "q", "err", "deflated"), trial_rows)
    mean_csv = write_csv(out_dir / "sample_paths_mean.csv",
                         ("ell", "q", "mean_err"), mean_rows)
    return SamplePathsResult(config, spectrum, errors, deflated, means,
                             records, trials_csv, mean_csv)


@dataclass
class BurnInResult:
    config: ExperimentConfig
    series_kind: str
    series: tuple
    mean_errors: dict
    csv_path: Path


def run_burn_in(config: ExperimentConfig) -> BurnInResult:
    """Mean error against depth across a sweep of n (GOE) or power (power law).

    The burn-in plateau before exponential convergence sets in lengthens with
    the stable rank, so it grows with n in the GOE family and with the decay
    power in the power-law family.
    """
    if config.ensemble in ("goe", "gapped_goe"):
        series_kind, series = "n", tuple(config.n_sweep)
        specs = [_ensemble_spec(config, n=int(v)) for v in series]
    elif config.ensemble == "gapped_power_law":
        series_kind, series = "power", tuple(config.p_sweep)
        specs = [_ensemble_spec(config, power=float(v)) for v in series]
    else:
        raise ConfigError("burn_in sweeps goe, gapped_goe or gapped_power_law ensembles")

    ell = int(config.block_sizes[0])
    means = {}
    rows = []
    for value, spec in zip(series, specs):
        spectrum = ensure_spectrum(spec, _spectra_dir(config))
        errs, _, _ = _sweep_errors(spectrum, ell, config)
        mean = errs.mean(axis=0)
        means[value] = mean
        for q in range(config.q_max + 1):
            rows.append((value, q, mean[q]))
    csv_path = write_csv(Path(config.output_dir) / "burn_in_mean.csv",
                         ("series", "q", "mean_err"), rows)
    return BurnInResult(config, series_kind, series, means, csv_path)


@dataclass
class BoundCheckResult:
    config: ExperimentConfig
    spectrum: Spectrum
    errors: dict
    prob_rows: list
    expect_rows: list
    prob_csv: Path
    expect_csv: Path


def run_bound_check(config: ExperimentConfig) -> BoundCheckResult:
    """Empirical tail probabilities and means against the theoretical bounds.

    For each (ell, q) on the grid: the empirical P[err >= eps] with a Wilson
    half-width per eps, the empirical mean with its standard error, and the
    partition-minimized bound values of both families.
    """
    spectrum = ensure_spectrum(_ensemble_spec(config), _spectra_dir(config))
    errors = {}
    prob_rows, expect_rows = [], []
    for ell in config.block_sizes:
        errs, _, _ = _sweep_errors(spectrum, ell, config)
        errors[ell] = errs
        for q in config.q_grid:
            col = errs[:, q]
            trials = col.size
            for eps in config.eps_grid:
                report = best_bound(ell, q, eps, spectrum=spectrum)
                hits = int(np.count_nonzero(col >= eps))
                prob_rows.append((ell, q, eps, trials, hits / trials,
                                  wilson_halfwidth(hits, trials),
                                  report.best_prob_gapfree, report.best_prob_gap,
                                  report.best_prob))
            report = best_bound(ell, q, config.eps_grid[0], spectrum=spectrum)
            mean = float(col.mean())
            stderr = float(col.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
            expect_rows.append((ell, q, trials, mean, stderr,
                                report.best_expect_gapfree, report.best_expect_gap,
                                report.best_expect))
    out_dir = Path(config.output_dir)
    prob_csv = write_csv(out_dir / "bound_check_prob.csv",
                         ("ell", "q", "eps", "trials", "p_hat", "wilson_halfwidth",
                          "prob_gapfree", "prob_gap", "prob_best"), prob_rows)
    expect_csv = write_csv(out_dir / "bound_check_expect.csv",
                           ("ell", "q", "trials", "mean_err", "stderr",
                            "expect_gapfree", "expect_gap", "expect_best"), expect_rows)
    return BoundCheckResult(config, spectrum, errors, prob_rows, expect_rows,
                            prob_csv, expect_csv)


@dataclass
class SrankProfileResult:
    config: ExperimentConfig
    series_kind: str
    rows: list
    csv_path: Path


def run_srank_profile(config: ExperimentConfig) -> SrankProfileResult:
    """Stable rank against nu for a family of spectra."""
    if config.ensemble in ("goe", "gapped_goe"):
        series_kind = "n"
        pairs = [(int(v), _ensemble_spec(config, n=int(v))) for v in config.n_sweep]
    elif config.ensemble == "gapped_power_law":
        series_kind = "power"
        pairs = [(float(v), _ensemble_spec(config, power=float(v))) for v in config.p_sweep]
    else:
        series_kind = "n"
        pairs = [(config.n, _ensemble_spec(config))]

    rows = []
    for value, spec in pairs:
        spectrum = ensure_spectrum(spec, _spectra_dir(config))
        if spectrum.is_identity_multiple():
            raise ConfigError("stable rank profile rejects identity-multiple spectra")
        for nu in config.nu_grid:
            srk = stable_rank(spectrum, float(nu))
            rows.append((value, float(nu), srk, math.log(srk)))
    csv_path = write_csv(Path(config.output_dir) / "srank_profile.csv",
                         ("series", "nu", "srk", "log_srk"), rows)
    return SrankProfileResult(config, series_kind, rows, csv_path)


RUNNERS = {
    "sample_paths": run_sample_paths,
    "burn_in": run_burn_in,
    "bound_check": run_bound_check,
    "srank_profile": run_srank_profile,
}


def run_experiment(config: ExperimentConfig):
    if config.experiment not in RUNNERS:
        raise ConfigError(f"unknown experiment {config.experiment!r}")
    return RUNNERS[config.experiment](config)
