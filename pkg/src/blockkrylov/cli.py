"""Command line front end.

Exit codes: 0 on success, 2 for configuration or input errors, 3 when a
runtime sanity check fails.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import harness
from .bounds import best_bound, depth_thresholds
from .engine import estimate_max_eig, estimate_min_eig, estimate_spectral_norm_sq
from .ensembles import ENSEMBLE_KINDS, EnsembleSpec, make_spectrum
from .harness import ConfigError, InvariantViolation
from .operators import DiagonalOperator, load_matrix_market
from .spectrum import load_spectrum, relative_error, save_spectrum, spectral_features, stable_rank


def _int_list(text: str):
    return tuple(int(part) for part in text.split(","))


def _float_list(text: str):
    return tuple(float(part) for part in text.split(","))


def _add_spectrum_source(parser):
    parser.add_argument("--ensemble", choices=ENSEMBLE_KINDS)
    parser.add_argument("--spectrum-file", type=Path)
    parser.add_argument("--n", type=int, default=400)
    parser.add_argument("--gamma", type=float)
    parser.add_argument("--power", type=float)
    parser.add_argument("--ensemble-seed", type=int, default=0)


def _spectrum_from_args(args):
    if args.spectrum_file is not None:
        return load_spectrum(args.spectrum_file)
    if args.ensemble is None:
        raise ConfigError("provide --ensemble or --spectrum-file")
    spec = EnsembleSpec(kind=args.ensemble, n=args.n, gamma=args.gamma,
                        power=args.power, seed=args.ensemble_seed)
    return make_spectrum(spec)


def _cmd_estimate(args):
    if args.norm_sq:
        if args.matrix_market is None:
            raise ConfigError("--norm-sq needs --matrix-market with the rectangular factor")
        from scipy.io import mmread
        factor = mmread(str(args.matrix_market))
        if hasattr(factor, "toarray"):
            factor = factor.toarray()
        est = estimate_spectral_norm_sq(factor, args.ell, args.q, args.seed)
        spectrum = None
    elif args.matrix_market is not None:
        operator = load_matrix_market(args.matrix_market)
        runner = estimate_min_eig if args.min_eig else estimate_max_eig
        est = runner(operator, args.ell, args.q, args.seed)
        spectrum = None
    else:
        spectrum = _spectrum_from_args(args)
        operator = DiagonalOperator(spectrum)
        runner = estimate_min_eig if args.min_eig else estimate_max_eig
        est = runner(operator, args.ell, args.q, args.seed)

    print(f"xi = {est.xi:.17g}")
    print(f"ell = {est.ell}  q = {est.q}  seed = {est.seed}  deflated = {est.deflated}")
    if spectrum is not None and not spectrum.is_identity_multiple():
        if args.min_eig:
            err = (est.xi - spectrum.a_min) / spectrum.rho
        else:
            err = relative_error(spectrum, est.xi)
        print(f"relative error = {err:.6g}")
    return 0


def _cmd_bounds(args):
    spectrum = _spectrum_from_args(args)
    if args.thresholds:
        report = depth_thresholds(args.ell, args.eps[0], spectrum=spectrum,
                                  gamma=args.gap, q1_max=args.q)
        print(f"gamma = {report.gamma:.6g}  eps = {report.eps:g}  ell = {report.ell}")
        if not report.prime_eps_within_validity:
            print("note: ell = 2 expectation threshold outside its stated eps range")
        print(f"{'q1':>4} {'srk(q1)':>12} {'q2_gapfree':>12} {'q2_prob_gap':>12} {'q2_expect_gap':>14}")
        for row in report.rows:
            print(f"{row.q1:>4} {row.srk_q1:>12.5g} {row.q2_gapfree:>12.3f} "
                  f"{row.q2_prob_gap:>12.3f} {row.q2_expect_gap:>14.3f}")
        b = report.best_expect_gap
        print(f"smallest total depth for the expectation target: "
              f"q1 = {b.q1}, q2 = {b.q2_expect_gap:.3f}")
        return 0

    rows_by_eps = []
    for eps in args.eps:
        report = best_bound(args.ell, args.q, eps, spectrum=spectrum, gamma=args.gap)
        rows_by_eps.append(report)
    head = rows_by_eps[0]
    print(f"gamma = {head.gamma:.6g}  ell = {head.ell}  q = {head.q}")
    print(f"{'eps':>8} {'prob_gapfree':>13} {'prob_gap':>13} {'prob_best':>13}")
    for report in rows_by_eps:
        print(f"{report.eps:>8g} {report.best_prob_gapfree:>13.4g} "
              f"{report.best_prob_gap:>13.4g} {report.best_prob:>13.4g}")
    print(f"expectation: gapfree {head.best_expect_gapfree:.4g}  "
          f"gap {head.best_expect_gap:.4g}  best {head.best_expect:.4g}")
    if args.out:
        rows = []
        for report in rows_by_eps:
            for r in report.rows:
                rows.append((report.eps, r.partition.q1, r.partition.q2, r.srk_q1,
                             r.prob_gapfree, r.prob_gap, r.expect_gapfree, r.expect_gap))
        harness.write_csv(args.out,
                          ("eps", "q1", "q2", "srk_q1", "prob_gapfree", "prob_gap",
                           "expect_gapfree", "expect_gap"), rows)
        print(f"wrote {args.out}")
    return 0


def _cmd_generate(args):
    spec = EnsembleSpec(kind=args.ensemble, n=args.n, gamma=args.gamma,
                        power=args.power, seed=args.ensemble_seed)
    spectrum = make_spectrum(spec)
    out = args.out
    if out.is_dir() or out.suffix == "":
        out.mkdir(parents=True, exist_ok=True)
        out = out / f"{spec.label()}.txt"
    save_spectrum(spectrum, out)
    feats = spectral_features(spectrum)
    print(f"wrote {out}")
    print(f"n = {feats.n}  gamma = {feats.gamma:.6g}  srk(1) = {stable_rank(spectrum, 1):.6g}")
    return 0


_EXPERIMENT_NAMES = {
    "sample-paths": "sample_paths",
    "burn-in": "burn_in",
    "bound-check": "bound_check",
    "srank": "srank_profile",
}


def _cmd_experiment(args):
    file_values = harness.load_config_file(args.config) if args.config else None
    overrides = {
        "ensemble": args.ensemble,
        "n": args.n,
        "gamma": args.gamma,
        "power": args.power,
        "block_sizes": args.ell,
        "q_max": args.q,
        "trials": args.trials,
        "base_seed": args.seed,
        "eps_grid": args.eps,
        "output_dir": args.out,
        "paper_scale": True if args.paper_scale else None,
        "workers": harness.workers_from_env(),
    }
    config = harness.build_config(_EXPERIMENT_NAMES[args.kind], file_values, overrides)
    result = harness.run_experiment(config)
    for name in ("trials_csv", "mean_csv", "prob_csv", "expect_csv", "csv_path"):
        path = getattr(result, name, None)
        if path is not None:
            print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blockkrylov",
        description="Randomized block Krylov eigenvalue estimation, error bounds, "
                    "and reproducible experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_est = sub.add_parser("estimate", help="run one randomized estimate")
    _add_spectrum_source(p_est)
    p_est.add_argument("--matrix-market", type=Path)
    p_est.add_argument("--ell", type=int, default=2)
    p_est.add_argument("--q", type=int, default=10)
    p_est.add_argument("--seed", type=int, default=0)
    p_est.add_argument("--min-eig", action="store_true")
    p_est.add_argument("--norm-sq", action="store_true")
    p_est.set_defaults(func=_cmd_estimate)

    p_bnd = sub.add_parser("bounds", help="evaluate error bounds for a spectrum")
    _add_spectrum_source(p_bnd)
    p_bnd.add_argument("--ell", type=int, default=2)
    p_bnd.add_argument("--q", type=int, default=10)
    p_bnd.add_argument("--eps", type=_float_list, default=(0.1,))
    p_bnd.add_argument("--gap", type=float,
                       help="use this gap lower bound instead of the spectrum's own")
    p_bnd.add_argument("--thresholds", action="store_true",
                       help="print sufficient depths instead of bound values")
    p_bnd.add_argument("--out", type=Path)
    p_bnd.set_defaults(func=_cmd_bounds)

    p_gen = sub.add_parser("generate", help="generate a spectrum file")
    p_gen.add_argument("--ensemble", choices=ENSEMBLE_KINDS, required=True)
    p_gen.add_argument("--n", type=int, required=True)
    p_gen.add_argument("--gamma", type=float)
    p_gen.add_argument("--power", type=float)
    p_gen.add_argument("--ensemble-seed", type=int, default=0)
    p_gen.add_argument("--out", type=Path, required=True)
    p_gen.set_defaults(func=_cmd_generate)

    p_exp = sub.add_parser("experiment", help="run a seeded experiment")
    p_exp.add_argument("kind", choices=sorted(_EXPERIMENT_NAMES))
    p_exp.add_argument("--config", type=Path)
    p_exp.add_argument("--ensemble", choices=ENSEMBLE_KINDS)
    p_exp.add_argument("--n", type=int)
    p_exp.add_argument("--gamma", type=float)
    p_exp.add_argument("--power", type=float)
    p_exp.add_argument("--ell", type=_int_list,
                       help="comma-separated block sizes")
    p_exp.add_argument("--q", type=int, help="maximum depth")
    p_exp.add_argument("--trials", type=int)
    p_exp.add_argument("--seed", type=int, help="base seed")
    p_exp.add_argument("--eps", type=_float_list)
    p_exp.add_argument("--out", help="output directory")
    p_exp.add_argument("--paper-scale", action="store_true")
    p_exp.set_defaults(func=_cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
