"""Computable error bounds for randomized block Krylov eigenvalue estimates.

Two families of bounds are evaluated, both controlling the relative error
err = (a_max - xi) / rho of the depth-q estimate with block size ell.  The
depth splits as q = q1 + q2: q1 powers burn in past the bulk of the spectrum
(measured by the stable rank srk(q1)), q2 drive the exponential convergence.

* gap-free bounds: valid for every symmetric matrix, error decays like
  exp(-2(2 q2 + 1) sqrt(eps)) in the tail parameter.
* gap bounds: exploit a relative spectral gap gamma > 0 below the top
  eigenvalue, error decays like exp(-4 q2 sqrt(gamma)).

Everything is evaluated in log space and clamped at the end, so extreme
parameters degrade to 0 or 1 instead of overflowing.  best_bound sweeps all
partitions of q and reports the minima; depth_thresholds inverts the bounds
to give the depth sufficient for a target accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .spectrum import DEFAULT_TIE_TOL, Spectrum, spectral_gap, stable_rank

_LOG2 = math.log(2.0)
_LOG8 = math.log(8.0)
_LOG4 = math.log(4.0)
_LOG_2PI = math.log(2.0 * math.pi)

# The ell = 2 expectation-depth threshold is only stated for small targets;
# reports flag eps above this.
PRIME_EPS_VALIDITY = 0.2


def _check_common(ell: int, q2: int, srk_q1: float) -> None:
    if int(ell) != ell or ell < 1:
        raise ValueError("ell must be a positive integer")
    if int(q2) != q2 or q2 < 0:
        raise ValueError("q2 must be a nonnegative integer")
    if not (srk_q1 >= 0.0 and math.isfinite(srk_q1)):
        raise ValueError("srk_q1 must be finite and nonnegative")


def _clamped_exp(log_value: float) -> float:
    """exp(log_value) clamped into [0, 1]."""
    return math.exp(min(log_value, 0.0))


def prob_bound_gapfree(ell: int, q2: int, srk_q1: float, eps: float) -> float:
    """Tail probability bound P[err >= eps] without any gap assumption.

    Evaluates 1 ^ sqrt(2) * [8 srk(q1) exp(-2 (2 q2 + 1) sqrt(eps))]**(ell/2)
    for eps in [0, 1].  An srk of 0 (identity multiple) gives 0.
    """
    _check_common(ell, q2, srk_q1)
    if not 0.0 <= eps <= 1.0:
        raise ValueError("eps must lie in [0, 1]")
    if srk_q1 == 0.0:
        return 0.0
    log_value = 0.5 * _LOG2 + 0.5 * ell * (
        _LOG8 + math.log(srk_q1) - 2.0 * (2.0 * q2 + 1.0) * math.sqrt(eps)
    )
    return _clamped_exp(log_value)


def expect_bound_gapfree(ell: int, q2: int, srk_q1: float) -> float:
    """Expected relative error bound without any gap assumption.

    Evaluates 1 ^ [(2.70 / ell + log(8 srk(q1))) / (2 (2 q2 + 1))]**2.
    """
    _check_common(ell, q2, srk_q1)
    if srk_q1 == 0.0:
        return 0.0
    num = 2.70 / ell + _LOG8 + math.log(srk_q1)
    value = (num / (2.0 * (2.0 * q2 + 1.0))) ** 2
    return min(1.0, value)


def prob_bound_gap(ell: int, q2: int, srk_q1: float, gamma: float, eps: float) -> float:
    """Tail probability bound P[err >= eps] using a spectral gap gamma.

    Evaluates 1 ^ sqrt(2) * [(8 srk(q1) / eps) exp(-4 q2 sqrt(gamma))]**(ell/2)
    for eps in (0, 1].
    """
    _check_common(ell, q2, srk_q1)
    if not 0.0 < eps <= 1.0:
        raise ValueError("eps must lie in (0, 1]")
    if not 0.0 <= gamma <= 1.0:
        raise ValueError("gamma must lie in [0, 1]")
    if srk_q1 == 0.0:
        return 0.0
    log_value = 0.5 * _LOG2 + 0.5 * ell * (
        _LOG8 + math.log(srk_q1) - math.log(eps) - 4.0 * q2 * math.sqrt(gamma)
    )
    return _clamped_exp(log_value)


def log_gap_factor(q2: int, srk_q1: float, gamma: float) -> float:
    """log of F = 4 srk(q1) exp(-4 q2 sqrt(gamma)); -inf when srk is 0."""
    if srk_q1 == 0.0:
        return -math.inf
    return _LOG4 + math.log(srk_q1) - 4.0 * q2 * math.sqrt(gamma)


def expect_bound_gap(ell: int, q2: int, srk_q1: float, gamma: float) -> float:
    """Expected relative error bound using a spectral gap gamma.

    With F = 4 srk(q1) exp(-4 q2 sqrt(gamma)), evaluates
        F / ((ell - 2) + F)        for ell >= 3,
        (F / 2) log(1 + 2 / F)     for ell = 2,
        1 ^ sqrt(2 pi F)           for ell = 1.
    All three tend to 0 as F -> 0 and are increasing in F.
    """
    _check_common(ell, q2, srk_q1)
    if not 0.0 <= gamma <= 1.0:
        raise ValueError("gamma must lie in [0, 1]")
    if srk_q1 == 0.0:
        return 0.0
    log_f = log_gap_factor(q2, srk_q1, gamma)
    if ell >= 3:
        # F / ((ell-2) + F) without forming a possibly huge F
        value = math.exp(log_f - _logaddexp(math.log(ell - 2.0), log_f))
    elif ell == 2:
        if log_f > -30.0:
            f = math.exp(log_f)
            value = 0.5 * f * math.log1p(2.0 / f)
        else:
            # (F/2)(log 2 - log F) to within O(F) relative error
            value = math.exp(log_f + math.log(0.5 * (_LOG2 - log_f)))
    else:
        value = math.exp(0.5 * (_LOG_2PI + log_f))
    return min(1.0, value)


def _logaddexp(a: float, b: float) -> float:
    if a < b:
        a, b = b, a
    if b == -math.inf:
        return a
    return a + math.log1p(math.exp(b - a))


@dataclass(frozen=True)
class Partition:
    """Split of the total depth q into burn-in q1 and convergence q2."""

    q1: int
    q2: int

    @property
    def q(self) -> int:
        return self.q1 + self.q2


@dataclass(frozen=True)
class PartitionBounds:
    """All four bound values at one depth partition."""

    partition: Partition
    srk_q1: float
    prob_gapfree: float
    expect_gapfree: float
    prob_gap: float
    expect_gap: float
    log_gap_factor: float


@dataclass(frozen=True)
class BoundReport:
    """Bounds at every partition of q, plus the minima over partitions."""

    ell: int
    q: int
    eps: float
    gamma: float
    rows: tuple[PartitionBounds, ...]
    best_prob_gapfree: float
    best_expect_gapfree: float
    best_prob_gap: float
    best_expect_gap: float

    @property
    def best_prob(self) -> float:
        return min(self.best_prob_gapfree, self.best_prob_gap)

    @property
    def best_expect(self) -> float:
        return min(self.best_expect_gapfree, self.best_expect_gap)


def _resolve_srk(spectrum, srk_profile, needed):
    """Map each integer nu in needed to its stable rank."""
    if (spectrum is None) == (srk_profile is None):
        raise ValueError("provide exactly one of spectrum or srk_profile")
    if spectrum is not None:
        if spectrum.is_identity_multiple():
            raise ValueError("bounds are undefined for an identity-multiple spectrum")
        return {nu: stable_rank(spectrum, nu) for nu in needed}
    table = {}
    for nu in needed:
        if nu not in srk_profile:
            raise ValueError(f"srk_profile has no entry for nu = {nu}; "
                             "exact integer nu values are required")
        table[nu] = float(srk_profile[nu])
    return table


def _resolve_gamma(spectrum, gamma, tie_tol):
    if gamma is not None:
        if not 0.0 <= gamma <= 1.0:
            raise ValueError("gamma must lie in [0, 1]")
        return float(gamma)
    if spectrum is None:
        raise ValueError("gamma is required when no spectrum is given")
    return spectral_gap(spectrum, tie_tol)


def best_bound(ell: int, q: int, eps: float, *,
               spectrum: Spectrum | None = None,
               srk_profile: dict | None = None,
               gamma: float | None = None,
               tie_tol: float = DEFAULT_TIE_TOL) -> BoundReport:
    """Evaluate all bounds at every partition q = q1 + q2 and take minima.

    The spectrum (or an integer-nu srk profile plus an explicit gamma) supplies
    the stable ranks.  An explicit gamma argument overrides the spectrum's own
    gap, which is how a lower bound on the gap is used.
    """
    if int(q) != q or q < 0:
        raise ValueError("q must be a nonnegative integer")
    srk_table = _resolve_srk(spectrum, srk_profile, range(q + 1))
    gam = _resolve_gamma(spectrum, gamma, tie_tol)

    rows = []
    for q1 in range(q + 1):
        q2 = q - q1
        srk_q1 = srk_table[q1]
        rows.append(PartitionBounds(
            partition=Partition(q1, q2),
            srk_q1=srk_q1,
            prob_gapfree=prob_bound_gapfree(ell, q2, srk_q1, eps),
            expect_gapfree=expect_bound_gapfree(ell, q2, srk_q1),
            prob_gap=prob_bound_gap(ell, q2, srk_q1, gam, eps),
            expect_gap=expect_bound_gap(ell, q2, srk_q1, gam),
            log_gap_factor=log_gap_factor(q2, srk_q1, gam),
        ))

    return BoundReport(
        ell=int(ell), q=int(q), eps=float(eps), gamma=gam, rows=tuple(rows),
        best_prob_gapfree=min(r.prob_gapfree for r in rows),
        best_expect_gapfree=min(r.expect_gapfree for r in rows),
        best_prob_gap=min(r.prob_gap for r in rows),
        best_expect_gap=min(r.expect_gap for r in rows),
    )


@dataclass(frozen=True)
class DepthRow:
    """Depth thresholds at one burn-in choice q1 (real-valued, caller ceils)."""

    q1: int
    srk_q1: float
    q2_gapfree: float
    q2_prob_gap: float
    q2_expect_gap: float


@dataclass(frozen=True)
class DepthThresholds:
    """Sufficient convergence depths q2 per q1, with total-depth minima.

    A negative threshold means depth 0 already meets the target.  Totals are
    q1 + q2 before ceiling.  prime_eps_within_validity records whether the
    ell = 2 expectation threshold was used inside its stated range.
    """

    ell: int
    eps: float
    gamma: float
    rows: tuple[DepthRow, ...]
    best_gapfree: DepthRow
    best_prob_gap: DepthRow
    best_expect_gap: DepthRow
    prime_eps_within_validity: bool


def depth_thresholds(ell: int, eps: float, *,
                     spectrum: Spectrum | None = None,
                     srk_profile: dict | None = None,
                     gamma: float | None = None,
                     q1_max: int = 40,
                     tie_tol: float = DEFAULT_TIE_TOL) -> DepthThresholds:
    """Depth sufficient to push each bound below eps, per burn-in depth q1.

    Returns real-valued q2 thresholds on a q1 grid (0..q1_max for a spectrum,
    the profile's keys otherwise) together with the rows minimizing the total
    depth q1 + q2 for each bound family.
    """
    if int(ell) != ell or ell < 1:
        raise ValueError("ell must be a positive integer")
    if not 0.0 < eps <= 1.0:
        raise ValueError("eps must lie in (0, 1]")
    if srk_profile is not None:
        grid = sorted(int(k) for k in srk_profile)
    else:
        grid = list(range(q1_max + 1))
    srk_table = _resolve_srk(spectrum, srk_profile, grid)
    gam = _resolve_gamma(spectrum, gamma, tie_tol)

    sqrt_eps = math.sqrt(eps)
    sqrt_gam = math.sqrt(gam)
    log_inv_eps = -math.log(eps)

    rows = []
    for q1 in grid:
        srk_q1 = srk_table[q1]
        if srk_q1 <= 0.0:
            raise ValueError("depth thresholds are undefined for srk = 0")
        log8s = _LOG8 + math.log(srk_q1)
        t_free = -0.5 + (2.70 / ell + log8s) / (4.0 * sqrt_eps)
        if sqrt_gam > 0.0:
            t_pgap = (0.70 / ell + log8s + log_inv_eps) / (4.0 * sqrt_gam)
            log4s = _LOG4 + math.log(srk_q1)
            if ell >= 3:
                t_egap = (log4s + log_inv_eps - math.log(ell - 2.0)) / (4.0 * sqrt_gam)
            elif ell == 2:
                loglog = math.log(log_inv_eps) if log_inv_eps > 0.0 else -math.inf
                t_egap = (log4s + log_inv_eps + loglog) / (4.0 * sqrt_gam)
            else:
                t_egap = (log4s + 2.0 * log_inv_eps + _LOG_2PI) / (4.0 * sqrt_gam)
        else:
            t_pgap = math.inf
            t_egap = math.inf
        rows.append(DepthRow(q1, srk_q1, t_free, t_pgap, t_egap))

    def best(field):
        return min(rows, key=lambda r: r.q1 + getattr(r, field))

    return DepthThresholds(
        ell=int(ell), eps=float(eps), gamma=gam, rows=tuple(rows),
        best_gapfree=best("q2_gapfree"),
        best_prob_gap=best("q2_prob_gap"),
        best_expect_gap=best("q2_expect_gap"),
        prime_eps_within_validity=not (ell == 2 and eps > PRIME_EPS_VALIDITY),
    )
