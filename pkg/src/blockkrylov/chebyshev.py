"""Chebyshev polynomials on and off [-1, 1], and damped polynomial envelopes.

The convergence analysis rests on polynomials that are small on the bulk of
the spectrum [0, beta] while normalized to 1 at the top.  Two constructions
are provided: phi (first kind, for probability bounds) and psi (second kind,
for expectation bounds).  Their suppression on the bulk is governed by the
attenuation factor delta(beta) < 1.

Evaluation switches at |s| = 1 exactly: the three-term recurrence inside the
interval, the largest-branch closed form outside, which avoids cancellation.
"""

from __future__ import annotations

import numpy as np


def _as_array(s):
    arr = np.asarray(s, dtype=np.float64)
    return arr, arr.ndim == 0


def _validate_degree(p: int, name: str = "p") -> int:
    if int(p) != p or p < 0:
        raise ValueError(f"{name} must be a nonnegative integer")
    return int(p)


def cheb_T(p: int, s):
    """Chebyshev polynomial of the first kind, T_p(s).

    Scalar in, float out; array in, array out.  Degrees are capped only by
    floating-point overflow for |s| > 1.
    """
    p = _validate_degree(p)
    arr, scalar = _as_array(s)
    out = np.empty_like(arr)

    inside = np.abs(arr) <= 1.0
    si = arr[inside]
    t_prev = np.ones_like(si)
    t_cur = si.copy()
    if p == 0:
        out[inside] = t_prev
    else:
        for _ in range(p - 1):
            t_prev, t_cur = t_cur, 2.0 * si * t_cur - t_prev
        out[inside] = t_cur

    so = arr[~inside]
    x = np.abs(so)
    u = x + np.sqrt(x * x - 1.0)
    with np.errstate(over="ignore"):
        mag = 0.5 * (u ** p + u ** (-p))
    sign = np.where((so < 0.0) & (p % 2 == 1), -1.0, 1.0)
    out[~inside] = sign * mag

    return float(out) if scalar else out


def cheb_U(p: int, s):
    """Chebyshev polynomial of the second kind, U_p(s)."""
    p = _validate_degree(p)
    arr, scalar = _as_array(s)
    out = np.empty_like(arr)

    inside = np.abs(arr) <= 1.0
    si = arr[inside]
    u_prev = np.ones_like(si)
    u_cur = 2.0 * si
    if p == 0:
        out[inside] = u_prev
    else:
        for _ in range(p - 1):
            u_prev, u_cur = u_cur, 2.0 * si * u_cur - u_prev
        out[inside] = u_cur

    so = arr[~inside]
    x = np.abs(so)
    root = np.sqrt(x * x - 1.0)
    u = x + root
    with np.errstate(over="ignore"):
        mag = (u ** (p + 1) - u ** (-(p + 1))) / (2.0 * root)
    sign = np.where((so < 0.0) & (p % 2 == 1), -1.0, 1.0)
    out[~inside] = sign * mag

    return float(out) if scalar else out


def attenuation_delta(beta):
    """Attenuation factor delta = (1 - sqrt(1-beta)) / (1 + sqrt(1-beta)).

    Strictly increasing on (0, 1] with delta(1) = 1.  Evaluated as
    beta / (1 + sqrt(1-beta))**2, which is the same quantity without the
    subtractive cancellation at small beta.
    """
    arr, scalar = _as_array(beta)
    if np.any((arr <= 0.0) | (arr > 1.0)):
        raise ValueError("beta must lie in (0, 1]")
    w = np.sqrt(1.0 - arr)
    out = arr / (1.0 + w) ** 2
    return float(out) if scalar else out


def _u_even_from_t(p: int, t):
    """U_{2p}(sqrt(t)) evaluated as a polynomial in t, valid for any real t.

    Uses U_{2p}(cos h) = 1 + 2 sum_{k<=p} T_k(cos 2h), i.e. the Dirichlet
    kernel identity, with cos 2h = 2t - 1.
    """
    x = 2.0 * t - 1.0
    acc = np.ones_like(np.asarray(t, dtype=np.float64))
    for k in range(1, p + 1):
        acc = acc + 2.0 * cheb_T(k, x)
    return acc


def u_second_kind_even(p: int, t):
    """U_{2p}(sqrt(t)) for real t, including t < 0 via the even extension."""
    p = _validate_degree(p)
    arr, scalar = _as_array(t)
    out = np.empty_like(arr)
    neg = arr < 0.0
    if np.any(neg):
        out[neg] = _u_even_from_t(p, arr[neg])
    if np.any(~neg):
        out[~neg] = cheb_U(2 * p, np.sqrt(arr[~neg]))
    return float(out) if scalar else out


def phi_poly(s, beta: float, q1: int, q2: int):
    """Damped envelope s**q1 * T_q2(2s/beta - 1) / T_q2(2/beta - 1).

    Defined for 0 <= s <= 1 and 0 < beta <= 1; equals 1 exactly at s = 1.
    On [0, beta] it is bounded by 2 * s**q1 * delta**q2 in magnitude.
    """
    q1 = _validate_degree(q1, "q1")
    q2 = _validate_degree(q2, "q2")
    if not 0.0 < beta <= 1.0:
        raise ValueError("beta must lie in (0, 1]")
    arr, scalar = _as_array(s)
    if np.any((arr < 0.0) | (arr > 1.0)):
        raise ValueError("s must lie in [0, 1]")
    num = cheb_T(q2, (2.0 / beta) * arr - 1.0)
    den = cheb_T(q2, 2.0 / beta - 1.0)
    out = arr ** q1 * num / den
    return float(out) if scalar else out


def psi_poly(s, beta: float, q1: int, q2: int):
    """Damped envelope s**q1 * U_{2 q2}(sqrt(s/beta)) / U_{2 q2}(sqrt(1/beta)).

    Defined for -1 <= s <= 1 (negative s via the even extension of U_{2 q2})
    and 0 < beta <= 1; equals 1 exactly at s = 1.
    """
    q1 = _validate_degree(q1, "q1")
    q2 = _validate_degree(q2, "q2")
    if not 0.0 < beta <= 1.0:
        raise ValueError("beta must lie in (0, 1]")
    arr, scalar = _as_array(s)
    if np.any(np.abs(arr) > 1.0):
        raise ValueError("s must lie in [-1, 1]")
    num = u_second_kind_even(q2, arr / beta)
    den = u_second_kind_even(q2, 1.0 / beta)
    out = arr ** q1 * num / den
    return float(out) if scalar else out
