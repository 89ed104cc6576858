"""Eigenvalue spectra and the scale-free quantities driving the error analysis.

A Spectrum holds the eigenvalues of a symmetric matrix sorted in descending
order.  Three features of the spectrum control how fast a randomized Krylov
estimate converges: the spectral range rho, the relative gap gamma below the
top eigenvalue, and the nu-stable rank.  All of them are invariant under
increasing affine maps of the spectrum, which is what makes the relative
error a meaningful target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

# Spectra whose total range is this small (relative to scale) are treated as
# multiples of the identity: gap and stable rank are 0, relative error is
# undefined.
IDENTITY_RTOL = 1e-14

# Eigenvalues within DEFAULT_TIE_TOL * rho of the top count as tied with it
# when locating the gap.
DEFAULT_TIE_TOL = 1e-12


class Spectrum:
    """Sorted eigenvalues of a symmetric matrix.

    Values are stored descending in a read-only float64 array; the input may
    be in any order.  Entries must be finite and there must be at least one.
    """

    __slots__ = ("values",)

    def __init__(self, values) -> None:
        arr = np.atleast_1d(np.asarray(values, dtype=np.float64))
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("spectrum must be a nonempty vector")
        if not np.all(np.isfinite(arr)):
            raise ValueError("spectrum entries must be finite")
        arr = np.sort(arr)[::-1].copy()
        arr.setflags(write=False)
        self.values = arr

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def a_max(self) -> float:
        return float(self.values[0])

    @property
    def a_min(self) -> float:
        return float(self.values[-1])

    @property
    def rho(self) -> float:
        """Spectral range a_max - a_min (>= 0)."""
        return self.a_max - self.a_min

    def is_identity_multiple(self) -> bool:
        return self.rho <= IDENTITY_RTOL * max(1.0, abs(self.a_max))

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"Spectrum(n={self.n}, a_max={self.a_max:g}, a_min={self.a_min:g})"


@dataclass(frozen=True)
class SpectralFeatures:
    """Summary of a spectrum: range, relative gap, top multiplicity."""

    n: int
    rho: float
    gamma: float
    top_multiplicity: int
    identity_multiple: bool


def spectral_features(spectrum: Spectrum, tie_tol: float = DEFAULT_TIE_TOL) -> SpectralFeatures:
    """Compute range, relative gap and top-eigenvalue multiplicity.

    Eigenvalues within tie_tol * rho of a_max count toward the multiplicity m;
    the gap is (a_max - a_{m+1}) / rho.  A spectrum with all eigenvalues tied
    (a multiple of the identity) has rho treated as degenerate: gamma = 0.
    """
    a = spectrum.values
    rho = spectrum.rho
    if spectrum.is_identity_multiple():
        return SpectralFeatures(spectrum.n, rho, 0.0, spectrum.n, True)
    tied = (a[0] - a) <= tie_tol * rho
    m = int(np.count_nonzero(tied))
    if m >= spectrum.n:
        gamma = 0.0
    else:
        gamma = (a[0] - a[m]) / rho
    return SpectralFeatures(spectrum.n, rho, float(gamma), m, False)


def spectral_gap(spectrum: Spectrum, tie_tol: float = DEFAULT_TIE_TOL) -> float:
    """Relative gap (a_max - a_{m+1}) / (a_max - a_min); 0 for identity multiples."""
    return spectral_features(spectrum, tie_tol).gamma


def stable_rank(spectrum: Spectrum, nu: float) -> float:
    """nu-stable rank: sum of ((a_i - a_min) / rho)**(2 nu) over the spectrum.

    Counts how many eigenvalues sit near the top of the range, with larger nu
    discounting the bulk more aggressively.  At nu = 0 every term is 1 so the
    result is n.  Identity multiples return 0 by convention.  The sum is
    accumulated with compensated summation so large n does not erode the
    small-srank regime.
    """
    if nu < 0:
        raise ValueError("nu must be nonnegative")
    if spectrum.is_identity_multiple():
        return 0.0
    x = (spectrum.values - spectrum.a_min) / spectrum.rho
    # 0.0 ** 0.0 == 1.0, so nu = 0 yields exactly n
    terms = x ** (2.0 * nu)
    return float(math.fsum(terms))


def relative_error(spectrum: Spectrum, xi: float) -> float:
    """Relative error (a_max - xi) / rho of an estimate xi of a_max.

    Lies in [0, 1] whenever a_min <= xi <= a_max.  Undefined for identity
    multiples (rho degenerate): raises ValueError.
    """
    if spectrum.is_identity_multiple():
        raise ValueError("relative error is undefined for an identity-multiple spectrum")
    return (spectrum.a_max - xi) / spectrum.rho


def affine_map(spectrum: Spectrum, alpha: float, beta: float) -> Spectrum:
    """Spectrum of alpha * A + beta * I; re-sorts when alpha < 0."""
    if not (math.isfinite(alpha) and math.isfinite(beta)):
        raise ValueError("affine coefficients must be finite")
    return Spectrum(alpha * spectrum.values + beta)


def save_spectrum(spectrum: Spectrum, path) -> None:
    """Write one eigenvalue per line in ASCII decimal, descending."""
    lines = "".join(f"{v:.17g}\n" for v in spectrum.values)
    Path(path).write_text(lines, encoding="ascii")


def load_spectrum(path) -> Spectrum:
    """Read a one-eigenvalue-per-line text file; blank lines are skipped."""
    values = []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                values.append(float(text))
            except ValueError as exc:
                raise ValueError(f"{path}: line {lineno}: not a decimal number: {text!r}") from exc
    if not values:
        raise ValueError(f"{path}: no eigenvalues found")
    return Spectrum(values)
