"""Test-matrix ensembles with controlled spectral features.

All ensembles are produced directly as spectra (the iteration is rotation
invariant, so experiments run on the diagonal model).  Random ensembles are
seeded with the same counter-based generator as the test blocks.  Because a
large eigendecomposition is worth amortizing, generated spectra can be
persisted as plain text and reloaded exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .spectrum import Spectrum, load_spectrum, save_spectrum

ENSEMBLE_KINDS = (
    "goe",
    "gapped_goe",
    "gapped_power_law",
    "laplacian_1d",
    "inverse_laplacian_1d",
)


def goe_spectrum(n: int, seed: int) -> Spectrum:
    """Spectrum of a Gaussian orthogonal ensemble draw, mapped onto [0, 1].

    W = (G + G^T) / 2 for an n x n standard normal G.  The eigenvalues are
    affinely rescaled so the extremes land on exactly 0 and 1, which pins the
    spectral range without touching the relative spacings.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    rng = np.random.Generator(np.random.Philox(key=int(seed)))
    g = rng.standard_normal((n, n))
    w = (g + g.T) / 2.0
    vals = np.linalg.eigvalsh(w)
    lo, hi = vals[0], vals[-1]
    return Spectrum((vals - lo) / (hi - lo))


def gapped_goe_spectrum(n: int, gamma: float, seed: int) -> Spectrum:
    """GOE spectrum with the top eigenvalue moved to set a prescribed gap.

    Starting from goe_spectrum(n, seed), the largest eigenvalue is replaced by
    a_2 / (1 - gamma), which makes (a_max - a_2) / (a_max - a_min) = gamma
    while leaving a_min = 0 and the rest of the spectrum untouched.
    """
    if not 0.0 < gamma < 1.0:
        raise ValueError("gamma must lie in (0, 1)")
    base = goe_spectrum(n, seed).values.copy()
    new_top = base[1] / (1.0 - gamma)
    base[0] = new_top
    return Spectrum(base)


def gapped_power_law_spectrum(n: int, power: float, gamma: float) -> Spectrum:
    """Power-law decay below a top eigenvalue with a prescribed gap.

    a_1 = 1 + gamma / (1 - gamma) and a_i = (i - 1)**(-1/power) for i >= 2.
    Deterministic.  At gamma = 0 the top eigenvalue is 1 with multiplicity 2.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if power <= 0:
        raise ValueError("power must be positive")
    if not 0.0 <= gamma < 1.0:
        raise ValueError("gamma must lie in [0, 1)")
    vals = np.empty(n, dtype=np.float64)
    vals[0] = 1.0 + gamma / (1.0 - gamma)
    idx = np.arange(1, n, dtype=np.float64)
    vals[1:] = idx ** (-1.0 / power)
    return Spectrum(vals)


def laplacian_spectra(n: int) -> tuple[Spectrum, Spectrum]:
    """Spectra of the 1-d Dirichlet difference Laplacian and its inverse.

    With grid spacing h = 1/(n+1), eigenvalue j of the Laplacian is
    (2/h^2) (1 + cos(pi j h)), evaluated as (4/h^2) cos(pi j h / 2)^2 to keep
    full relative accuracy for the nearly-degenerate small eigenvalues that
    dominate the inverse.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    h = 1.0 / (n + 1)
    j = np.arange(1, n + 1, dtype=np.float64)
    lam = (4.0 / h ** 2) * np.cos(0.5 * math.pi * j * h) ** 2
    return Spectrum(lam), Spectrum(1.0 / lam)


@dataclass(frozen=True)
class EnsembleSpec:
    """Recipe for one spectrum: kind plus whichever parameters it takes."""

    kind: str
    n: int
    gamma: float | None = None
    power: float | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in ENSEMBLE_KINDS:
            raise ValueError(f"unknown ensemble kind {self.kind!r}; "
                             f"expected one of {', '.join(ENSEMBLE_KINDS)}")
        needs = _REQUIRED_PARAMS[self.kind]
        for name in needs:
            if getattr(self, name) is None:
                raise ValueError(f"ensemble {self.kind!r} requires {name}")

    def label(self) -> str:
        """Filename-safe identifier carrying every parameter."""
        parts = [self.kind, f"n{self.n}"]
        if self.gamma is not None:
            parts.append(f"gamma{self.gamma:g}")
        if self.power is not None:
            parts.append(f"p{self.power:g}")
        if self.seed is not None:
            parts.append(f"seed{self.seed}")
        return "_".join(parts).replace(".", "m")


_REQUIRED_PARAMS = {
    "goe": ("seed",),
    "gapped_goe": ("gamma", "seed"),
    "gapped_power_law": ("gamma", "power"),
    "laplacian_1d": (),
    "inverse_laplacian_1d": (),
}


def make_spectrum(spec: EnsembleSpec) -> Spectrum:
    """Generate the spectrum an EnsembleSpec describes."""
    if spec.kind == "goe":
        return goe_spectrum(spec.n, spec.seed)
    if spec.kind == "gapped_goe":
        return gapped_goe_spectrum(spec.n, spec.gamma, spec.seed)
    if spec.kind == "gapped_power_law":
        return gapped_power_law_spectrum(spec.n, spec.power, spec.gamma)
    if spec.kind == "laplacian_1d":
        return laplacian_spectra(spec.n)[0]
    return laplacian_spectra(spec.n)[1]


def ensure_spectrum(spec: EnsembleSpec, cache_dir) -> Spectrum:
    """Load the spectrum from cache_dir, generating and saving it on a miss.

    The file name encodes every parameter, so distinct recipes never collide
    and re-running an experiment reuses the identical spectrum.
    """
    cache = Path(cache_dir)
    cache.mkdir(parents=True, exist_ok=True)
    path = cache / f"{spec.label()}.txt"
    if path.exists():
        return load_spectrum(path)
    spectrum = make_spectrum(spec)
    save_spectrum(spectrum, path)
    return spectrum
