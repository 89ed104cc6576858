"""Matrix operators applied blockwise by the Krylov iteration.

The iteration only ever needs A @ X for tall blocks X, so operators are
closures over whatever representation is cheapest: a diagonal, a dense
symmetric array, or an implicit Gram matrix C C^T / C^T C whose square is
never formed.
"""

from __future__ import annotations

import numpy as np

from .spectrum import Spectrum


class MatrixOperator:
    """Symmetric linear operator exposing dim and blockwise apply."""

    dim: int

    def apply(self, block: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _check_block(self, block: np.ndarray) -> np.ndarray:
        block = np.asarray(block, dtype=np.float64)
        if block.ndim == 1:
            block = block[:, None]
        if block.ndim != 2 or block.shape[0] != self.dim:
            raise ValueError(f"block must have {self.dim} rows")
        return block


class DiagonalOperator(MatrixOperator):
    """diag(d) for a vector of eigenvalues."""

    def __init__(self, values) -> None:
        if isinstance(values, Spectrum):
            values = values.values
        d = np.asarray(values, dtype=np.float64).ravel()
        if d.size == 0 or not np.all(np.isfinite(d)):
            raise ValueError("diagonal must be nonempty and finite")
        self.diagonal = d
        self.dim = int(d.size)

    def apply(self, block: np.ndarray) -> np.ndarray:
        block = self._check_block(block)
        return self.diagonal[:, None] * block


class DenseOperator(MatrixOperator):
    """Dense symmetric matrix; symmetrized exactly on construction."""

    # rejects inputs whose asymmetry exceeds this relative to the largest entry
    ASYM_RTOL = 1e-8

    def __init__(self, matrix) -> None:
        m = np.asarray(matrix, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("matrix must be square")
        if not np.all(np.isfinite(m)):
            raise ValueError("matrix entries must be finite")
        scale = np.max(np.abs(m)) if m.size else 0.0
        if scale > 0 and np.max(np.abs(m - m.T)) > self.ASYM_RTOL * scale:
            raise ValueError("matrix is not symmetric")
        self.matrix = (m + m.T) / 2.0
        self.dim = int(m.shape[0])

    def apply(self, block: np.ndarray) -> np.ndarray:
        block = self._check_block(block)
        return self.matrix @ block


class GramOperator(MatrixOperator):
    """C C^T (side="left") or C^T C (side="right") without forming the square."""

    def __init__(self, factor, side: str) -> None:
        c = np.asarray(factor, dtype=np.float64)
        if c.ndim != 2:
            raise ValueError("factor must be a 2-d array")
        if not np.all(np.isfinite(c)):
            raise ValueError("factor entries must be finite")
        if side not in ("left", "right"):
            raise ValueError('side must be "left" or "right"')
        self.factor = c
        self.side = side
        self.dim = int(c.shape[0] if side == "left" else c.shape[1])

    def apply(self, block: np.ndarray) -> np.ndarray:
        block = self._check_block(block)
        if self.side == "left":
            return self.factor @ (self.factor.T @ block)
        return self.factor.T @ (self.factor @ block)


def gram_auto(factor) -> GramOperator:
    """Gram operator on the smaller side of a rectangular factor."""
    c = np.asarray(factor, dtype=np.float64)
    if c.ndim != 2:
        raise ValueError("factor must be a 2-d array")
    return GramOperator(c, "left" if c.shape[0] <= c.shape[1] else "right")


class NegatedOperator(MatrixOperator):
    """-A for an existing operator A."""

    def __init__(self, inner: MatrixOperator) -> None:
        self.inner = inner
        self.dim = inner.dim

    def apply(self, block: np.ndarray) -> np.ndarray:
        return -self.inner.apply(block)


def load_matrix_market(path) -> DenseOperator:
    """Read a square symmetric matrix in Matrix Market format."""
    from scipy.io import mmread

    m = mmread(str(path))
    if hasattr(m, "toarray"):
        m = m.toarray()
    return DenseOperator(np.asarray(m, dtype=np.float64))
