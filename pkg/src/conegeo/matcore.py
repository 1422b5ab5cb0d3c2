"""Hermitian and positive-definite matrices and spectral matrix functions.

Every matrix function in the package (square roots, logarithms, real powers,
exponentials) goes through one primitive, the Hermitian eigendecomposition
:func:`herm_eig`, so all modules share a single error model.  Matrices are
plain complex ``numpy`` arrays; :class:`PosDefMatrix` wraps a point of the
cone together with its cached spectral data.
"""
from __future__ import annotations

from functools import cached_property
from typing import Callable

import numpy as np

from .config import tol
from .errors import (
    DimMismatch,
    DomainError,
    NonHermitian,
    NotInvertible,
    NotPositiveDefinite,
    NotUnitary,
)

__all__ = [
    "PosDefMatrix",
    "as_matrix",
    "check_hermitian",
    "check_invertible",
    "check_unitary",
    "exp_herm",
    "herm_eig",
    "herm_norm",
    "hermitian_basis",
    "mat_fn",
    "op_norm",
    "validate_posdef",
    "same_dim",
]


def as_matrix(M) -> np.ndarray:
    """Return ``M`` as a square complex array (no copy when possible)."""
    A = np.asarray(M, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimMismatch(f"expected a square matrix, got shape {A.shape}")
    return A


def same_dim(*mats) -> int:
    dims = {np.shape(m)[0] for m in mats}
    if len(dims) != 1:
        raise DimMismatch(f"dimension mismatch: {sorted(dims)}")
    return dims.pop()


def op_norm(M) -> float:
    """Operator norm (largest singular value)."""
    return float(np.linalg.norm(np.asarray(M), 2))


def herm_norm(X) -> float:
    """Operator norm of a Hermitian matrix, i.e. its spectral radius."""
    w = np.linalg.eigvalsh(check_hermitian(X))
    return float(max(abs(w[0]), abs(w[-1])))


def check_hermitian(H, rtol: float | None = None) -> np.ndarray:
    """Validate hermiticity and return the exactly symmetrized matrix."""
    A = as_matrix(H)
    rtol = tol().herm if rtol is None else rtol
    scale = max(np.linalg.norm(A), 1.0)
    err = np.linalg.norm(A - A.conj().T)
    if err > rtol * scale:
        raise NonHermitian(f"hermiticity defect {err:.3e} exceeds {rtol:.1e}*{scale:.3e}")
    return (A + A.conj().T) / 2


def check_invertible(g) -> np.ndarray:
    A = as_matrix(g)
    s = np.linalg.svd(A, compute_uv=False)
    if not np.all(np.isfinite(s)) or s[-1] <= tol().eps_inv * max(s[0], 1.0):
        raise NotInvertible(f"smallest singular value {s[-1]:.3e} below floor")
    return A


def check_unitary(u, rtol: float | None = None) -> np.ndarray:
    A = as_matrix(u)
    rtol = tol().unitary if rtol is None else rtol
    err = op_norm(A.conj().T @ A - np.eye(A.shape[0]))
    if err > rtol * max(op_norm(A) ** 2, 1.0):
        raise NotUnitary(f"unitarity defect {err:.3e}")
    return A


def herm_eig(H) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and an orthonormal eigenframe of a Hermitian matrix."""
    w, V = np.linalg.eigh(check_hermitian(H))
    return w, V


def _from_spectrum(w, V) -> np.ndarray:
    A = (V * w) @ V.conj().T
    return (A + A.conj().T) / 2


class PosDefMatrix:
    """A point of the cone of positive-definite matrices.

    Construct through :func:`validate_posdef` (checks the positivity floor) or
    :func:`exp_herm`.  The eigendecomposition is computed once and reused by
    every matrix function.
    """

    __array_priority__ = 10

    def __init__(self, mat, evals=None, frame=None):
        mat = np.array(mat, dtype=complex)
        mat.flags.writeable = False
        self.mat = mat
        if evals is not None:
            evals = np.asarray(evals, dtype=float)
            frame = np.asarray(frame, dtype=complex)
            evals.flags.writeable = False
            frame.flags.writeable = False
            self.__dict__["_eig"] = (evals, frame)

    @classmethod
    def from_spectrum(cls, evals, frame) -> "PosDefMatrix":
        return cls(_from_spectrum(np.asarray(evals, float), frame), evals, frame)

    @cached_property
    def _eig(self):
        w, V = np.linalg.eigh(self.mat)
        w.flags.writeable = False
        V.flags.writeable = False
        return w, V

    def __array__(self, dtype=None, copy=None):
        return self.mat if dtype is None else self.mat.astype(dtype)

    def __repr__(self):
        return f"PosDefMatrix(dim={self.dim}, spectrum=[{self.evals[0]:.4g}, {self.evals[-1]:.4g}])"

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @property
    def evals(self) -> np.ndarray:
        return self._eig[0]

    @property
    def frame(self) -> np.ndarray:
        return self._eig[1]

    @property
    def lam_min(self) -> float:
        return float(self.evals[0])

    @property
    def lam_max(self) -> float:
        return float(self.evals[-1])

    def apply(self, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        return mat_fn(self, f)

    def power(self, t: float) -> "PosDefMatrix":
        w, V = self._eig
        return PosDefMatrix.from_spectrum(w ** t, V)

    def sqrt(self) -> "PosDefMatrix":
        return self.power(0.5)

    def inv_sqrt(self) -> "PosDefMatrix":
        return self.power(-0.5)

    def inv(self) -> "PosDefMatrix":
        return self.power(-1.0)

    def log(self) -> np.ndarray:
        w, V = self._eig
        return _from_spectrum(np.log(w), V)

    def scaled(self, alpha: float) -> "PosDefMatrix":
        w, V = self._eig
        return PosDefMatrix(alpha * self.mat, alpha * w, V)

    def cond(self) -> float:
        return self.lam_max / self.lam_min


def mat_fn(a, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Apply a real scalar function to ``a`` through its spectrum."""
    if isinstance(a, PosDefMatrix):
        w, V = a.evals, a.frame
    else:
        w, V = herm_eig(a)
    with np.errstate(all="ignore"):
        fw = np.asarray(f(w), dtype=float)
    if fw.shape != w.shape or not np.all(np.isfinite(fw)):
        bad = w[~np.isfinite(fw)] if fw.shape == w.shape else w
        raise DomainError(f"function undefined at eigenvalue(s) {bad}")
    return _from_spectrum(fw, V)


def exp_herm(X) -> PosDefMatrix:
    """Matrix exponential of a Hermitian matrix, returned as a cone point."""
    w, V = herm_eig(X)
    ew = np.exp(w)
    return PosDefMatrix(_from_spectrum(ew, V), ew, V)


def validate_posdef(H) -> PosDefMatrix:
    """Check the relative positivity floor and return a :class:`PosDefMatrix`."""
    if isinstance(H, PosDefMatrix):
        H = H.mat
    A = check_hermitian(H)
    w, V = np.linalg.eigh(A)
    if not np.all(np.isfinite(w)) or w[0] <= tol().eps_pd * max(w[-1], 0.0) or w[-1] <= 0:
        raise NotPositiveDefinite(w[0])
    return PosDefMatrix(A, w, V)


def as_posdef(a) -> PosDefMatrix:
    return a if isinstance(a, PosDefMatrix) else validate_posdef(a)


def hermitian_basis(n: int) -> np.ndarray:
    """Basis of n x n Hermitian matrices, orthonormal for ``Re tr(XY)``.

    Shape ``(n*n, n, n)``: diagonal units first, then for each ``i < j`` the
    symmetric and antisymmetric off-diagonal pairs.
    """
    out = np.zeros((n * n, n, n), dtype=complex)
    k = 0
    for i in range(n):
        out[k, i, i] = 1.0
        k += 1
    r = 1 / np.sqrt(2)
    for i in range(n):
        for j in range(i + 1, n):
            out[k, i, j] = out[k, j, i] = r
            out[k + 1, i, j] = -1j * r
            out[k + 1, j, i] = 1j * r
            k += 2
    return out


def coords(X, basis: np.ndarray) -> np.ndarray:
    """Real coordinates of Hermitian ``X`` against an orthonormal Hermitian basis."""
    return np.einsum("kij,ji->k", basis, np.asarray(X)).real


def from_coords(c, basis: np.ndarray) -> np.ndarray:
    A = np.tensordot(np.asarray(c, float), basis, axes=1)
    return (A + A.conj().T) / 2


def realify(M: np.ndarray) -> np.ndarray:
    """Stack real and imaginary parts of a complex array along the last axis."""
    M = np.asarray(M)
    return np.concatenate([M.real, M.imag], axis=-1)
