"""Metrics, geodesics and the congruence action on the positive cone.

Two metrics share the same geodesics ``a^{1/2} (a^{-1/2} b a^{-1/2})^t a^{1/2}``:
the operator-norm (Thompson-type) metric and the Frobenius one, which makes
the cone a CAT(0) space.  Both are ``||log(a^{-1/2} b a^{-1/2})||`` in the
respective norm.
"""
from __future__ import annotations

import enum

import numpy as np

from .matcore import (
    PosDefMatrix,
    as_matrix,
    as_posdef,
    check_hermitian,
    exp_herm,
    herm_eig,
    op_norm,
    same_dim,
)


class MetricKind(str, enum.Enum):
    OP = "op"
    FROB = "frob"

    @classmethod
    def parse(cls, m) -> "MetricKind":
        if isinstance(m, cls):
            return m
        key = str(m).lower()
        aliases = {"op": cls.OP, "operator": cls.OP, "operatornorm": cls.OP,
                   "frob": cls.FROB, "frobenius": cls.FROB, "hs": cls.FROB}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown metric {m!r}") from None


OP = MetricKind.OP
FROB = MetricKind.FROB


def log_norm(evals, m=OP) -> float:
    """Norm of ``log`` of a positive matrix given its eigenvalues."""
    lg = np.log(np.asarray(evals, float))
    if MetricKind.parse(m) is OP:
        return float(np.max(np.abs(lg)))
    return float(np.sqrt(np.sum(lg * lg)))


def relative_spectrum(a, b) -> np.ndarray:
    """Eigenvalues of ``a^{-1/2} b a^{-1/2}``."""
    a = as_posdef(a)
    B = as_matrix(b)
    same_dim(a, B)
    R = a.inv_sqrt().mat
    C = R @ B @ R.conj().T
    return np.linalg.eigvalsh((C + C.conj().T) / 2)


def dist(a, b, m=OP) -> float:
    """Distance ``||log(a^{-1/2} b a^{-1/2})||`` in the operator or Frobenius norm."""
    return log_norm(relative_spectrum(a, b), m)


class Geodesic:
    """The geodesic ``t -> a^{1/2} (a^{-1/2} b a^{-1/2})^t a^{1/2}``.

    ``t`` may lie outside ``[0, 1]``; the formula extends to the full line.
    """

    def __init__(self, a, b):
        self.a = as_posdef(a)
        self.b = as_posdef(b)
        same_dim(self.a, self.b)
        self.a_half = self.a.sqrt().mat
        self.a_ihalf = self.a.inv_sqrt().mat
        C = self.a_ihalf @ self.b.mat @ self.a_ihalf
        self._w, self._V = np.linalg.eigh((C + C.conj().T) / 2)

    def __call__(self, t: float) -> PosDefMatrix:
        return self.eval(t)

    def eval(self, t: float) -> PosDefMatrix:
        if t == 0:
            return self.a
        if t == 1:
            return self.b
        return self.formula(t)

    def formula(self, t: float) -> PosDefMatrix:
        """The spectral formula itself, with no shortcut at the endpoints."""
        Ct = (self._V * self._w ** t) @ self._V.conj().T
        G = self.a_half @ Ct @ self.a_half
        return PosDefMatrix((G + G.conj().T) / 2)

    def length(self, m=OP) -> float:
        return log_norm(self._w, m)


def geodesic_eval(a, b, t: float) -> PosDefMatrix:
    return Geodesic(a, b).eval(t)


def act(g, a) -> PosDefMatrix:
    """The congruence action ``g . a = g a g*``."""
    G = as_matrix(g)
    A = np.asarray(as_posdef(a))
    same_dim(G, A)
    M = G @ A @ G.conj().T
    return PosDefMatrix((M + M.conj().T) / 2)


def exp_at(a, X) -> PosDefMatrix:
    """Riemannian exponential ``a^{1/2} exp(a^{-1/2} X a^{-1/2}) a^{1/2}``."""
    a = as_posdef(a)
    R = a.inv_sqrt().mat
    E = exp_herm(R @ check_hermitian(X) @ R)
    return act(a.sqrt().mat, E)


def log_at(a, b) -> np.ndarray:
    """Riemannian logarithm at ``a``: the tangent vector pointing to ``b``."""
    a = as_posdef(a)
    R = a.inv_sqrt().mat
    S = a.sqrt().mat
    w, V = herm_eig(R @ np.asarray(b) @ R)
    L = (V * np.log(w)) @ V.conj().T
    M = S @ L @ S
    return (M + M.conj().T) / 2


def banach_mazur_delta(a, b, convention: str = "square") -> float:
    """Banach-Mazur distance between the Hilbertian norms attached to ``a`` and ``b``.

    ``sup_x |log(||x||_a / ||x||_b)|`` equals half the largest ``|log|`` of the
    generalized eigenvalues of the pencil of the Gram matrices.

    convention
        ``"square"``: ``||x||_a = ||a x|| = <a^2 x, x>^{1/2}``, Gram matrix ``a^2``.
        ``"linear"``: ``||x||_a = <a x, x>^{1/2}``, Gram matrix ``a``.
    """
    a = as_posdef(a)
    b = as_posdef(b)
    same_dim(a, b)
    if convention == "square":
        M = b.inv().mat @ a.mat
        mu = np.linalg.eigvalsh(M @ M.conj().T)
    elif convention == "linear":
        mu = relative_spectrum(b, a)
    else:
        raise ValueError(f"unknown convention {convention!r}")
    return 0.5 * float(np.max(np.abs(np.log(mu))))


def segal_residual(X, Y) -> float:
    """``||e^{X/2} e^Y e^{X/2}|| - ||e^{X+Y}||`` (non-negative by Segal's inequality)."""
    X = check_hermitian(X)
    Y = check_hermitian(Y)
    same_dim(X, Y)
    Eh = exp_herm(X / 2).mat
    lhs = op_norm(Eh @ exp_herm(Y).mat @ Eh)
    rhs = float(np.exp(np.linalg.eigvalsh(X + Y)[-1]))
    return lhs - rhs


def emi_residual(a, X, Y) -> float:
    """``d(exp_a X, exp_a Y) - ||a^{-1/2}(X - Y) a^{-1/2}||`` in the operator norm.

    The exponential metric increasing property says this is non-negative.
    """
    a = as_posdef(a)
    X = check_hermitian(X)
    Y = check_hermitian(Y)
    same_dim(a, X, Y)
    R = a.inv_sqrt().mat
    D = R @ (X - Y) @ R
    w = np.linalg.eigvalsh((D + D.conj().T) / 2)
    return dist(exp_at(a, X), exp_at(a, Y), OP) - float(max(abs(w[0]), abs(w[-1])))
