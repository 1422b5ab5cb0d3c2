"""Conditional expectations and the Porta-Recht splitting.

Two kinds of expectation are provided: the pinching ``X -> pXp + (1-p)X(1-p)``
by an orthogonal projection, and the average ``X -> |H|^{-1} sum_h h X h*``
over a finite unitary group, whose range is the commutant of ``H``.  Both are
orthogonal projections for the trace inner product, so range and kernel are
read off one symmetric eigenproblem.

Given ``E``, every positive ``a`` splits uniquely as ``e^Y e^X e^Y`` with ``Y``
in the range and ``E(X) = 0``; invertibles split as ``g = u e^Z e^Y``.  The
canonical unitarizer of ``Ad_g o pi0`` is ``e^{-X0}`` with ``X0 = u Z u*``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import root

from .config import tol
from .errors import ConeGeoError, NoConvergence, NotProjection, NotUnitaryGroup, RangeMismatch
from .geometry import OP, dist
from .matcore import (
    PosDefMatrix,
    as_matrix,
    as_posdef,
    check_hermitian,
    check_invertible,
    coords,
    exp_herm,
    herm_norm,
    hermitian_basis,
    op_norm,
)
from .matgroups import (
    MatrixGroup,
    Representation,
    as_group,
    commutant_basis,
    fixed_cone,
    subspace_distance,
)
from .unitarize import dist_to_fixed_cone, similarity_number, unitarity_residual

__all__ = [
    "CondExpectation",
    "SplitTriple",
    "CanonicalUnitarizer",
    "ThmacsReport",
    "canonical_unitarizer",
    "complement_norm",
    "minexp_gap",
    "group_average_expectation",
    "pinching_expectation",
    "pr_split_invertible",
    "pr_split_positive",
    "thmacs_check",
]


def _herm(A):
    return (A + A.conj().T) / 2


@dataclass(frozen=True, eq=False)
class CondExpectation:
    """A conditional expectation on ``n x n`` matrices.

    ``kind`` is ``"pinching"`` (``data`` = the projection) or ``"average"``
    (``data`` = the unitary group).
    """

    dim: int
    kind: str
    data: object
    range_basis: np.ndarray
    kernel_basis: np.ndarray
    _fn: Callable = None

    def __call__(self, X) -> np.ndarray:
        return self._fn(np.asarray(X, dtype=complex))

    def apply(self, X) -> np.ndarray:
        return self(X)

    def complement(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=complex)
        return X - self(X)

    def idempotence_residual(self, X) -> float:
        EX = self(X)
        return float(np.linalg.norm(self(EX) - EX))

    def bimodule_residual(self, b1, X, b2) -> float:
        return float(np.linalg.norm(self(b1 @ X @ b2) - b1 @ self(X) @ b2))

    def in_range(self, X) -> float:
        """Frobenius distance from ``X`` to the range, relative to ``||X||``."""
        X = np.asarray(X)
        return float(np.linalg.norm(X - self(X)) / max(np.linalg.norm(X), 1e-300))

    def conjugated(self, u) -> "CondExpectation":
        """``Ad_u o E o Ad_{u*}`` for a unitary ``u``."""
        U = as_matrix(u)
        Us = U.conj().T

        def fn(X, E=self._fn):
            return U @ E(Us @ X @ U) @ Us

        rb = np.stack([U @ B @ Us for B in self.range_basis]) if len(self.range_basis) else self.range_basis
        kb = np.stack([U @ B @ Us for B in self.kernel_basis]) if len(self.kernel_basis) else self.kernel_basis
        data = U @ self.data @ Us if self.kind == "pinching" else self.data
        return CondExpectation(self.dim, self.kind + "(conj)", data, rb, kb, fn)


def _split_bases(fn, n):
    """Range and kernel of a trace-orthogonal projection on Hermitian matrices."""
    basis = hermitian_basis(n)
    M = np.stack([coords(_herm(fn(B)), basis) for B in basis], axis=1)
    M = (M + M.T) / 2
    w, V = np.linalg.eigh(M)
    on = w > 0.5
    rng = np.tensordot(V[:, on].T, basis, axes=1)
    ker = np.tensordot(V[:, ~on].T, basis, axes=1)
    return rng, ker


def pinching_expectation(p) -> CondExpectation:
    """``E(X) = pXp + (1-p)X(1-p)`` for an orthogonal projection ``p``."""
    P = as_matrix(p)
    n = P.shape[0]
    scale = max(1.0, op_norm(P))
    if op_norm(P - P.conj().T) > tol().herm * scale or op_norm(P @ P - P) > tol().herm * 100 * scale:
        raise NotProjection("p is not an orthogonal projection")
    P = _herm(P)
    Q = np.eye(n) - P

    def fn(X):
        return P @ X @ P + Q @ X @ Q

    rng, ker = _split_bases(fn, n)
    return CondExpectation(n, "pinching", P, rng, ker, fn)


def group_average_expectation(H) -> CondExpectation:
    """``E(X) = |H|^{-1} sum_h h X h*`` for a finite unitary group."""
    H = as_group(H)
    if not H.is_unitary():
        raise NotUnitaryGroup("group averaging needs a unitary group")
    els = np.stack(H.elements)
    elsh = np.conj(np.transpose(els, (0, 2, 1)))
    N = H.order

    def fn(X):
        return np.einsum("kij,jl,klm->im", els, X, elsh) / N

    rng, ker = _split_bases(fn, H.dim)
    return CondExpectation(H.dim, "average", H, rng, ker, fn)


def complement_norm(E: CondExpectation, samples: int = 10_000, refine: int = 50,
                    rng: np.random.Generator | None = None) -> tuple[float, float]:
    """Estimate ``||(I - E)|_{Hermitian}||`` for the operator norm.

    Returns ``(lower, upper)``: the best sampled ratio refined by a power-type
    ascent, and an analytic upper bound (1 for a pinching, 2 otherwise).
    The ascent alternates ``v = top eigenvector of (I-E)X`` and
    ``X = sign((I-E)(v v*))``, which never decreases the ratio.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    n = E.dim
    upper = 1.0 if E.kind.startswith("pinching") else 2.0
    best, bestX = 0.0, np.eye(n, dtype=complex)
    for _ in range(samples):
        A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        X = _herm(A)
        r = herm_norm(E.complement(X)) / herm_norm(X)
        if r > best:
            best, bestX = r, X
    X = bestX / herm_norm(bestX)
    for _ in range(refine):
        D = _herm(E.complement(X))
        w, V = np.linalg.eigh(D)
        v = V[:, -1] if abs(w[-1]) >= abs(w[0]) else V[:, 0]
        T = _herm(E.complement(np.outer(v, v.conj())))
        tw, TV = np.linalg.eigh(T)
        Xn = (TV * np.where(tw >= 0, 1.0, -1.0)) @ TV.conj().T
        r = herm_norm(E.complement(Xn))
        if r <= best * (1 + 1e-14):
            break
        X, best = Xn, r
    return best, upper


# ------------------------------------------------------------- splitting


def _split_residual(a, E, Y):
    Ei = exp_herm(-Y).mat
    X = as_posdef(_herm(Ei @ a.mat @ Ei)).log()
    return X, _herm(E(X))


def pr_split_positive(a, E: CondExpectation, max_iter: int = 10_000, ktol: float = 1e-11):
    """Porta-Recht splitting ``a = e^Y e^X e^Y`` with ``E(Y) = Y`` and ``E(X) = 0``.

    The defining equation ``E(log(e^{-Y} a e^{-Y})) = 0`` is solved in the
    coordinates of the range by a hybrid Powell root finder started at
    ``Y = E(log a)/2`` (exact when everything commutes).  If that stalls, the
    fixed-point iteration ``Y <- Y + step * E(log(e^{-Y} a e^{-Y}))`` takes
    over; ``step`` starts at 1/2 and is quartered whenever the residual grows.
    Returns ``(X, Y)``.
    """
    a = as_posdef(a)
    B = E.range_basis
    Y = _herm(E(a.log())) / 2

    def done(X, D):
        return np.linalg.norm(D) <= ktol * max(1.0, np.linalg.norm(X))

    if len(B):
        try:
            sol = root(lambda c: coords(_split_residual(a, E, np.tensordot(c, B, axes=1))[1], B),
                       coords(Y, B), method="hybr", options={"xtol": 1e-14, "factor": 1.0})
            Yr = _herm(np.tensordot(sol.x, B, axes=1))
            X, D = _split_residual(a, E, Yr)
            if done(X, D):
                return _herm(X - D), Yr
        except (ConeGeoError, FloatingPointError):
            pass  # a trial step left the cone numerically; fall back
    step = 0.5
    best = np.inf
    for _ in range(max_iter):
        X, D = _split_residual(a, E, Y)
        r = float(np.linalg.norm(D))
        if done(X, D):
            return _herm(X - D), Y
        if r > best:
            step = max(step / 4, 1e-3)
        best = min(best, r)
        Y = Y + step * D
    raise NoConvergence("splitting iteration did not converge", best)


@dataclass(frozen=True)
class SplitTriple:
    u: np.ndarray
    Z: np.ndarray
    Y: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return self.u @ exp_herm(self.Z).mat @ exp_herm(self.Y).mat


def pr_split_invertible(g, E: CondExpectation) -> SplitTriple:
    """``g = u e^Z e^Y`` with ``u`` unitary, ``E(Z) = 0`` and ``Y`` in the range."""
    G = check_invertible(g)
    X, Y = pr_split_positive(_herm(G.conj().T @ G), E)
    Z = X / 2
    u = G @ exp_herm(-Y).mat @ exp_herm(-Z).mat
    return SplitTriple(u, Z, Y)


# --------------------------------------------------- canonical unitarizer


def _images(pi0):
    if isinstance(pi0, Representation):
        return list(pi0.generators)
    if isinstance(pi0, MatrixGroup):
        return list(pi0.generators)
    return [as_matrix(x) for x in pi0]


@dataclass(frozen=True)
class CanonicalUnitarizer:
    X0: np.ndarray
    split: SplitTriple
    rho: list            # generators of Ad_u o pi0
    pi1: list            # generators of Ad_g o pi0
    unitarity: float     # residual of Ad_{e^{-X0}} o pi1
    kernel_residual: float  # ||E_rho(X0)||
    rho_defect: float    # max ||e^{-X0} pi1 e^{X0} - rho||


def canonical_unitarizer(g, pi0, E: CondExpectation) -> CanonicalUnitarizer:
    """Canonical unitarizer ``e^{-X0}`` of ``pi1 = Ad_g o pi0``.

    ``pi0`` (a :class:`Representation`, a unitary :class:`MatrixGroup` or a list
    of unitary generators) must have commutant equal to the range of ``E``.
    """
    gens0 = _images(pi0)
    comm = commutant_basis(gens0)
    gap = subspace_distance(comm, E.range_basis)
    if gap > tol().fix * 100:
        raise RangeMismatch(f"range of E differs from the commutant of pi0 (gap {gap:.2e})")
    G = check_invertible(g)
    Gi = np.linalg.inv(G)
    sp = pr_split_invertible(G, E)
    u = sp.u
    X0 = _herm(u @ sp.Z @ u.conj().T)
    rho = [u @ x @ u.conj().T for x in gens0]
    pi1 = [G @ x @ Gi for x in gens0]
    s = exp_herm(X0)  # e^{-X0} . pi1 unitarizes with s = e^{X0}
    unit = unitarity_residual(s, pi1)
    Einv = exp_herm(-X0).mat
    Efwd = s.mat
    defect = max(op_norm(Einv @ p @ Efwd - r) for p, r in zip(pi1, rho))
    kres = float(np.linalg.norm(E(u.conj().T @ X0 @ u)))
    return CanonicalUnitarizer(X0, sp, rho, pi1, unit, kres, defect)


def _is_block_diagonal(M, blocks, atol=1e-12) -> bool:
    M = np.asarray(M)
    mask = np.zeros(M.shape, dtype=bool)
    start = 0
    for b in blocks:
        mask[start:start + b, start:start + b] = True
        start += b
    return float(np.max(np.abs(M[~mask]), initial=0.0)) <= atol * max(1.0, np.max(np.abs(M)))


@dataclass(frozen=True)
class ThmacsReport:
    lhs: float                 # ||e^{X0}|| ||e^{-X0}||
    rhs: float                 # Sim of pi1 over the block-diagonal algebra
    ratio: float
    via_distance: float        # exp dist(e^{-2X0}, P^rho) over the block algebra
    rhs_full: float | None     # Sim over the full matrix algebra
    complement_norm: tuple     # (estimate, upper bound) of ||I - E||
    unitarity: float
    kernel_residual: float

    def to_json(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "ratio": self.ratio,
                "via_distance": self.via_distance, "rhs_full": self.rhs_full,
                "complement_norm": list(self.complement_norm),
                "unitarity": self.unitarity, "kernel_residual": self.kernel_residual}


def thmacs_check(g, pi0, E: CondExpectation, blocks: Sequence[int], full: bool = True,
                 norm_samples: int = 2000) -> ThmacsReport:
    """Compare ``||e^{X0}|| ||e^{-X0}||`` with the similarity number of ``pi1``.

    The algebra is block diagonal with sizes ``blocks``; ``g`` and the images
    of ``pi0`` must lie in it.  The similarity number is computed over the
    block-diagonal algebra (and, with ``full=True``, over all matrices).
    """
    blocks = tuple(int(b) for b in blocks)
    gens0 = _images(pi0)
    for M in [g, *gens0]:
        if not _is_block_diagonal(M, blocks):
            raise RangeMismatch("setup is not block diagonal for the given blocks")
    cu = canonical_unitarizer(g, pi0, E)
    w = np.linalg.eigvalsh(cu.X0)
    lhs = float(np.exp(w[-1] - w[0]))
    rep = similarity_number(cu.pi1, blocks=blocks)
    rhs = rep.sim_value
    rho_cone = fixed_cone(cu.rho, blocks=blocks)
    d = dist_to_fixed_cone(exp_herm(-2 * cu.X0), rho_cone, OP).value
    rhs_full = similarity_number(cu.pi1).sim_value if full else None
    if E.kind.startswith("pinching"):
        cn = (1.0, 1.0)
    else:
        cn = complement_norm(E, samples=norm_samples)
    return ThmacsReport(lhs, rhs, lhs / rhs, float(np.exp(d)), rhs_full, cn,
                        cu.unitarity, cu.kernel_residual)


def minexp_gap(X, Y) -> float:
    """``d(e^{2Y}, e^Y e^X e^Y) - ||X||`` in the operator-norm metric."""
    X = check_hermitian(X)
    Y = check_hermitian(Y)
    eY = exp_herm(Y).mat
    a = PosDefMatrix(_herm(eY @ exp_herm(X).mat @ eY))
    return dist(exp_herm(2 * Y), a, OP) - herm_norm(X)
