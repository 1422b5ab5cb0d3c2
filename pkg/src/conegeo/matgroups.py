"""Finite matrix groups, their orbits on the cone, and fixed-point cones.

Groups are enumerated from generators by breadth-first closure; elements are
compared with an absolute Frobenius tolerance (no phase normalization: these
are honest matrix groups, not projective ones).  The fixed-point set of the
congruence action is the positive part of the real linear space
``{X Hermitian : h X h* = X for every generator h}``, computed as a null space.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .config import tol
from .errors import CapExceeded, DimMismatch, EmptyCone, NotNormal, NotUnitaryGroup
from .geometry import OP, MetricKind, dist
from .matcore import (
    PosDefMatrix,
    as_matrix,
    as_posdef,
    check_invertible,
    from_coords,
    hermitian_basis,
    op_norm,
)

DEFAULT_CAP = 10_000


class ElementIndex:
    """Approximate-equality lookup for matrices.

    Elements are bucketed by a fixed random projection; a query checks the
    neighbouring buckets, then confirms with the Frobenius distance.
    """

    def __init__(self, dim: int, atol: float, width: float = 1e-5):
        rng = np.random.default_rng(12345)
        w = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        self._w = w / np.linalg.norm(w)
        self.atol = atol
        self.width = max(width, 100 * atol)
        self._buckets: dict[int, list[int]] = {}
        self.items: list[np.ndarray] = []

    def _key(self, M) -> int:
        return int(np.floor(np.vdot(self._w, M).real / self.width))

    def find(self, M) -> int | None:
        k = self._key(M)
        for kk in (k - 1, k, k + 1):
            for idx in self._buckets.get(kk, ()):
                if np.linalg.norm(self.items[idx] - M) <= self.atol:
                    return idx
        return None

    def add(self, M) -> int:
        idx = len(self.items)
        self.items.append(M)
        self._buckets.setdefault(self._key(M), []).append(idx)
        return idx

    def __len__(self):
        return len(self.items)


@dataclass(frozen=True, eq=False)
class MatrixGroup:
    """A finite group of invertible matrices: generators plus enumerated closure.

    ``elements[0]`` is the identity.  ``words[i]`` lists generator indices whose
    ordered product is ``elements[i]``.
    """

    generators: tuple
    elements: tuple
    words: tuple
    cap: int = DEFAULT_CAP
    _index: ElementIndex = field(repr=False, default=None)

    @property
    def dim(self) -> int:
        return self.generators[0].shape[0]

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def index_of(self, M) -> int | None:
        return self._index.find(np.asarray(M, dtype=complex))

    def contains(self, M) -> bool:
        return self.index_of(M) is not None

    def conjugate(self, f) -> "MatrixGroup":
        """The group ``f^{-1} H f``, re-closed from conjugated generators."""
        return close_group(conjugate_generators(self.generators, f), cap=self.cap)

    def is_unitary(self, rtol: float | None = None) -> bool:
        rtol = tol().unitary * 100 if rtol is None else rtol
        eye = np.eye(self.dim)
        return all(op_norm(h.conj().T @ h - eye) <= rtol for h in self.generators)


def conjugate_generators(generators, f) -> list[np.ndarray]:
    """Generators of ``f^{-1} H f``."""
    F = as_matrix(f)
    Finv = np.linalg.inv(F)
    return [Finv @ as_matrix(h) @ F for h in generators]


def close_group(generators: Sequence, cap: int = DEFAULT_CAP) -> MatrixGroup:
    """Enumerate the group generated by ``generators``.

    Raises :class:`CapExceeded` when more than ``cap`` elements appear, or when
    an element blows up numerically (the group is then not finite).
    """
    gens = [check_invertible(g) for g in generators]
    if not gens:
        raise ValueError("need at least one generator")
    n = gens[0].shape[0]
    if any(g.shape[0] != n for g in gens):
        raise DimMismatch("generators have different dimensions")
    index = ElementIndex(n, tol().group)
    words: list[tuple] = []
    index.add(np.eye(n, dtype=complex))
    words.append(())
    frontier = [0]
    # finite groups: the monoid generated is already the group
    blowup = 1e8 * max(1.0, max(op_norm(g) for g in gens))
    while frontier:
        nxt = []
        for i in frontier:
            x = index.items[i]
            for gi, g in enumerate(gens):
                y = x @ g
                if index.find(y) is not None:
                    continue
                if not np.all(np.isfinite(y)) or op_norm(y) > blowup:
                    raise CapExceeded("element norms diverge; group is not finite")
                if len(index) >= cap:
                    raise CapExceeded(f"more than {cap} elements")
                nxt.append(index.add(y))
                words.append(words[i] + (gi,))
        frontier = nxt
    return MatrixGroup(tuple(gens), tuple(index.items), tuple(words), cap, index)


def as_group(H, cap: int = DEFAULT_CAP) -> MatrixGroup:
    return H if isinstance(H, MatrixGroup) else close_group(H, cap)


def group_size_norm(H) -> float:
    """``|H| = max_h ||h||`` (operator norm)."""
    H = as_group(H)
    return max(op_norm(h) for h in H.elements)


def orbit(H, a) -> list[PosDefMatrix]:
    """Distinct points ``h a h*`` over the group, first point is ``a``."""
    H = as_group(H)
    a = as_posdef(a)
    if a.dim != H.dim:
        raise DimMismatch(f"group dim {H.dim} vs point dim {a.dim}")
    A = a.mat
    index = ElementIndex(H.dim, tol().group * max(1.0, a.lam_max))
    out = []
    for h in H.elements:
        M = h @ A @ h.conj().T
        M = (M + M.conj().T) / 2
        if index.find(M) is None:
            index.add(M)
            out.append(PosDefMatrix(M))
    return out


def orbit_diameter(H, a, m=OP, pairwise: bool = False) -> float:
    """Diameter ``D_H(a)`` of the orbit of ``a``.

    The action is isometric, so ``d(h1.a, h2.a) = d(a, (h1^{-1} h2).a)`` and the
    diameter is ``max_h d(a, h.a)``; ``pairwise=True`` takes the literal
    maximum over all pairs instead.
    """
    m = MetricKind.parse(m)
    pts = orbit(H, a)
    if pairwise:
        return max((dist(p, q, m) for i, p in enumerate(pts) for q in pts[i + 1:]), default=0.0)
    return max((dist(pts[0], q, m) for q in pts[1:]), default=0.0)


def block_hermitian_basis(blocks: Sequence[int]) -> np.ndarray:
    """Orthonormal basis of block-diagonal Hermitian matrices."""
    n = int(sum(blocks))
    parts = []
    start = 0
    for b in blocks:
        sub = hermitian_basis(b)
        emb = np.zeros((len(sub), n, n), dtype=complex)
        emb[:, start:start + b, start:start + b] = sub
        parts.append(emb)
        start += b
    return np.concatenate(parts)


def _null_basis(maps, basis: np.ndarray) -> np.ndarray:
    """Orthonormal basis (Re tr inner product) of the joint real null space.

    ``maps`` are callables ``X -> complex array`` that are real-linear on the
    span of ``basis``.
    """
    cols = []
    for f in maps:
        cols.append(np.stack([np.concatenate([f(B).real.ravel(), f(B).imag.ravel()]) for B in basis], axis=1))
    if not cols:
        return basis.copy()
    M = np.concatenate(cols, axis=0)
    _, s, Vh = np.linalg.svd(M, full_matrices=True)
    # the maps act on unit-norm inputs, so roundoff-level columns count as zero
    smax = max(s[0] if s.size else 0.0, 1.0)
    rank = int(np.sum(s > tol().nullspace * smax))
    N = Vh[rank:].T  # k x r, orthonormal columns
    if N.shape[1] == 0:
        return np.zeros((0,) + basis.shape[1:], dtype=complex)
    out = np.stack([from_coords(N[:, j], basis) for j in range(N.shape[1])])
    # align sign so the trace is non-negative (cosmetic, keeps id-like vectors positive)
    for j in range(len(out)):
        if np.trace(out[j]).real < 0:
            out[j] = -out[j]
    return out


@dataclass(frozen=True, eq=False)
class FixedCone:
    """The fixed cone ``P^H``: positive elements of ``span(basis)``.

    ``basis`` is orthonormal for ``Re tr(XY)``.  ``blocks`` records the ambient
    block-diagonal algebra (``None`` for the full matrix algebra).
    """

    dim: int
    basis: np.ndarray
    generators: tuple
    blocks: tuple | None = None

    @property
    def rank(self) -> int:
        return len(self.basis)

    def coords(self, X) -> np.ndarray:
        return np.einsum("kij,ji->k", self.basis, np.asarray(X)).real

    def point(self, c) -> np.ndarray:
        return from_coords(c, self.basis)

    def project(self, X) -> np.ndarray:
        """Orthogonal projection of a Hermitian matrix onto the span."""
        return self.point(self.coords(X))

    def span_residual(self, X) -> float:
        """Frobenius distance from ``X`` to the span, relative to ``||X||``."""
        X = np.asarray(X)
        return float(np.linalg.norm(X - self.project(X)) / max(np.linalg.norm(X), 1e-300))

    def fixed_residual(self, X) -> float:
        X = np.asarray(X)
        return max(float(np.linalg.norm(h @ X @ h.conj().T - X)) for h in self.generators)

    def identity_component(self) -> np.ndarray:
        """Projection of the identity onto the span (the trace functional)."""
        return self.project(np.eye(self.dim))


def fixed_cone(generators, blocks: Sequence[int] | None = None) -> FixedCone:
    """Fixed cone of the congruence action of the group generated by ``generators``.

    Fixing the generators fixes the whole group, so enumeration is not needed.
    With ``blocks`` the ambient algebra is the block-diagonal subalgebra.
    """
    if isinstance(generators, MatrixGroup):
        generators = generators.generators
    gens = [check_invertible(g) for g in generators]
    n = gens[0].shape[0]
    if blocks is not None:
        blocks = tuple(int(b) for b in blocks)
        if sum(blocks) != n:
            raise DimMismatch(f"blocks {blocks} do not add up to {n}")
        basis = block_hermitian_basis(blocks)
    else:
        basis = hermitian_basis(n)
    maps = [lambda X, h=h: h @ X @ h.conj().T - X for h in gens]
    null = _null_basis(maps, basis)
    if len(null) == 0:
        raise EmptyCone("no nonzero Hermitian matrix is fixed by the group")
    return FixedCone(n, null, tuple(gens), blocks)


def commutant_basis(H, blocks: Sequence[int] | None = None) -> np.ndarray:
    """Orthonormal basis of Hermitian matrices commuting with a unitary group."""
    gens = H.generators if isinstance(H, MatrixGroup) else [as_matrix(h) for h in H]
    eye = np.eye(gens[0].shape[0])
    for h in gens:
        if op_norm(h.conj().T @ h - eye) > 100 * tol().unitary:
            raise NotUnitaryGroup("commutant_basis needs a unitary group")
    n = gens[0].shape[0]
    basis = hermitian_basis(n) if blocks is None else block_hermitian_basis(blocks)
    return _null_basis([lambda X, h=h: h @ X - X @ h for h in gens], basis)


def subspace_distance(A: np.ndarray, B: np.ndarray) -> float:
    """Operator-norm distance between orthogonal projectors onto two spans.

    ``A`` and ``B`` are stacks of Hermitian matrices, not necessarily orthonormal.
    """
    def proj(S):
        if len(S) == 0:
            return None
        M = np.stack([np.concatenate([s.real.ravel(), s.imag.ravel()]) for s in S], axis=1)
        U, s, _ = np.linalg.svd(M, full_matrices=False)
        r = int(np.sum(s > 1e-9 * s[0]))
        U = U[:, :r]
        return U @ U.T

    PA, PB = proj(A), proj(B)
    if PA is None or PB is None:
        return 0.0 if PA is None and PB is None else 1.0
    return float(np.linalg.norm(PA - PB, 2))


def check_normal(sub: MatrixGroup, G: MatrixGroup) -> None:
    """Raise :class:`NotNormal` unless ``sub`` is a normal subgroup of ``G``."""
    for s in sub.elements:
        if not G.contains(s):
            raise NotNormal("subgroup element not in the ambient group")
    for g in G.generators:
        gi = np.linalg.inv(g)
        for s in sub.generators:
            if not sub.contains(g @ s @ gi):
                raise NotNormal("subgroup is not closed under conjugation")


@dataclass(frozen=True, eq=False)
class Representation:
    """A finite group given by its multiplication table, with matrix images.

    ``table[i, j]`` is the id of the product ``x_i x_j``; id 0 is the unit.
    ``gen_ids`` are the ids of a generating set.
    """

    table: np.ndarray
    images: tuple
    gen_ids: tuple

    @property
    def order(self) -> int:
        return len(self.images)

    @property
    def dim(self) -> int:
        return self.images[0].shape[0]

    @property
    def generators(self) -> list[np.ndarray]:
        return [self.images[i] for i in self.gen_ids]

    def homomorphism_residual(self) -> float:
        worst = float(np.linalg.norm(self.images[0] - np.eye(self.dim)))
        for i, x in enumerate(self.images):
            for j, y in enumerate(self.images):
                worst = max(worst, float(np.linalg.norm(self.images[self.table[i, j]] - x @ y)))
        return worst

    def conjugated(self, g) -> "Representation":
        """``Ad_g`` composed with the representation: ``x -> g pi(x) g^{-1}``."""
        G = as_matrix(g)
        Gi = np.linalg.inv(G)
        return Representation(self.table, tuple(G @ x @ Gi for x in self.images), self.gen_ids)

    def image_group(self) -> MatrixGroup:
        return close_group(self.generators)


def representation_of(H) -> Representation:
    """The tautological representation of a matrix group (faithful by construction)."""
    H = as_group(H)
    N = H.order
    table = np.empty((N, N), dtype=int)
    for i, x in enumerate(H.elements):
        for j, y in enumerate(H.elements):
            k = H.index_of(x @ y)
            if k is None:
                raise CapExceeded("closure is not closed under products")
            table[i, j] = k
    gen_ids = tuple(H.index_of(g) for g in H.generators)
    return Representation(table, H.elements, gen_ids)


def direct_sum_generators(*gen_lists) -> list[np.ndarray]:
    """Block-diagonal generators ``g_1 + g_2 + ...`` from parallel generator lists."""
    from scipy.linalg import block_diag

    k = {len(g) for g in gen_lists}
    if len(k) != 1:
        raise DimMismatch("generator lists have different lengths")
    return [block_diag(*gs).astype(complex) for gs in zip(*gen_lists)]
