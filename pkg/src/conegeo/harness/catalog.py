"""Named finite groups as unitary generator lists, and bounded representations.

Spec strings:

``cyclic:N``            regular representation of C_N (N x N permutation)
``dihedral:N``          the 2-dim rotation/reflection representation of D_N
``dihedral:N:k1,k2..``  direct sum of the 2-dim irreducibles with rotation indices k
``quaternion``          Q8 in SU(2)
``s3``                  S_3 on C^3 by permutations (reducible: trivial + standard)
``A*m``                 m copies of catalog entry A (e.g. ``dihedral:4*2``)
``prod:A|B``            direct product acting block-diagonally, (g, 1) and (1, h)
``regular:A``           left-regular representation of the group generated by A
"""
from __future__ import annotations

import numpy as np
from scipy.linalg import block_diag

from ..errors import BadSpec
from ..matgroups import Representation, close_group, conjugate_generators, direct_sum_generators, representation_of
from .rng import make_rng, posdef_with_cond

__all__ = ["CATALOG", "blocks_of", "gen_bounded_rep", "unitary_generators"]

CATALOG = ("cyclic:3", "cyclic:4", "dihedral:3", "dihedral:4", "dihedral:5:1,2",
           "quaternion", "s3", "dihedral:4*2", "prod:dihedral:4|quaternion")


def _rot(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _cyclic(n):
    return [np.roll(np.eye(n), 1, axis=0).astype(complex)]


def _dihedral(n, ks=(1,)):
    refl = np.diag([1.0, -1.0]).astype(complex)
    return direct_sum_generators(*[[_rot(2 * np.pi * k / n), refl] for k in ks])


def _quaternion():
    i = np.array([[1j, 0], [0, -1j]])
    j = np.array([[0, 1], [-1, 0]], dtype=complex)
    return [i, j]


def _s3():
    swap = np.eye(3)[[1, 0, 2]].astype(complex)
    cyc = np.eye(3)[[1, 2, 0]].astype(complex)
    return [swap, cyc]


def _regular(gens):
    # left-regular permutation representation read off the multiplication table
    rep = representation_of(close_group(gens))
    N = rep.order
    out = []
    for k in rep.gen_ids:
        P = np.zeros((N, N), dtype=complex)
        P[rep.table[k], np.arange(N)] = 1.0
        out.append(P)
    return out


def unitary_generators(spec: str) -> list[np.ndarray]:
    """Unitary generators for a catalog spec string."""
    spec = spec.strip()
    try:
        if spec.startswith("prod:"):
            left, _, right = spec[5:].partition("|")
            A, B = unitary_generators(left), unitary_generators(right)
            na, nb = A[0].shape[0], B[0].shape[0]
            return ([block_diag(g, np.eye(nb)).astype(complex) for g in A]
                    + [block_diag(np.eye(na), h).astype(complex) for h in B])
        if spec.startswith("regular:"):
            return _regular(unitary_generators(spec[8:]))
        if "*" in spec:
            base, _, m = spec.rpartition("*")
            gens = unitary_generators(base)
            return direct_sum_generators(*[gens] * int(m))
        name, _, rest = spec.partition(":")
        if name == "cyclic":
            return _cyclic(int(rest))
        if name == "dihedral":
            n, _, ks = rest.partition(":")
            n = int(n)
            ks = tuple(int(k) for k in ks.split(",")) if ks else (1,)
            if not all(0 < k < n for k in ks):
                raise BadSpec(f"rotation index out of range in {spec!r}")
            return _dihedral(n, ks)
        if name == "quaternion":
            return _quaternion()
        if name == "s3":
            return _s3()
    except (ValueError, IndexError) as exc:
        raise BadSpec(f"cannot parse group spec {spec!r}: {exc}") from exc
    raise BadSpec(f"unknown group spec {spec!r}")


def blocks_of(spec: str) -> tuple[int, ...] | None:
    """Block sizes of a block-diagonal catalog entry (``None`` if irreducible-looking)."""
    if spec.startswith("prod:"):
        left, _, right = spec[5:].partition("|")
        return (unitary_generators(left)[0].shape[0], unitary_generators(right)[0].shape[0])
    return None


def gen_bounded_rep(spec: str, cond: float, seed: int = 0, s=None) -> tuple[Representation, np.ndarray]:
    """``Ad_s`` of a unitary catalog representation, ``s`` positive with ``cond(s) = cond``.

    Returns the representation ``x -> s pi(x) s^{-1}`` and ``s``.  A given ``s``
    overrides the random one.
    """
    if not cond >= 1.0:
        raise BadSpec(f"condition target must be >= 1, got {cond}")
    gens = unitary_generators(spec)
    n = gens[0].shape[0]
    if s is None:
        s = posdef_with_cond(make_rng(seed, "gen_rep", spec), n, cond).mat
    S = np.asarray(s, dtype=complex)
    conj = conjugate_generators(gens, np.linalg.inv(S))
    return representation_of(conj), S
