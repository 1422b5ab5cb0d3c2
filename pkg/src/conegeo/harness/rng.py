"""Seeded random instances.

Every stream is a Philox counter-based generator keyed by
``SeedSequence([seed, *labels])``, so a check's instances depend only on the
run seed and the check's own label, never on scheduling.
"""
from __future__ import annotations

import zlib

import numpy as np

from ..matcore import PosDefMatrix, exp_herm


def label_key(label) -> int:
    if isinstance(label, (int, np.integer)):
        return int(label)
    return zlib.crc32(str(label).encode())


def make_rng(seed: int, *labels) -> np.random.Generator:
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF] + [label_key(x) for x in labels])
    return np.random.Generator(np.random.Philox(ss))


def rand_herm(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    """Independent unit-variance real and imaginary parts, then symmetrized."""
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * (A + A.conj().T) / 2


def rand_posdef(rng: np.random.Generator, n: int, scale: float = 0.5) -> PosDefMatrix:
    return exp_herm(rand_herm(rng, n, scale))


def rand_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar unitary via QR with the phase correction."""
    Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R)
    return Q * (d / np.abs(d))


def rand_invertible(rng: np.random.Generator, n: int, scale: float = 0.5) -> np.ndarray:
    """``u e^X``: a well-conditioned random invertible."""
    return rand_unitary(rng, n) @ rand_posdef(rng, n, scale).mat


def posdef_with_cond(rng: np.random.Generator, n: int, cond: float) -> PosDefMatrix:
    """Random positive matrix with symmetric spectrum and condition number ``cond``.

    The extreme eigenvalues are ``cond^{+-1/2}`` exactly; the rest are uniform
    in log scale between them.
    """
    L = np.log(cond)
    w = np.empty(n)
    w[0], w[-1] = -L / 2, L / 2
    if n > 2:
        w[1:-1] = rng.uniform(-L / 2, L / 2, n - 2)
    w = np.sort(w)
    V = rand_unitary(rng, n)
    return PosDefMatrix.from_spectrum(np.exp(w), V)
