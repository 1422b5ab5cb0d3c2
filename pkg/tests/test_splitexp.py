import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conegeo.errors import NotProjection, NotUnitaryGroup, RangeMismatch
from conegeo.geometry import FROB, OP, dist
from conegeo.harness.catalog import unitary_generators
from conegeo.harness.rng import make_rng, rand_herm, rand_invertible, rand_posdef, rand_unitary
from conegeo.matcore import exp_herm, herm_norm, validate_posdef
from conegeo.matgroups import close_group, commutant_basis, conjugate_generators, fixed_cone, subspace_distance
from conegeo.splitexp import (
    canonical_unitarizer,
    complement_norm,
    group_average_expectation,
    minexp_gap,
    pinching_expectation,
    pr_split_invertible,
    pr_split_positive,
    thmacs_check,
)
from conegeo.unitarize import dist_to_fixed_cone

from conftest import D4_REFL, D4_ROT, seeds


def _projection(rng, n, k):
    u = rand_unitary(rng, n)
    return u[:, :k] @ u[:, :k].conj().T


def _pinching(seed, n):
    rng = make_rng(seed, "proj")
    return pinching_expectation(_projection(rng, n, int(rng.integers(1, n))))


def _average(seed, n):
    spec = {2: "quaternion", 3: "s3", 4: "dihedral:4*2"}.get(n, f"cyclic:{n}")
    u = rand_unitary(make_rng(seed, "frame"), n)
    return group_average_expectation(close_group(conjugate_generators(unitary_generators(spec), u)))


expectations = st.tuples(seeds, st.sampled_from([2, 3, 4, 5]), st.sampled_from(["pinching", "average"]))


def _expectation(seed, n, kind):
    return _pinching(seed, n) if kind == "pinching" else _average(seed, n)


def _split_ok(a, E, X, Y):
    eY = exp_herm(Y).mat
    rec = eY @ exp_herm(X).mat @ eY
    return np.linalg.norm(rec - a.mat) / np.linalg.norm(a.mat), np.linalg.norm(E(X))


# ---------------------------------------------------------------- expectations


def test_pinching_examples():
    E = pinching_expectation(np.eye(3))
    X = rand_herm(make_rng(0), 3)
    np.testing.assert_allclose(E(X), X)
    E = pinching_expectation(np.diag([1.0, 0.0]))
    np.testing.assert_allclose(E(np.array([[1.0, 2.0], [3.0, 4.0]])), np.diag([1.0, 4.0]))
    with pytest.raises(NotProjection):
        pinching_expectation(np.array([[1.0, 1.0], [0.0, 0.0]]))


def test_pinching_complement_norm_is_one():
    rng = make_rng(5)
    p = _projection(rng, 4, 2)
    E = pinching_expectation(p)
    ratios = []
    for _ in range(1000):
        X = rand_herm(rng, 4)
        ratios.append(herm_norm(E.complement(X)) / herm_norm(X))
    assert max(ratios) <= 1 + 1e-12
    # purely off-diagonal X attains the bound
    X = rand_herm(rng, 4)
    off = E.complement(X)
    assert herm_norm(E.complement(off)) == pytest.approx(herm_norm(off), rel=1e-12)
    lo, hi = complement_norm(E, samples=300)
    assert hi == 1.0 and lo == pytest.approx(1.0, abs=1e-9)


def test_group_average_examples():
    E = group_average_expectation(close_group([np.eye(3)]))
    X = rand_herm(make_rng(1), 3)
    np.testing.assert_allclose(E(X), X)
    E = group_average_expectation(close_group([D4_ROT, D4_REFL]))
    X = rand_herm(make_rng(2), 2)
    np.testing.assert_allclose(E(X), np.trace(X) / 2 * np.eye(2), atol=1e-14)
    with pytest.raises(NotUnitaryGroup):
        group_average_expectation(close_group(conjugate_generators([D4_ROT, D4_REFL], np.diag([2.0, 0.5]))))


@given(expectations)
def test_expectation_axioms(args):
    seed, n, kind = args
    E = _expectation(seed, n, kind)
    rng = make_rng(seed, "x")
    X = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    assert E.idempotence_residual(X) <= 1e-12
    np.testing.assert_allclose(E(np.eye(n)), np.eye(n), atol=1e-13)
    np.testing.assert_allclose(E(X.conj().T), E(X).conj().T, atol=1e-13)
    b1 = E(rng.normal(size=(n, n)))
    b2 = E(rng.normal(size=(n, n)))
    assert E.bimodule_residual(b1, X, b2) <= 1e-12 * (1 + np.linalg.norm(b1) * np.linalg.norm(b2)) * np.linalg.norm(X)
    # range and kernel are trace-orthogonal and together span the Hermitians
    R, K = E.range_basis, E.kernel_basis
    assert len(R) + len(K) == n * n
    assert np.max(np.abs(np.einsum("aij,bji->ab", R, K).real), initial=0.0) <= 1e-12
    if kind == "average":
        assert np.trace(E(X)) == pytest.approx(np.trace(X), abs=1e-12)
        assert subspace_distance(R, commutant_basis(E.data)) <= 1e-8


@settings(max_examples=10)
@given(seeds, st.sampled_from([3, 4]))
def test_complement_norm_interval(seed, n):
    E = _average(seed, n)
    lo, hi = complement_norm(E, samples=300, rng=make_rng(seed))
    assert 1 - 1e-9 <= lo <= hi == 2.0


# ---------------------------------------------------------------- splitting


def test_split_positive_examples():
    E = pinching_expectation(np.diag([1.0, 1.0, 0.0]))
    a = validate_posdef(np.block([[np.array([[2.0, 0.5], [0.5, 1.0]]), np.zeros((2, 1))],
                                  [np.zeros((1, 2)), np.array([[4.0]])]]))
    X, Y = pr_split_positive(a, E)
    np.testing.assert_allclose(Y, a.log() / 2, atol=1e-12)
    np.testing.assert_allclose(X, 0, atol=1e-12)
    K = E.complement(rand_herm(make_rng(3), 3, 0.5))
    X, Y = pr_split_positive(exp_herm(K), E)
    np.testing.assert_allclose(Y, 0, atol=1e-10)
    np.testing.assert_allclose(X, K, atol=1e-10)


@given(expectations)
def test_split_positive_residuals(args):
    seed, n, kind = args
    E = _expectation(seed, n, kind)
    a = rand_posdef(make_rng(seed, "a"), n, 0.8)
    X, Y = pr_split_positive(a, E)
    rec, ker = _split_ok(a, E, X, Y)
    assert rec <= 1e-8 and ker <= 1e-8
    assert E.in_range(Y) <= 1e-10


def test_split_invertible_examples():
    E = pinching_expectation(np.diag([1.0, 0.0, 0.0]))
    u = rand_unitary(make_rng(4), 3)
    sp = pr_split_invertible(u, E)
    np.testing.assert_allclose(sp.u, u, atol=1e-12)
    np.testing.assert_allclose(sp.Z, 0, atol=1e-12)
    np.testing.assert_allclose(sp.Y, 0, atol=1e-12)
    Y = E(rand_herm(make_rng(5), 3, 0.5))
    sp = pr_split_invertible(exp_herm(Y).mat, E)
    np.testing.assert_allclose(sp.u, np.eye(3), atol=1e-10)
    np.testing.assert_allclose(sp.Z, 0, atol=1e-10)


@given(expectations)
def test_split_invertible_residuals(args):
    seed, n, kind = args
    E = _expectation(seed, n, kind)
    g = rand_invertible(make_rng(seed, "g"), n, 0.6)
    sp = pr_split_invertible(g, E)
    assert np.linalg.norm(sp.u.conj().T @ sp.u - np.eye(n), 2) <= 1e-8
    assert np.linalg.norm(sp.reconstruct() - g) <= 1e-8 * np.linalg.norm(g)
    assert np.linalg.norm(E(sp.Z)) <= 1e-8


def test_split_hard_instance_converges():
    # an ill-conditioned input on which plain fixed-point iteration stalls
    rng = make_rng(17, "hard")
    p = _projection(rng, 6, 3)
    g = rand_invertible(rng, 6, 0.9)
    a = validate_posdef(g.conj().T @ g)
    E = pinching_expectation(p)
    X, Y = pr_split_positive(a, E)
    rec, ker = _split_ok(a, E, X, Y)
    assert rec <= 1e-8 and ker <= 1e-8


# ---------------------------------------------------------------- minimality


@given(seeds, st.sampled_from([2, 3, 4, 6]))
def test_minexp(seed, n):
    E = _pinching(seed, n)
    rng = make_rng(seed, "xy")
    Y = E(rand_herm(rng, n, 0.5))
    X = E.complement(rand_herm(rng, n, 0.5))
    assert abs(minexp_gap(X, Y)) <= 1e-8
    eY = exp_herm(Y).mat
    a = validate_posdef(eY @ exp_herm(X).mat @ eY)
    for _ in range(20):
        W = Y + E(rand_herm(rng, n, 0.3))
        assert dist(exp_herm(2 * W), a, OP) >= herm_norm(X) - 1e-8


@settings(max_examples=15)
@given(seeds, st.sampled_from(["s3", "dihedral:4", "quaternion", "dihedral:4*2"]))
def test_minprop_frobenius_projection(seed, spec):
    gens = unitary_generators(spec)
    n = gens[0].shape[0]
    E = group_average_expectation(close_group(gens))
    rng = make_rng(seed)
    Y = E(rand_herm(rng, n, 0.4))
    X = E.complement(rand_herm(rng, n, 0.4))
    eY = exp_herm(Y).mat
    a = validate_posdef(eY @ exp_herm(X).mat @ eY)
    w = dist_to_fixed_cone(a, fixed_cone(gens), FROB).witness
    np.testing.assert_allclose(w.mat, exp_herm(2 * Y).mat, atol=1e-5)


# ---------------------------------------------------------------- canonical unitarizer


def _z2_setup(seed, blocks):
    from scipy.linalg import block_diag

    rng = make_rng(seed, "z2")
    n = sum(blocks)
    p = block_diag(*(_projection(rng, b, int(rng.integers(1, b))) for b in blocks))
    q = 2 * p - np.eye(n)
    g = block_diag(*(rand_invertible(rng, b, 0.5) for b in blocks))
    return p, q, g


def test_canonical_unitarizer_examples():
    p, q, _ = _z2_setup(0, (3,))
    E = pinching_expectation(p)
    u = rand_unitary(make_rng(1), 3)
    np.testing.assert_allclose(canonical_unitarizer(u, [q], E).X0, 0, atol=1e-10)
    Y = E(rand_herm(make_rng(2), 3, 0.5))
    np.testing.assert_allclose(canonical_unitarizer(exp_herm(Y).mat, [q], E).X0, 0, atol=1e-10)
    with pytest.raises(RangeMismatch):
        canonical_unitarizer(u, [np.eye(3)], E)


@given(seeds, st.sampled_from([(2,), (3,), (2, 2), (2, 3), (3, 4)]))
def test_canonical_unitarizer_properties(seed, blocks):
    p, q, g = _z2_setup(seed, blocks)
    E = pinching_expectation(p)
    cu = canonical_unitarizer(g, [q], E)
    assert cu.unitarity <= 1e-7
    assert cu.kernel_residual <= 1e-8
    assert cu.rho_defect <= 1e-7
    Er = E.conjugated(cu.split.u)
    assert subspace_distance(Er.range_basis, commutant_basis(cu.rho)) <= 1e-8
    assert np.linalg.norm(Er(cu.X0)) <= 1e-8


def test_thmacs_examples():
    p = np.diag([1.0, 0.0])
    q = 2 * p - np.eye(2)
    E = pinching_expectation(p)
    rep = thmacs_check(rand_unitary(make_rng(3), 2), [q], E, (2,))
    assert rep.lhs == pytest.approx(1.0, abs=1e-9) and rep.rhs == pytest.approx(1.0, abs=1e-9)
    X = np.array([[0.0, 0.3 - 0.4j], [0.3 + 0.4j, 0.0]])   # pinching kernel, ||X|| = 0.5
    rep = thmacs_check(exp_herm(X).mat, [q], E, (2,))
    assert rep.lhs == pytest.approx(np.exp(2 * 0.5), rel=1e-10)
    assert rep.rhs == pytest.approx(rep.lhs, rel=1e-4)
    with pytest.raises(RangeMismatch):
        thmacs_check(np.array([[1.0, 0.2], [0.0, 1.0]]), [q], E, (1, 1))


@settings(max_examples=20)
@given(seeds, st.sampled_from([(2,), (3,), (2, 2), (2, 3), (3, 4), (2, 2, 2)]))
def test_thmacs_equality(seed, blocks):
    p, q, g = _z2_setup(seed, blocks)
    rep = thmacs_check(g, [q], pinching_expectation(p), blocks)
    assert abs(rep.ratio - 1) <= 1e-3
    assert rep.via_distance == pytest.approx(rep.rhs, rel=1e-5)
    assert rep.rhs_full == pytest.approx(rep.rhs, rel=1e-5)
