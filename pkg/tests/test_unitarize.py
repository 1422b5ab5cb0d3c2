import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conegeo.errors import EmptyInput
from conegeo.geometry import FROB, OP, Geodesic, act, dist
from conegeo.harness.catalog import CATALOG, gen_bounded_rep, unitary_generators
from conegeo.harness.rng import make_rng, posdef_with_cond, rand_herm
from conegeo.matcore import exp_herm, validate_posdef
from conegeo.matgroups import (
    close_group,
    commutant_basis,
    conjugate_generators,
    direct_sum_generators,
    fixed_cone,
    group_size_norm,
    orbit,
    orbit_diameter,
)
from conegeo.unitarize import (
    average_unitarizer,
    circumcenter,
    circumcenter_farthest_step,
    circumcenter_unitarizer,
    circumradius,
    constants_envelope,
    dist_to_fixed_cone,
    hs_bound,
    orbit_average,
    similarity_number,
    symmetric_rescale,
    unitarity_residual,
)

from conftest import D4_REFL, D4_ROT, posdef, seeds

S = np.diag([2.0, 0.5])
D4 = [D4_ROT, D4_REFL]
D4_BOUNDED = conjugate_generators(D4, np.linalg.inv(S))   # s U s^{-1}


def _bounded_group(seed, spec, cond):
    rep, _ = gen_bounded_rep(spec, cond, seed=seed)
    return rep.image_group()


# ---------------------------------------------------------------- rescale


def test_symmetric_rescale_examples():
    np.testing.assert_allclose(symmetric_rescale(np.diag([4.0, 1.0])).mat, np.diag([2, 0.5]))
    np.testing.assert_allclose(symmetric_rescale(np.eye(3)).mat, np.eye(3))


@given(seeds, st.sampled_from([2, 3, 5]))
def test_symmetric_rescale_properties(seed, n):
    s = posdef(seed, n, 1.0)
    r = symmetric_rescale(s)
    assert np.log(r.lam_max) == pytest.approx(-np.log(r.lam_min), abs=1e-10)
    assert r.cond() == pytest.approx(s.cond(), rel=1e-12)


# ---------------------------------------------------------------- averaging


def test_average_unitarizer_examples():
    np.testing.assert_allclose(average_unitarizer(close_group(D4)).s.mat, np.eye(2), atol=1e-14)
    np.testing.assert_allclose(average_unitarizer(close_group([-np.eye(2)])).s.mat, np.eye(2), atol=1e-14)
    u = average_unitarizer(close_group(D4_BOUNDED))
    assert u.residual <= 1e-9


@given(seeds, st.sampled_from(CATALOG), st.floats(1.0, 6.0))
def test_average_unitarizer_bounds(seed, spec, cond):
    H = _bounded_group(seed, spec, cond)
    size = group_size_norm(H)
    a = orbit_average(H)
    assert a.lam_min >= size ** -2 * (1 - 1e-10) and a.lam_max <= size ** 2 * (1 + 1e-10)
    for h in H.generators:
        assert np.linalg.norm(h @ a.mat @ h.conj().T - a.mat) <= 1e-8 * a.lam_max
    u = average_unitarizer(H)
    assert u.residual <= 1e-7
    assert u.s.lam_min >= 1 / size * (1 - 1e-10) and u.s.lam_max <= size * (1 + 1e-10)


# ---------------------------------------------------------------- circumcenter


def test_circumcenter_examples():
    a, b = posdef(1, 3, label="a"), posdef(1, 3, label="b")
    np.testing.assert_allclose(circumcenter([a]).mat, a.mat)
    c = circumcenter([a, b])
    np.testing.assert_allclose(c.mat, Geodesic(a, b)(0.5).mat, atol=1e-8)
    assert circumradius(c, [a, b]) == pytest.approx(dist(a, b, FROB) / 2, abs=1e-8)
    c = circumcenter([np.diag([4.0, 1.0]), np.diag([1.0, 4.0])])
    np.testing.assert_allclose(c.mat, 2 * np.eye(2), atol=1e-8)
    with pytest.raises(EmptyInput):
        circumcenter([])


@settings(max_examples=10)
@given(seeds)
def test_circumcenter_beats_farthest_step_reference(seed):
    pts = [posdef(seed, 3, label=k) for k in range(5)]
    c = circumcenter(pts)
    ref = circumcenter_farthest_step(pts, iters=400, restarts=2, seed=seed)
    assert circumradius(c, pts) <= circumradius(ref, pts) + 1e-6


@given(seeds, st.sampled_from(CATALOG[:7]), st.floats(1.0, 6.0))
def test_circumcenter_of_orbit_is_fixed(seed, spec, cond):
    H = _bounded_group(seed, spec, cond)
    a = posdef(seed, H.dim)
    c = circumcenter(orbit(H, a))
    for h in H.elements:
        assert np.linalg.norm(act(h, c).mat - c.mat) <= 1e-5 * c.lam_max


def test_circumcenter_unitarizer_examples():
    np.testing.assert_allclose(circumcenter_unitarizer(close_group(D4)).s.mat, np.eye(2), atol=1e-12)
    assert circumcenter_unitarizer(close_group(D4_BOUNDED)).residual <= 1e-7


@given(seeds, st.sampled_from(CATALOG), st.floats(1.0, 6.0))
def test_circumcenter_unitarizer_and_hs_bound(seed, spec, cond):
    H = _bounded_group(seed, spec, cond)
    assert circumcenter_unitarizer(H).residual <= 1e-7
    hb = hs_bound(H)
    assert hb["max_sq_log_norm"] <= hb["bound"] + 1e-10


@given(seeds, st.sampled_from(["dihedral:4", "quaternion", "s3", "dihedral:5:1,2"]))
def test_leaf_circumcenter(seed, spec):
    gens = unitary_generators(spec)
    n = gens[0].shape[0]
    M = commutant_basis(gens)
    rng = make_rng(seed)
    c = rng.normal(size=len(M)) * 0.4
    Y = np.tensordot(c, M, axes=1)
    X = rand_herm(rng, n, 0.4)
    X = X - np.tensordot(np.einsum("kij,ji->k", M, X).real, M, axes=1)  # trace-orthogonal to M
    eY = exp_herm(Y).mat
    p = validate_posdef(eY @ exp_herm(X).mat @ eY)
    cc = circumcenter(orbit(close_group(gens), p))
    np.testing.assert_allclose(cc.mat, exp_herm(2 * Y).mat, atol=1e-5)


# ---------------------------------------------------------------- similarity number


def test_sim_examples():
    rep = similarity_number(close_group(D4))
    assert rep.sim_value == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(rep.minimizer.mat, np.eye(2), atol=1e-12)
    rep = similarity_number(D4_BOUNDED)
    assert rep.sim_value == pytest.approx(4.0, rel=1e-4)
    assert rep.cone_rank == 1


def _grid_sim(s, blocks_proj):
    """Brute-force oracle: a = s (sum x_k P_k) s over a log grid of block scalars."""
    def conds(X):
        A = np.einsum("ij,...jk,kl->...il", s, X, s)
        w = np.linalg.eigvalsh(A)
        return w[..., -1] / w[..., 0]

    P = np.stack(blocks_proj)
    best, centre, width = np.inf, np.zeros(len(P) - 1), 3.0
    for step in (1e-1, 1e-2, 1e-3):
        axes = [np.arange(c - width, c + width + step / 2, step) for c in centre]
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(axes))
        x = np.concatenate([np.ones((len(mesh), 1)), np.exp(mesh)], axis=1)
        X = np.einsum("mk,kij->mij", x, P)
        cs = conds(X)
        k = int(np.argmin(cs))
        best, centre, width = cs[k], mesh[k], 10 * step
    return float(np.sqrt(best))


@pytest.mark.parametrize("seed", range(6))
def test_sim_reducible_grid_oracle(seed):
    # D4 (2-dim) + sign character + trivial: three inequivalent irreducibles,
    # so the fixed cone is s (x1 P1 + x2 P2 + x3 P3) s, rank 3
    gens = direct_sum_generators(D4, [-np.eye(1), np.eye(1)], [np.eye(1), np.eye(1)])
    s = posdef_with_cond(make_rng(seed, "s"), 4, 1.0 + seed).mat
    H = conjugate_generators(gens, np.linalg.inv(s))
    P = [np.diag([1.0, 1, 0, 0]), np.diag([0.0, 0, 1, 0]), np.diag([0.0, 0, 0, 1])]
    rep = similarity_number(H)
    assert rep.cone_rank == 3
    oracle = _grid_sim(s, P)
    assert rep.sim_value <= oracle * (1 + 1e-9)
    assert rep.sim_value == pytest.approx(oracle, rel=1e-3)
    assert rep.sim_value <= np.linalg.cond(s) * (1 + 1e-9)


@settings(max_examples=15)
@given(seeds, st.sampled_from(CATALOG[:8]), st.floats(1.0, 6.0))
def test_sim_solvers_agree(seed, spec, cond):
    H = _bounded_group(seed, spec, cond)
    a = similarity_number(H)
    b = similarity_number(H, method="subgradient")
    assert b.sim_value >= a.sim_value * (1 - 1e-9)
    assert b.sim_value == pytest.approx(a.sim_value, rel=5e-3)
    assert unitarity_residual(a.minimizer.sqrt(), H.generators) <= 1e-7


# ---------------------------------------------------------------- distance to P^H


def test_dist_to_fixed_cone_examples():
    cone = fixed_cone(D4_BOUNDED)
    r = dist_to_fixed_cone(np.eye(2), cone, OP)
    assert r.value == pytest.approx(np.log(4), rel=1e-10)
    s2 = validate_posdef(S @ S)
    assert dist_to_fixed_cone(s2, cone, OP).value <= 1e-10
    assert dist_to_fixed_cone(s2, cone, FROB).value <= 1e-10
    # infimum bound against arbitrary cone samples
    for alpha in (0.1, 1.0, 7.0):
        assert r.value <= dist(np.eye(2), alpha * s2.mat) + 1e-12


@given(seeds, st.sampled_from(CATALOG), st.floats(1.0, 6.0))
def test_distdiam(seed, spec, cond):
    H = _bounded_group(seed, spec, cond)
    cone = fixed_cone(H.generators)
    rep = similarity_number(cone)
    sdp = dist_to_fixed_cone(np.eye(H.dim), cone, OP, solver="sdp")
    assert abs(np.log(rep.sim_value) - sdp.value) <= 1e-5
    assert abs(np.log(rep.sim_value) - rep.dist_to_fixed) <= 1e-10
    size = group_size_norm(H)
    assert orbit_diameter(H, np.eye(H.dim)) == pytest.approx(2 * np.log(size), abs=1e-8)
    assert orbit_diameter(H, np.eye(H.dim), pairwise=True) == pytest.approx(2 * np.log(size), abs=1e-8)
    # |H| <= Sim(H)
    assert np.log(size) <= rep.dist_to_fixed + 1e-8
    # the whole orbit of id is as far from P^H as id itself
    far = max(dist_to_fixed_cone(p, cone, OP).value for p in orbit(H, np.eye(H.dim)))
    assert far == pytest.approx(rep.dist_to_fixed, abs=1e-6)


@given(seeds, st.sampled_from(CATALOG[:7]), st.floats(1.0, 6.0))
def test_amenable_bound(seed, spec, cond):
    H = _bounded_group(seed, spec, cond)
    a = posdef(seed, H.dim, 0.5)
    cone = fixed_cone(H.generators)
    assert dist_to_fixed_cone(a, cone, OP).value <= orbit_diameter(H, a) + 1e-8


@given(seeds, st.sampled_from(CATALOG[:7]), st.floats(1.0, 6.0))
def test_dist_to_fixed_cone_lipschitz(seed, spec, cond):
    H = _bounded_group(seed, spec, cond)
    cone = fixed_cone(H.generators)
    a, b = posdef(seed, H.dim, label="a"), posdef(seed, H.dim, label="b")
    da = dist_to_fixed_cone(a, cone).value
    db = dist_to_fixed_cone(b, cone).value
    assert abs(da - db) <= dist(a, b) + 1e-8


def test_block_sim_is_max_of_blocks():
    s1 = posdef_with_cond(make_rng(1), 2, 3.0).mat
    s2 = posdef_with_cond(make_rng(2), 2, 5.0).mat
    H1 = conjugate_generators(D4, np.linalg.inv(s1))
    H2 = conjugate_generators(unitary_generators("quaternion"), np.linalg.inv(s2))
    k1, k2 = len(H1), len(H2)
    gens = direct_sum_generators(H1 + [np.eye(2)] * k2, [np.eye(2)] * k1 + H2)
    both = similarity_number(gens, blocks=(2, 2)).sim_value
    assert both == pytest.approx(max(similarity_number(H1).sim_value, similarity_number(H2).sim_value), rel=1e-5)


def test_constants_envelope():
    rep = constants_envelope([(0.5, 0.6), (0.2, 0.1), (0.0, 0.0)])
    assert rep.holds()
    assert rep.alpha_at_K1 == pytest.approx(1.2)
    assert not constants_envelope([(0.1, 0.5)]).holds()
