"""The registered verification checks.

A check yields one record per random instance.  Each record carries the raw
``value`` (a residual or a gap) and a ``margin`` that is non-negative exactly
when the instance passes: ``bound - value`` for upper bounds, ``value - bound``
for lower bounds.  Exploratory checks log values and never fail.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import block_diag

from ..geometry import FROB, OP, Geodesic, act, banach_mazur_delta, dist, emi_residual, segal_residual
from ..interpolate import extension_experiment, verify_interpolation
from ..matcore import PosDefMatrix, exp_herm, from_coords, hermitian_basis, op_norm
from ..matgroups import (
    close_group,
    commutant_basis,
    conjugate_generators,
    fixed_cone,
    group_size_norm,
    orbit,
    orbit_diameter,
    subspace_distance,
)
from ..splitexp import (
    canonical_unitarizer,
    group_average_expectation,
    minexp_gap,
    pinching_expectation,
    pr_split_invertible,
    pr_split_positive,
    thmacs_check,
)
from ..unitarize import (
    average_unitarizer,
    circumcenter,
    circumcenter_unitarizer,
    dist_to_fixed_cone,
    hs_bound,
    orbit_average,
    similarity_number,
)
from .catalog import gen_bounded_rep, unitary_generators
from .rng import make_rng, posdef_with_cond, rand_herm, rand_invertible, rand_posdef, rand_unitary

__all__ = ["CHECKS", "Check", "check"]


@dataclass(frozen=True)
class Check:
    id: str
    suite: str
    anchor: str
    fn: Callable
    exploratory: bool = False


CHECKS: list[Check] = []


def check(suite: str, cid: str, anchor: str, exploratory: bool = False):
    def deco(fn):
        CHECKS.append(Check(cid, suite, anchor, fn, exploratory))
        return fn
    return deco


def upper(value, bound, **extra) -> dict:
    return {"value": float(value), "margin": float(bound - value), **extra}


def lower(value, bound, **extra) -> dict:
    return {"value": float(value), "margin": float(value - bound), **extra}


def _rel(A, B) -> float:
    A, B = np.asarray(A), np.asarray(B)
    return float(np.linalg.norm(A - B) / max(np.linalg.norm(B), 1e-300))


def _instances(cfg, cid, count):
    """Per-instance generators keyed by (run seed, check id, instance index)."""
    for i in range(count):
        yield i, make_rng(cfg.seed, cid, i)


def _dim_instances(cfg, cid):
    for n in cfg.dims:
        for i in range(cfg.scaled(cfg.trials)):
            yield n, i, make_rng(cfg.seed, cid, n, i)


def _group(cfg, rng):
    """A random conjugated catalog group: (spec, MatrixGroup, s)."""
    spec = cfg.catalog[int(rng.integers(len(cfg.catalog)))]
    cond = float(rng.uniform(1.0, cfg.cond_max))
    rep, s = gen_bounded_rep(spec, cond, seed=int(rng.integers(2**62)))
    return spec, close_group(rep.generators), s


def _sorted_gaps(pts, ref):
    """For each point the Frobenius distance to the nearest reference point."""
    R = np.stack([np.asarray(q) for q in ref])
    out = []
    for p in pts:
        P = np.asarray(p)
        out.append(min(np.linalg.norm(R - P, axis=(1, 2))) / max(np.linalg.norm(P), 1.0))
    return max(out)


def _pd(rng, n):
    """Random positive matrix with log-spectrum of order one in every dimension."""
    return rand_posdef(rng, n, 1 / np.sqrt(n))


def _second_diffs(vals):
    v = np.asarray(vals)
    return v[2:] - 2 * v[1:-1] + v[:-2]


# =================================================================== geometry


@check("geometry", "geo.geodesic_endpoints", "geodesic formula")
def _geodesic_endpoints(cfg):
    for n, i, rng in _dim_instances(cfg, "geo.geodesic_endpoints"):
        a, b = _pd(rng, n), _pd(rng, n)
        g = Geodesic(a, b)
        r = max(_rel(g.formula(0.0), a), _rel(g.formula(1.0), b))
        yield upper(r, 1e-9, dim=n, instance=i)


@check("geometry", "geo.geodesic_proportional", "geodesic formula: distance along the geodesic")
def _geodesic_prop(cfg):
    for n, i, rng in _dim_instances(cfg, "geo.geodesic_proportional"):
        a, b = _pd(rng, n), _pd(rng, n)
        g = Geodesic(a, b)
        s, t = rng.uniform(0.0, 1.0, 2)
        gs, gt = g.eval(s), g.eval(t)
        worst = 0.0
        for m in (OP, FROB):
            d = dist(a, b, m)
            worst = max(worst, abs(dist(gs, gt, m) - abs(t - s) * d) / max(1.0, d))
        yield upper(worst, 1e-9, dim=n, instance=i)


@check("geometry", "geo.action_isometry", "the congruence action is isometric")
def _isometry(cfg):
    for n, i, rng in _dim_instances(cfg, "geo.action_isometry"):
        a, b = _pd(rng, n), _pd(rng, n)
        g = rand_invertible(rng, n)
        worst = 0.0
        for m in (OP, FROB):
            d = dist(a, b, m)
            worst = max(worst, abs(dist(act(g, a), act(g, b), m) - d) / max(1.0, d))
        yield upper(worst, 1e-9, dim=n, instance=i)


@check("geometry", "geo.action_law", "the congruence action is isometric: group action law")
def _action_law(cfg):
    for n, i, rng in _dim_instances(cfg, "geo.action_law"):
        a = _pd(rng, n)
        g, h = rand_invertible(rng, n), rand_invertible(rng, n)
        yield upper(_rel(act(g, act(h, a)), act(g @ h, a)), 1e-9, dim=n, instance=i)


@check("geometry", "ineq.segal", "Segal's inequality")
def _segal(cfg):
    count = cfg.scaled(cfg.trials)
    for i, rng in _instances(cfg, "ineq.segal", count):
        n = cfg.dims[i % len(cfg.dims)]
        X, Y = rand_herm(rng, n, 1 / np.sqrt(n)), rand_herm(rng, n, 1 / np.sqrt(n))
        yield lower(segal_residual(X, Y), -1e-10, dim=n, instance=i)


@check("geometry", "ineq.emi", "exponential metric increasing property")
def _emi(cfg):
    count = cfg.scaled(cfg.trials)
    for i, rng in _instances(cfg, "ineq.emi", count):
        n = cfg.dims[i % len(cfg.dims)]
        a = rand_posdef(rng, n, 0.5 / np.sqrt(n))
        X, Y = rand_herm(rng, n, 1 / np.sqrt(n)), rand_herm(rng, n, 1 / np.sqrt(n))
        yield lower(emi_residual(a, X, Y), -1e-10, dim=n, instance=i)


@check("geometry", "ineq.joint_convexity", "convexity of the distance along geodesics")
def _joint_convexity(cfg):
    ts = np.linspace(0, 1, 11)
    count = cfg.scaled(cfg.trials)
    for i, rng in _instances(cfg, "ineq.joint_convexity", count):
        n = cfg.dims[i % len(cfg.dims)]
        al = Geodesic(_pd(rng, n), _pd(rng, n))
        be = Geodesic(_pd(rng, n), _pd(rng, n))
        worst_chord, worst_sd = np.inf, np.inf
        for m in (OP, FROB):
            f = np.array([dist(al.eval(t), be.eval(t), m) for t in ts])
            chord = ts * f[-1] + (1 - ts) * f[0] + 1e-9 - f
            worst_chord = min(worst_chord, chord.min())
            worst_sd = min(worst_sd, _second_diffs(f).min())
        yield {"value": float(worst_sd), "margin": float(min(worst_chord, worst_sd + 1e-8)),
               "dim": n, "instance": i}


@check("geometry", "geo.cat0_midpoint", "Hilbert-Schmidt metric is CAT(0)")
def _cat0(cfg):
    count = cfg.scaled(cfg.trials)
    for i, rng in _instances(cfg, "geo.cat0_midpoint", count):
        n = cfg.dims[i % len(cfg.dims)]
        a, b, x = _pd(rng, n), _pd(rng, n), _pd(rng, n)
        mid = Geodesic(a, b).eval(0.5)
        rhs = 0.5 * dist(x, a, FROB) ** 2 + 0.5 * dist(x, b, FROB) ** 2 - 0.25 * dist(a, b, FROB) ** 2
        yield upper(dist(x, mid, FROB) ** 2, rhs + 1e-8, dim=n, instance=i)


@check("geometry", "geo.banach_mazur", "distance as Banach-Mazur distance of Hilbertian norms")
def _banach_mazur(cfg):
    """Both norm conventions against their exact closed forms, plus commuting pairs.

    ``||x||_a = ||a x||``: delta = d(a^2, b^2)/2.  ``||x||_a = <a x, x>^{1/2}``:
    delta = d(a, b)/2.  Only on commuting pairs does the first equal d(a, b).
    """
    count = cfg.scaled(cfg.pairs)
    for i, rng in _instances(cfg, "geo.banach_mazur", count):
        n = cfg.dims[i % len(cfg.dims)]
        a, b = _pd(rng, n), _pd(rng, n)
        sq = banach_mazur_delta(a, b, "square")
        lin = banach_mazur_delta(a, b, "linear")
        r1 = abs(sq - 0.5 * dist(a.power(2), b.power(2), OP))
        r2 = abs(lin - 0.5 * dist(a, b, OP))
        U = rand_unitary(rng, n)
        ca = PosDefMatrix.from_spectrum(a.evals, U)
        cb = PosDefMatrix.from_spectrum(b.evals, U)
        r3 = abs(banach_mazur_delta(ca, cb, "square") - dist(ca, cb, OP))
        yield upper(max(r1, r2, r3), 1e-8, dim=n, instance=i,
                    square_minus_d=float(sq - dist(a, b, OP)))


# ===================================================================== groups


@check("groups", "groups.closure", "finite groups: closure and homomorphism table")
def _closure(cfg):
    for i, rng in _instances(cfg, "groups.closure", cfg.scaled(cfg.groups)):
        spec = cfg.catalog[int(rng.integers(len(cfg.catalog)))]
        rep, _ = gen_bounded_rep(spec, float(rng.uniform(1, cfg.cond_max)), int(rng.integers(2**62)))
        ref = close_group(unitary_generators(spec)).order
        ok = rep.order == ref
        yield upper(rep.homomorphism_residual() if ok else np.inf, 1e-8, spec=spec, instance=i)


@check("groups", "groups.translation", "translation of orbits and fixed sets")
def _translation(cfg):
    for i, rng in _instances(cfg, "groups.translation", cfg.scaled(cfg.groups)):
        spec, H, _ = _group(cfg, rng)
        n = H.dim
        f = rand_invertible(rng, n, 0.3)
        fi = np.linalg.inv(f)
        a = rand_posdef(rng, n)
        moved = [act(fi, p) for p in orbit(H, a)]
        Hf = close_group(conjugate_generators(H.generators, f))
        other = orbit(Hf, act(fi, a))
        r_orbit = max(_sorted_gaps(moved, other), _sorted_gaps(other, moved))
        cone = fixed_cone(H.generators)
        moved_basis = np.stack([fi @ B @ fi.conj().T for B in cone.basis])
        r_cone = subspace_distance(moved_basis, fixed_cone(Hf.generators).basis)
        yield upper(max(r_orbit, r_cone), 1e-8, spec=spec, instance=i)


def _fixed_points(H, rng, k=2):
    """Random points of P^H: group averages of random positive matrices."""
    return [orbit_average(H, rand_posdef(rng, H.dim, 0.7)) for _ in range(k)]


@check("groups", "groups.totally_geodesic", "fixed sets are totally geodesic")
def _totally_geodesic(cfg):
    ts = np.linspace(-0.5, 1.5, 9)
    for i, rng in _instances(cfg, "groups.totally_geodesic", cfg.scaled(cfg.groups)):
        spec, H, _ = _group(cfg, rng)
        cone = fixed_cone(H.generators)
        a, b = _fixed_points(H, rng)
        g = Geodesic(a, b)
        worst = 0.0
        for t in ts:
            p = g.eval(float(t))
            worst = max(worst, cone.span_residual(p.mat), cone.fixed_residual(p.mat) / max(1.0, p.lam_max))
        yield upper(worst, 1e-8, spec=spec, instance=i)


@check("groups", "groups.orbit_diameter", "orbit diameter is invariant, geodesically convex and 2-Lipschitz")
def _dh(cfg):
    ts = np.linspace(0, 1, 11)
    for i, rng in _instances(cfg, "groups.orbit_diameter", cfg.scaled(cfg.groups)):
        spec, H, _ = _group(cfg, rng)
        n = H.dim
        a, b = rand_posdef(rng, n), rand_posdef(rng, n)
        Da, Db = orbit_diameter(H, a), orbit_diameter(H, b)
        lip = 2 * dist(a, b) + 1e-9 - abs(Da - Db)
        h = H.elements[int(rng.integers(H.order))]
        inv = 1e-9 - abs(orbit_diameter(H, act(h, a)) - Da)
        g = Geodesic(a, b)
        prof = [orbit_diameter(H, g.eval(float(t))) for t in ts]
        sd = _second_diffs(prof).min()
        yield {"value": float(sd), "margin": float(min(lip, inv, sd + 1e-8)), "spec": spec, "instance": i}


@check("groups", "groups.dist_to_fixed", "distance to a convex set is geodesically convex and 1-Lipschitz")
def _dist_fixed(cfg):
    ts = np.linspace(0, 1, 11)
    for i, rng in _instances(cfg, "groups.dist_to_fixed", cfg.scaled(cfg.groups // 2)):
        spec, H, _ = _group(cfg, rng)
        cone = fixed_cone(H.generators)
        n = H.dim
        a, b = rand_posdef(rng, n), rand_posdef(rng, n)
        g = Geodesic(a, b)
        prof = [dist_to_fixed_cone(g.eval(float(t)), cone, OP).value for t in ts]
        lip = dist(a, b) + 1e-8 - abs(prof[-1] - prof[0])
        sd = _second_diffs(prof).min()
        yield {"value": float(sd), "margin": float(min(lip, sd + 1e-8)), "spec": spec, "instance": i}


# ================================================================== unitarize


@check("unitarize", "unit.distdiam", "log Sim(H) = dist(id, P^H) and diam of the identity orbit = 2 log|H|")
def _distdiam(cfg):
    for i, rng in _instances(cfg, "unit.distdiam", cfg.scaled(cfg.groups)):
        spec, H, _ = _group(cfg, rng)
        rep = similarity_number(H)
        cone = fixed_cone(H.generators)
        d_sdp = dist_to_fixed_cone(np.eye(H.dim), cone, OP, solver="sdp").value
        r1 = abs(np.log(rep.sim_value) - d_sdp)
        r2 = abs(orbit_diameter(H, np.eye(H.dim), OP, pairwise=True) - 2 * np.log(group_size_norm(H)))
        # distance of the whole identity orbit equals that of the identity
        d_orb = min(dist_to_fixed_cone(p, cone, OP).value for p in orbit(H, np.eye(H.dim)))
        r3 = abs(d_orb - rep.dist_to_fixed)
        yield {"value": float(r1), "margin": float(min(1e-5 - r1, 1e-8 - r2, 1e-6 - r3)),
               "spec": spec, "instance": i, "diam_residual": float(r2), "orbit_residual": float(r3),
               "log_size": float(np.log(group_size_norm(H))), "log_sim": float(np.log(rep.sim_value))}


@check("unitarize", "unit.closed_form", "similarity number of an irreducible conjugate: cond(s)")
def _closed_form(cfg):
    s = np.diag([2.0, 0.5]).astype(complex)
    for spec in ("dihedral:3", "dihedral:4", "dihedral:5", "quaternion") if cfg.trials > 0 else ():
        rep, _ = gen_bounded_rep(spec, 4.0, s=s)
        sim = similarity_number(rep.generators).sim_value
        d = dist_to_fixed_cone(np.eye(2), fixed_cone(rep.generators), OP).value
        r = max(abs(sim / 4 - 1), abs(d - np.log(4)) / np.log(4))
        yield upper(r, 1e-4, spec=spec)


@check("unitarize", "unit.size_le_sim", "|H| <= Sim(H)")
def _size_le_sim(cfg):
    for i, rng in _instances(cfg, "unit.size_le_sim", cfg.scaled(cfg.groups)):
        spec, H, _ = _group(cfg, rng)
        rep = similarity_number(H)
        yield upper(orbit_diameter(H, np.eye(H.dim)), 2 * rep.dist_to_fixed + 1e-8, spec=spec, instance=i)


@check("unitarize", "unit.unitarizers", "fixed points give unitarizers; averaging and circumcenter")
def _unitarizers(cfg):
    for i, rng in _instances(cfg, "unit.unitarizers", cfg.scaled(cfg.groups)):
        spec, H, _ = _group(cfg, rng)
        size = group_size_norm(H)
        avg = average_unitarizer(H)
        cc = circumcenter_unitarizer(H)
        r = max(avg.residual, cc.residual)
        s_raw = orbit_average(H).sqrt()
        box = max(s_raw.lam_max - size, 1 / size - s_raw.lam_min)  # <= 0 inside the box
        a = rand_posdef(rng, H.dim)
        c = circumcenter(orbit(H, a))
        fix = max(_rel(act(h, c), c) for h in H.generators)
        hs = hs_bound(H)
        yield {"value": float(r),
               "margin": float(min(1e-7 - r, 1e-12 - box, 1e-5 - fix, hs["bound"] - hs["max_sq_log_norm"] + 1e-9)),
               "spec": spec, "instance": i, "cc_fixed": float(fix), "box": float(box)}


@check("unitarize", "unit.leaf_circumcenter", "circumcenter of an orbit in a normal leaf")
def _leaf(cfg):
    for i, rng in _instances(cfg, "unit.leaf_circumcenter", cfg.scaled(cfg.groups // 2)):
        spec = cfg.catalog[int(rng.integers(len(cfg.catalog)))]
        U = rand_unitary(rng, unitary_generators(spec)[0].shape[0])
        gens = [U @ g @ U.conj().T for g in unitary_generators(spec)]
        H = close_group(gens)
        n = H.dim
        M = commutant_basis(H)
        W = rand_herm(rng, n, 0.5)
        cY = np.einsum("kij,ji->k", M, W).real
        Y = from_coords(cY, M)
        Xf = rand_herm(rng, n, 0.5)
        X = Xf - from_coords(np.einsum("kij,ji->k", M, Xf).real, M)
        eY = exp_herm(Y).mat
        a = PosDefMatrix(eY @ exp_herm(X).mat @ eY)
        c = circumcenter(orbit(H, a))
        r = dist(c, exp_herm(2 * Y), FROB)
        yield upper(r, 1e-5, spec=spec, instance=i)


@check("unitarize", "unit.block_sim", "similarity number over the diagonal subalgebra")
def _block_sim(cfg):
    specs = ("dihedral:3", "dihedral:4", "quaternion", "cyclic:3")
    for i, rng in _instances(cfg, "unit.block_sim", cfg.scaled(cfg.groups // 5)):
        s1, s2 = (specs[int(k)] for k in rng.integers(len(specs), size=2))
        r1, _ = gen_bounded_rep(s1, float(rng.uniform(1, cfg.cond_max)), int(rng.integers(2**62)))
        r2, _ = gen_bounded_rep(s2, float(rng.uniform(1, cfg.cond_max)), int(rng.integers(2**62)))
        n1, n2 = r1.dim, r2.dim
        gens = ([block_diag(g, np.eye(n2)) for g in r1.generators]
                + [block_diag(np.eye(n1), h) for h in r2.generators])
        want = max(similarity_number(r1.generators).sim_value, similarity_number(r2.generators).sim_value)
        blk = similarity_number(gens, blocks=(n1, n2)).sim_value
        full = similarity_number(gens).sim_value
        r = max(abs(blk - want), abs(full - want)) / want
        yield upper(r, 1e-5, specs=f"{s1}+{s2}", instance=i)


@check("unitarize", "amenable.dist_le_diam", "dist(a, P^H) <= D_H(a) for amenable groups")
def _amenable(cfg):
    for i, rng in _instances(cfg, "amenable.dist_le_diam", cfg.scaled(cfg.pairs)):
        spec, H, _ = _group(cfg, rng)
        a = rand_posdef(rng, H.dim)
        d = dist_to_fixed_cone(a, fixed_cone(H.generators), OP).value
        yield upper(d, orbit_diameter(H, a) + 1e-8, spec=spec, instance=i)


@check("unitarize", "amenable.envelope", "Sim <= K |H|^alpha with (K, alpha) = (1, 2)")
def _envelope(cfg):
    for i, rng in _instances(cfg, "amenable.envelope", cfg.scaled(cfg.groups)):
        spec, H, _ = _group(cfg, rng)
        ls = float(np.log(similarity_number(H).sim_value))
        lh = float(np.log(group_size_norm(H)))
        yield upper(ls, 2 * lh + 1e-8, spec=spec, instance=i, log_size=lh, log_sim=ls)


# ====================================================================== split


def _projection(rng, n, blocks=None):
    """A random orthogonal projection, block diagonal if ``blocks`` is given."""
    parts = []
    for b in (blocks or (n,)):
        k = int(rng.integers(1, b)) if b > 1 else int(rng.integers(0, 2))
        U = rand_unitary(rng, b)
        parts.append(U[:, :k] @ U[:, :k].conj().T)
    return block_diag(*parts).astype(complex)


def _expectation(rng, n, kind):
    if kind == "pinching":
        return pinching_expectation(_projection(rng, n))
    # a reducible unitary group of dimension n, randomly rotated
    gens = unitary_generators({3: "s3", 4: "dihedral:4*2"}.get(n, f"cyclic:{n}"))
    U = rand_unitary(rng, n)
    return group_average_expectation(close_group([U @ g @ U.conj().T for g in gens]))


def _range_element(E, rng):
    c = rng.standard_normal(len(E.range_basis)) + 1j * rng.standard_normal(len(E.range_basis))
    return np.tensordot(c, E.range_basis, axes=1)


@check("split", "split.expectation_axioms", "conditional expectations: idempotent, bimodule, trace compatible")
def _axioms(cfg):
    for i, rng in _instances(cfg, "split.expectation_axioms", cfg.scaled(cfg.pairs // 2)):
        n = int(rng.integers(2, 6))
        kind = ("pinching", "average")[i % 2]
        E = _expectation(rng, n, kind)
        X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        b1, b2 = _range_element(E, rng), _range_element(E, rng)
        sc = np.linalg.norm(X) * max(1.0, np.linalg.norm(b1) * np.linalg.norm(b2))
        r = max(E.idempotence_residual(X) / np.linalg.norm(X),
                _rel(E(np.eye(n)), np.eye(n)),
                E.bimodule_residual(b1, X, b2) / sc,
                np.linalg.norm(E(X.conj().T) - E(X).conj().T) / np.linalg.norm(X),
                abs(np.trace(E(X)) - np.trace(X)) / np.linalg.norm(X) if kind == "average" else 0.0)
        R, K = E.range_basis, E.kernel_basis
        ortho = abs(np.einsum("aij,bji->ab", R, K).real).max() if len(K) and len(R) else 0.0
        r = max(r, ortho, float(len(R) + len(K) != n * n))
        yield upper(r, 1e-9, kind=kind, dim=n, instance=i)


@check("split", "split.positive", "Porta-Recht splitting of positive elements")
def _split_positive(cfg):
    for i, rng in _instances(cfg, "split.positive", cfg.scaled(cfg.pairs)):
        n = int(rng.integers(2, 7))
        kind = ("pinching", "average")[i % 2]
        E = _expectation(rng, n, kind)
        a = rand_posdef(rng, n, 0.6)
        X, Y = pr_split_positive(a, E)
        eY = exp_herm(Y).mat
        r = max(_rel(eY @ exp_herm(X).mat @ eY, a.mat), np.linalg.norm(E(X)),
                np.linalg.norm(E(Y) - Y))
        yield upper(r, 1e-8, kind=kind, dim=n, instance=i)


@check("split", "split.invertible", "Porta-Recht splitting of invertible elements")
def _split_invertible(cfg):
    for i, rng in _instances(cfg, "split.invertible", cfg.scaled(cfg.pairs)):
        n = int(rng.integers(2, 7))
        kind = ("pinching", "average")[i % 2]
        E = _expectation(rng, n, kind)
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        sp = pr_split_invertible(g, E)
        r = max(op_norm(sp.u.conj().T @ sp.u - np.eye(n)), _rel(sp.reconstruct(), g),
                np.linalg.norm(E(sp.Z)))
        yield upper(r, 1e-8, kind=kind, dim=n, instance=i)


@check("split", "split.minexp", "closest point of the range leaf when ||I - E|| = 1")
def _minexp(cfg):
    for i, rng in _instances(cfg, "split.minexp", cfg.scaled(cfg.pairs)):
        n = int(rng.integers(2, 7))
        E = _expectation(rng, n, "pinching")
        Y = E(rand_herm(rng, n, 0.5))
        Xf = rand_herm(rng, n, 0.5)
        X = Xf - E(Xf)
        gap = abs(minexp_gap(X, Y))
        eY = exp_herm(Y).mat
        a = PosDefMatrix(eY @ exp_herm(X).mat @ eY)
        nX = float(np.max(np.abs(np.linalg.eigvalsh(X))))
        closest = min(dist(exp_herm(2 * Y + E(rand_herm(rng, n, 0.3))), a) for _ in range(20))
        yield {"value": float(gap), "margin": float(min(1e-8 - gap, closest - nX + 1e-8)),
               "dim": n, "instance": i}


@check("split", "split.minprop", "Frobenius closest point of exp(M) is e^{2Y}")
def _minprop(cfg):
    for i, rng in _instances(cfg, "split.minprop", cfg.scaled(cfg.pairs // 10)):
        n = int(rng.integers(2, 5))
        E = _expectation(rng, n, "average")
        H = E.data
        Y = E(rand_herm(rng, n, 0.5))
        Xf = rand_herm(rng, n, 0.5)
        X = Xf - E(Xf)
        eY = exp_herm(Y).mat
        a = PosDefMatrix(eY @ exp_herm(X).mat @ eY)
        w = dist_to_fixed_cone(a, fixed_cone(H.generators), FROB).witness
        yield upper(dist(w, exp_herm(2 * Y), FROB), 1e-5, dim=n, instance=i)


def _thmacs_instance(rng):
    nb = int(rng.integers(1, 4))
    blocks = tuple(int(b) for b in rng.integers(2, 5, size=nb))
    n = sum(blocks)
    p = _projection(rng, n, blocks)
    q = 2 * p - np.eye(n)
    g = block_diag(*(rand_invertible(rng, b, 0.5) for b in blocks))
    return blocks, p, q, g


@check("split", "split.canonical_unitarizer", "canonical unitarizer from the splitting")
def _canonical(cfg):
    for i, rng in _instances(cfg, "split.canonical_unitarizer", cfg.scaled(cfg.pairs // 4)):
        blocks, p, q, g = _thmacs_instance(rng)
        E = pinching_expectation(p)
        cu = canonical_unitarizer(g, [q], E)
        u = cu.split.u
        Er = E.conjugated(u)
        rng_gap = subspace_distance(Er.range_basis, commutant_basis(cu.rho))
        r = max(cu.unitarity, cu.kernel_residual, cu.rho_defect)
        yield {"value": float(r), "margin": float(min(1e-7 - r, 1e-8 - rng_gap)), "instance": i}


@check("split", "split.thmacs", "||e^{X0}|| ||e^{-X0}|| = ||pi_1||_cb when ||I - E|| = 1")
def _thmacs(cfg):
    for i, rng in _instances(cfg, "split.thmacs", cfg.scaled(cfg.thmacs)):
        blocks, p, q, g = _thmacs_instance(rng)
        rep = thmacs_check(g, [q], pinching_expectation(p), blocks)
        r = max(abs(rep.ratio - 1), abs(rep.via_distance / rep.rhs - 1), abs(rep.rhs_full / rep.rhs - 1))
        yield upper(r, 1e-3, blocks=list(blocks), instance=i, lhs=rep.lhs, rhs=rep.rhs)


@check("split", "split.thmacs_explore", "open question: group-average expectations", exploratory=True)
def _thmacs_explore(cfg):
    for i, rng in _instances(cfg, "split.thmacs_explore", cfg.scaled(cfg.thmacs // 2)):
        n = int(rng.integers(3, 5))
        E = _expectation(rng, n, "average")
        g = rand_invertible(rng, n, 0.5)
        rep = thmacs_check(g, E.data, E, (n,), full=False, norm_samples=300)
        yield {"value": float(rep.ratio - 1), "margin": None, "instance": i,
               "complement_norm": list(rep.complement_norm), "lhs": rep.lhs, "rhs": rep.rhs,
               "candidate": bool(rep.complement_norm[0] > 1 + 1e-9 and rep.ratio > 1 + 1e-6)}


# ================================================================ interpolate


@check("interpolate", "interp.geomint", "interpolation of size and similarity number along geodesics")
def _geomint(cfg):
    grid = np.linspace(0, 1, cfg.grid)
    for i, rng in _instances(cfg, "interp.geomint", cfg.scaled(cfg.groups)):
        spec, H, _ = _group(cfg, rng)
        r2, s2 = rand_posdef(rng, H.dim, 0.5), rand_posdef(rng, H.dim, 0.5)
        rep = verify_interpolation(H, r2, s2, grid, minimizer_branch=False)
        worst = max(rep.worst_size, rep.worst_sim)
        yield {"value": float(worst), "margin": float(1e-6 - worst if rep.all_orders_ok else -np.inf),
               "spec": spec, "instance": i}


@check("interpolate", "interp.equality", "Sim(H_t) = Sim(H)^{1-t} along the minimizing geodesic")
def _equality(cfg):
    grid = np.linspace(0, 1, cfg.grid)
    for i, rng in _instances(cfg, "interp.equality", cfg.scaled(cfg.groups)):
        spec, H, _ = _group(cfg, rng)
        s2 = similarity_number(H).minimizer
        rep = verify_interpolation(H, np.eye(H.dim), s2, grid, minimizer_branch=True)
        cor = max(rep.corollary_margins)
        yield {"value": float(rep.worst_equality),
               "margin": float(min(1e-4 - rep.worst_equality, 1e-8 - cor, 1e-6 - rep.worst_sim)),
               "spec": spec, "instance": i}


EXTENSIONS = (
    ("dihedral:4", [0]),     # rotations in D4
    ("dihedral:3", [0]),     # rotations in D3
    ("quaternion", [0]),     # <i> in Q8
    ("dihedral:4", [0, 1], "square"),  # Klein-type subgroup {r^2, f}
)


@check("interpolate", "interp.extension", "extensions by amenable groups: constants (K^3, 3 alpha + 2)")
def _extension(cfg):
    for i, rng in _instances(cfg, "interp.extension", cfg.scaled(cfg.groups // 2)):
        case = EXTENSIONS[i % len(EXTENSIONS)]
        gens = unitary_generators(case[0])
        sub = [gens[k] for k in case[1]]
        if len(case) > 2:
            sub = [gens[0] @ gens[0], gens[1]]
        C = posdef_with_cond(rng, gens[0].shape[0], float(rng.uniform(1, cfg.cond_max))).mat
        rep = extension_experiment(sub, gens, C)
        yield lower(rep.worst_margin, -1e-6, case=case[0], instance=i)
