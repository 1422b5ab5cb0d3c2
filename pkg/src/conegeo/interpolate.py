"""Families of conjugated groups along geodesics of the cone.

For positive ``r2, s2`` and ``gamma_t`` the geodesic between them, the groups
``H_t = gamma_t^{-1/2} H gamma_t^{1/2}`` interpolate between ``r^{-1} H r``
and ``s^{-1} H s``.  Size and similarity number are log-convex in ``t``; when
``r2 = id`` and ``s2`` is a closest fixed point to the identity the similarity
number follows ``Sim(H)^{1-t}`` exactly.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .config import tol
from .geometry import OP, Geodesic, dist
from .matcore import PosDefMatrix, as_posdef
from .matgroups import (
    MatrixGroup,
    as_group,
    check_normal,
    close_group,
    conjugate_generators,
    fixed_cone,
    group_size_norm,
    orbit_diameter,
)
from .unitarize import dist_to_fixed_cone, similarity_number

__all__ = [
    "DEFAULT_GRID",
    "ExtensionReport",
    "FamilyPoint",
    "InterpolationReport",
    "conjugate_family",
    "extension_experiment",
    "verify_interpolation",
]

DEFAULT_GRID = tuple(np.round(np.linspace(0.0, 1.0, 11), 12))


@dataclass(frozen=True, eq=False)
class FamilyPoint:
    t: float
    gamma_t: PosDefMatrix
    group_t: MatrixGroup
    size_t: float
    sim_t: float
    order_ok: bool = True

    def to_json(self) -> dict:
        return {"t": self.t, "size": self.size_t, "sim": self.sim_t,
                "order": self.group_t.order, "order_ok": self.order_ok}


def conjugate_family(H, r2, s2, grid: Sequence[float] = DEFAULT_GRID) -> list[FamilyPoint]:
    """``H_t`` on a grid of ``t``; each group is re-closed from conjugated generators.

    A point whose order differs from ``|H|`` is flagged with ``order_ok=False``.
    """
    H = as_group(H)
    geo = Geodesic(r2, s2)
    out = []
    for t in grid:
        g = geo.eval(float(t))
        Ht = close_group(conjugate_generators(H.generators, g.sqrt().mat), cap=H.cap)
        rep = similarity_number(Ht)
        out.append(FamilyPoint(float(t), g, Ht, group_size_norm(Ht), rep.sim_value,
                               Ht.order == H.order))
    return out


@dataclass
class InterpolationReport:
    points: list
    size_margins: list          # |H_t| - |H_0|^{1-t} |H_1|^t
    sim_margins: list           # Sim(H_t) - Sim(H_0)^{1-t} Sim(H_1)^t
    equality_errors: list = field(default_factory=list)    # relative, minimizer branch
    corollary_margins: list = field(default_factory=list)  # |H_t| - |H|^{1-t}

    @property
    def worst_size(self) -> float:
        return max(self.size_margins)

    @property
    def worst_sim(self) -> float:
        return max(self.sim_margins)

    @property
    def worst_equality(self) -> float:
        return max(self.equality_errors, default=0.0)

    @property
    def all_orders_ok(self) -> bool:
        return all(p.order_ok for p in self.points)

    def to_json(self) -> dict:
        return {"points": [p.to_json() for p in self.points],
                "size_margins": self.size_margins, "sim_margins": self.sim_margins,
                "equality_errors": self.equality_errors,
                "corollary_margins": self.corollary_margins}


def verify_interpolation(H, r2, s2, grid: Sequence[float] = DEFAULT_GRID,
                         minimizer_branch: bool | None = None) -> InterpolationReport:
    """Size and similarity-number interpolation along the family.

    ``minimizer_branch`` says that ``r2 = id`` and ``s2`` is a closest fixed
    point to the identity, so the equality ``Sim(H_t) = Sim(H)^{1-t}`` and the
    size bound ``|H_t| <= |H|^{1-t}`` are also checked.  ``None`` detects it.
    """
    H = as_group(H)
    r2 = as_posdef(r2)
    s2 = as_posdef(s2)
    pts = conjugate_family(H, r2, s2, grid)
    p0 = conjugate_family(H, r2, s2, [0.0])[0] if pts[0].t != 0.0 else pts[0]
    p1 = conjugate_family(H, r2, s2, [1.0])[0] if pts[-1].t != 1.0 else pts[-1]
    size_m = [p.size_t - p0.size_t ** (1 - p.t) * p1.size_t ** p.t for p in pts]
    sim_m = [p.sim_t - p0.sim_t ** (1 - p.t) * p1.sim_t ** p.t for p in pts]
    rep = InterpolationReport(pts, size_m, sim_m)
    if minimizer_branch is None:
        eye = np.eye(H.dim)
        minimizer_branch = bool(np.allclose(r2.mat, eye, atol=1e-12)) and _is_closest(H, s2)
    if minimizer_branch:
        sim_h = similarity_number(H).sim_value
        size_h = group_size_norm(H)
        rep.equality_errors = [abs(p.sim_t / sim_h ** (1 - p.t) - 1.0) for p in pts]
        rep.corollary_margins = [p.size_t - size_h ** (1 - p.t) for p in pts]
    return rep


def _is_closest(H: MatrixGroup, s2: PosDefMatrix) -> bool:
    cone = fixed_cone(H.generators)
    if cone.fixed_residual(s2.mat) > tol().fix * max(1.0, s2.lam_max):
        return False
    d = dist_to_fixed_cone(np.eye(H.dim), cone, OP).value
    # distance is scale-sensitive; compare after symmetric rescale
    w = s2.evals
    return abs(0.5 * float(np.log(w[-1] / w[0])) - d) <= 1e-6


# -------------------------------------------------------------- extensions


@dataclass
class ExtensionReport:
    dist_sigma: float      # dist(id, P^Sigma) = d(id, a)
    dist_gamma: float      # dist(id, P^Gamma)
    d_id_b: float          # d(id, b), b the Gamma-average of the orbit of a
    d_a_b: float
    diam_gamma_a: float    # D_Gamma(a)
    diam_gamma_id: float   # D_Gamma(id)
    diam_sigma_id: float   # D_Sigma(id)
    margins: dict          # name -> rhs - lhs (non-negative when the step holds)

    @property
    def worst_margin(self) -> float:
        return min(self.margins.values())

    def holds(self, slack: float = 1e-6) -> bool:
        return self.worst_margin >= -slack

    def to_json(self) -> dict:
        d = dict(self.__dict__)
        d["worst_margin"] = self.worst_margin
        return d


def extension_experiment(sigma_gens, gamma_gens, conjugator=None) -> ExtensionReport:
    """Walk the inequality chain for a normal subgroup ``Sigma`` of ``Gamma``.

    Both groups are conjugated by ``conjugator`` first (``g -> c g c^{-1}``).
    With ``a`` a closest point of ``P^Sigma`` to the identity and ``b`` the
    ``Gamma``-average of the orbit of ``a`` (a ``Gamma``-fixed point):

    ``dist(id, P^Gamma) <= d(id, b) <= d(id, a) + d(a, b)``,
    ``d(a, b) <= D_Gamma(a) <= 2 d(id, a) + D_Gamma(id)`` and
    ``dist(id, P^Sigma) <= D_Sigma(id)`` (constants ``K = 1, alpha = 2``).
    """
    if conjugator is not None:
        C = np.asarray(conjugator, dtype=complex)
        Ci = np.linalg.inv(C)
        sigma_gens = conjugate_generators(sigma_gens, Ci)
        gamma_gens = conjugate_generators(gamma_gens, Ci)
    G = close_group(gamma_gens)
    S = close_group(sigma_gens)
    check_normal(S, G)
    n = G.dim
    eye = np.eye(n)
    res_s = dist_to_fixed_cone(eye, fixed_cone(S.generators), OP)
    a = res_s.witness
    A = a.mat
    b = sum(h @ A @ h.conj().T for h in G.elements) / G.order
    b = PosDefMatrix((b + b.conj().T) / 2)
    dist_gamma = dist_to_fixed_cone(eye, fixed_cone(G.generators), OP).value
    d_id_a = dist(eye, a, OP)
    d_id_b = dist(eye, b, OP)
    d_a_b = dist(a, b, OP)
    dga = orbit_diameter(G, a, OP)
    dgi = orbit_diameter(G, eye, OP)
    dsi = orbit_diameter(S, eye, OP)
    margins = {
        "dist_gamma<=d(id,b)": d_id_b - dist_gamma,
        "d(id,b)<=d(id,a)+d(a,b)": d_id_a + d_a_b - d_id_b,
        "d(a,b)<=D_gamma(a)": dga - d_a_b,
        "D_gamma(a)<=2d(id,a)+D_gamma(id)": 2 * d_id_a + dgi - dga,
        "dist_sigma<=D_sigma(id)": dsi - res_s.value,
        "D_sigma(id)<=D_gamma(id)": dgi - dsi,
    }
    return ExtensionReport(res_s.value, dist_gamma, d_id_b, d_a_b, dga, dgi, dsi, margins)
