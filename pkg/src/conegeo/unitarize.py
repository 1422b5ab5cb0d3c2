"""Unitarizers, circumcenters and the similarity number of a matrix group.

A positive ``s`` unitarizes ``H`` exactly when ``s^2`` is fixed by the
congruence action, so unitarizers are square roots of points of the fixed
cone ``P^H``.  The similarity number ``Sim(H) = inf ||s|| ||s^{-1}||`` is the
square root of the smallest condition number over ``P^H``; its logarithm is
the operator-norm distance from the identity to ``P^H``.

The minimal condition number over a linear slice of Hermitian matrices,
``min t  s.t.  I <= a <= t I,  a in span(basis)``, is solved with a
log-barrier Newton method (``method="barrier"``, the default).  A projected
subgradient scheme on ``log lam_max - log lam_min`` is kept as
``method="subgradient"``; it is simple but only reaches about 1e-3.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .config import tol
from .errors import EmptyInput, NotUnitarizable
from .geometry import FROB, OP, MetricKind, dist
from .matcore import PosDefMatrix, as_posdef, exp_herm, op_norm
from .matgroups import FixedCone, MatrixGroup, as_group, fixed_cone, orbit

__all__ = [
    "ConstantsReport",
    "DistResult",
    "SimReport",
    "Unitarizer",
    "average_unitarizer",
    "circumcenter",
    "circumcenter_farthest_step",
    "circumcenter_unitarizer",
    "circumradius",
    "constants_envelope",
    "dist_to_fixed_cone",
    "hs_bound",
    "orbit_average",
    "similarity_number",
    "symmetric_rescale",
    "unitarity_residual",
]


def symmetric_rescale(s) -> PosDefMatrix:
    """Scale ``s`` so that ``log lam_max = -log lam_min`` (``||s|| = ||s^{-1}||``)."""
    s = as_posdef(s)
    return s.scaled(1.0 / np.sqrt(s.lam_max * s.lam_min))


def unitarity_residual(s, generators) -> float:
    """``max_h ||(s^{-1} h s)(s^{-1} h s)* - id||`` over the generators."""
    S = np.asarray(s)
    Sinv = np.linalg.inv(S)
    eye = np.eye(S.shape[0])
    worst = 0.0
    for h in generators:
        u = Sinv @ h @ S
        worst = max(worst, op_norm(u @ u.conj().T - eye))
    return worst


@dataclass(frozen=True)
class Unitarizer:
    s: PosDefMatrix
    method: str
    residual: float

    @property
    def fixed_point(self) -> PosDefMatrix:
        return self.s.power(2.0)

    def condition(self) -> float:
        return self.s.cond()


def _finish(s, method, generators) -> Unitarizer:
    s = symmetric_rescale(s)
    return Unitarizer(s, method, unitarity_residual(s, generators))


def orbit_average(H, a=None) -> PosDefMatrix:
    """``|H|^{-1} sum_h h a h*`` (``a = id`` by default), a fixed point of ``H``."""
    H = as_group(H)
    A = np.eye(H.dim) if a is None else np.asarray(as_posdef(a))
    M = sum(h @ A @ h.conj().T for h in H.elements) / H.order
    return PosDefMatrix((M + M.conj().T) / 2)


def average_unitarizer(H) -> Unitarizer:
    """Square root of the group average ``|H|^{-1} sum_h h h*``, a fixed point."""
    H = as_group(H)
    return _finish(orbit_average(H).sqrt(), "average", H.generators)


# ---------------------------------------------------------------- circumcenter


def _meb_center(L: np.ndarray) -> np.ndarray:
    """Barycentric weights of the minimal enclosing ball center of points ``L``.

    ``L`` has shape ``(N, d)`` (real).  Solves the dual
    ``max_w  w.diag(G) - w.G.w`` over the simplex, then polishes on the active
    set where all active points are equidistant from the center.
    """
    from scipy.optimize import minimize

    N = len(L)
    if N == 1:
        return np.ones(1)
    G = L @ L.T
    g = np.diag(G)
    scale = max(float(np.max(g)), 1e-300)

    def f(w):
        return (w @ G @ w - w @ g) / scale, (2 * G @ w - g) / scale

    far = int(np.argmax(g))
    w0 = np.full(N, 0.5 / (N - 1))
    w0[far] = 0.5
    res = minimize(f, w0, jac=True, method="SLSQP", bounds=[(0, 1)] * N,
                   constraints=[{"type": "eq", "fun": lambda w: w.sum() - 1, "jac": lambda w: np.ones(N)}],
                   options={"ftol": 1e-16, "maxiter": 500})
    w = np.clip(res.x, 0, None)
    w /= w.sum()
    # polish: active points equidistant from c = sum w_i L_i
    act = np.flatnonzero(w > 1e-9)
    for _ in range(3):
        k = len(act)
        K = np.zeros((k + 1, k + 1))
        K[:k, :k] = 2 * G[np.ix_(act, act)]
        K[:k, k] = 1.0
        K[k, :k] = 1.0
        rhs = np.concatenate([g[act], [1.0]])
        sol = np.linalg.lstsq(K, rhs, rcond=None)[0]
        wa = sol[:k]
        if np.all(wa >= -1e-12):
            cand = np.zeros(N)
            cand[act] = np.clip(wa, 0, None)
            cand /= cand.sum()
            c = cand @ L
            r2 = np.max(np.sum((L - c) ** 2, axis=1))
            c_old = w @ L
            r2_old = np.max(np.sum((L - c_old) ** 2, axis=1))
            if r2 <= r2_old * (1 + 1e-12):
                w = cand
            break
        act = act[wa > 0]
    return w


def _herm_vec(X: np.ndarray) -> np.ndarray:
    return np.concatenate([X.real.ravel(), X.imag.ravel()])


def circumradius(c, points, m=FROB) -> float:
    return max(dist(c, p, m) for p in points)


def circumcenter(points: Sequence, max_iter: int = 500, xtol: float = 1e-13,
                 return_info: bool = False):
    """Circumcenter (minimax center) of finitely many points, Frobenius metric.

    At the current iterate ``x`` the points are pulled back to the tangent
    space by ``Log_x``; the Euclidean minimal enclosing ball of those vectors
    gives the step, and ``x`` moves along the corresponding geodesic (step
    halved until the radius does not grow).  The fixed point has 0 as the
    tangent-space center, which is the first-order optimality condition of the
    minimax problem on the CAT(0) cone.
    """
    pts = [as_posdef(p) for p in points]
    if not pts:
        raise EmptyInput("circumcenter of an empty set")
    if len(pts) == 1:
        return (pts[0], 0.0, 0) if return_info else pts[0]
    # start from the log-Euclidean mean
    x = exp_herm(sum(p.log() for p in pts) / len(pts))
    radius = circumradius(x, pts)
    it = 0
    for it in range(1, max_iter + 1):
        R = x.inv_sqrt().mat
        Ls = []
        for p in pts:
            Q = R @ p.mat @ R
            w, V = np.linalg.eigh((Q + Q.conj().T) / 2)
            Ls.append((V * np.log(w)) @ V.conj().T)
        wts = _meb_center(np.stack([_herm_vec(L) for L in Ls]))
        C = sum(wi * L for wi, L in zip(wts, Ls))
        C = (C + C.conj().T) / 2
        step_norm = np.linalg.norm(C)
        if step_norm <= xtol * (1 + radius):
            break
        S = x.sqrt().mat
        step = 1.0
        while True:
            cand = exp_herm(step * C)
            M = S @ cand.mat @ S
            xn = PosDefMatrix((M + M.conj().T) / 2)
            rn = circumradius(xn, pts)
            if rn <= radius * (1 + 1e-14) or step < 1e-6:
                break
            step /= 2
        if rn > radius * (1 + 1e-14):
            break
        x, radius = xn, rn
    return (x, radius, it) if return_info else x


def circumcenter_farthest_step(points: Sequence, iters: int = 2000, restarts: int = 5,
                               seed: int = 0) -> PosDefMatrix:
    """Minimax center by stepping toward the farthest point with ``eta_k = 1/(k+2)``.

    The classical scheme for Hadamard spaces; converges slowly (radius error
    roughly ``1/sqrt(k)``), kept as an independent reference.
    """
    from .geometry import Geodesic

    pts = [as_posdef(p) for p in points]
    if not pts:
        raise EmptyInput("circumcenter of an empty set")
    rng = np.random.default_rng(seed)
    best, best_r = None, np.inf
    for _ in range(restarts):
        x = pts[int(rng.integers(len(pts)))]
        for k in range(iters):
            ds = [dist(x, p, FROB) for p in pts]
            far = pts[int(np.argmax(ds))]
            x = Geodesic(x, far).eval(1.0 / (k + 2))
        r = circumradius(x, pts)
        if r < best_r:
            best, best_r = x, r
    return best


def circumcenter_unitarizer(H) -> Unitarizer:
    """Square root of the Frobenius circumcenter of the orbit of the identity."""
    H = as_group(H)
    c = circumcenter(orbit(H, np.eye(H.dim)))
    return _finish(c.sqrt(), "circumcenter", H.generators)


def hs_bound(H) -> dict:
    """Quantities of the Hilbert-Schmidt unitarizability bound for a finite group.

    ``C = max_h ||h h* - id||_F`` and ``D = sup |log x| / |x - 1|`` over
    ``[(C+1)^{-1}, C+1]`` (attained at the left end).  Every orbit point of the
    identity then satisfies ``||log(h h*)||_F^2 <= D^2 C^2``.
    """
    H = as_group(H)
    eye = np.eye(H.dim)
    C = max(float(np.linalg.norm(h @ h.conj().T - eye)) for h in H.elements)
    D = 1.0 if C == 0 else (C + 1) * np.log1p(C) / C
    sq = max(float(np.sum(np.log(np.linalg.eigvalsh(h @ h.conj().T)) ** 2)) for h in H.elements)
    return {"C": C, "D": float(D), "max_sq_log_norm": sq, "bound": float(D * D * C * C)}


# ---------------------------------------------------------- similarity number


def _feasible_point(cone: FixedCone, iters: int = 500, eta0: float = 0.1) -> np.ndarray:
    """Positive-definite point of the cone, by subgradient ascent of ``lam_min``
    on the trace-one slice.  Raises :class:`NotUnitarizable` if none is found."""
    Iv = cone.identity_component()
    tr = np.trace(Iv).real
    if tr <= 1e-12 * cone.dim:
        raise NotUnitarizable("the fixed cone contains no element of positive trace")
    a = Iv / tr
    ivn2 = np.linalg.norm(Iv) ** 2
    for k in range(iters):
        w, V = np.linalg.eigh(a)
        if w[0] > 1e-6 * w[-1]:
            return a
        v = V[:, :1]
        g = cone.project(v @ v.conj().T)
        g -= (np.vdot(Iv, g).real / ivn2) * Iv
        gn = np.linalg.norm(g)
        if gn < 1e-14:
            break
        a = a + (eta0 * np.linalg.norm(a) / np.sqrt(k + 1)) * g / gn
        a = cone.project(a)
        a /= np.trace(a).real
    w = np.linalg.eigvalsh(a)
    if w[0] > 0:
        return a
    raise NotUnitarizable(f"no positive-definite point found in the fixed cone (best lam_min {w[0]:.3e})")


def _barrier_min_cond(basis: np.ndarray, c0: np.ndarray, gap: float = 1e-10,
                      max_newton: int = 50):
    """Minimize ``t`` subject to ``I <= a(c) <= t I`` with ``a(c) = sum c_k B_k``.

    ``c0`` must give a positive-definite ``a``.  Log-barrier path following with
    damped Newton steps.  Returns ``(c, iterations, converged)``.
    """
    k, n = len(basis), basis.shape[1]
    m = 2 * n

    def amat(c):
        A = np.tensordot(c, basis, axes=1)
        return (A + A.conj().T) / 2

    w0 = np.linalg.eigvalsh(amat(c0))
    c = c0 * (2.0 / w0[0])
    t = 2.0 * w0[-1] / w0[0] * 1.5
    x = np.concatenate([c, [t]])

    def barrier(x):
        # the linear term tau*t is handled separately to keep differences accurate
        A = amat(x[:k])
        w = np.linalg.eigvalsh(A)
        if w[0] <= 1 or w[-1] >= x[k]:
            return np.inf
        return -np.sum(np.log(w - 1)) - np.sum(np.log(x[k] - w))

    tau = m / t
    total = 0
    converged = False
    for _outer in range(60):
        for _ in range(max_newton):
            total += 1
            A = amat(x[:k])
            w, V = np.linalg.eigh(A)
            t = x[k]
            d1 = 1.0 / (w - 1)
            d2 = 1.0 / (t - w)
            Bt = np.einsum("ai,kab,bj->kij", V.conj(), basis, V)
            diag = np.einsum("kii->ki", Bt).real
            grad = np.empty(k + 1)
            grad[:k] = -diag @ d1 + diag @ d2
            grad[k] = tau - d2.sum()
            W1 = (Bt * np.sqrt(np.outer(d1, d1))).reshape(k, -1)
            W2 = (Bt * np.sqrt(np.outer(d2, d2))).reshape(k, -1)
            Hs = np.empty((k + 1, k + 1))
            Hs[:k, :k] = (W1.conj() @ W1.T).real + (W2.conj() @ W2.T).real
            Hs[:k, k] = Hs[k, :k] = -diag @ (d2 * d2)
            Hs[k, k] = np.sum(d2 * d2)
            try:
                L = np.linalg.cholesky(Hs)
                dx = -np.linalg.solve(L.T, np.linalg.solve(L, grad))
            except np.linalg.LinAlgError:
                dx = -np.linalg.lstsq(Hs, grad, rcond=None)[0]
            dec = -grad @ dx
            if dec / 2 <= 1e-7:
                break
            f0 = barrier(x)
            s = 1.0
            while s > 1e-14:
                fn = barrier(x + s * dx) + tau * s * dx[k]
                if fn <= f0 - 0.25 * s * dec:
                    break
                s *= 0.5
            else:
                break
            x = x + s * dx
        if m / tau <= gap * x[k]:
            converged = True
            break
        tau *= 8.0
    return x[:k], total, converged


def _subgradient_min_cond(cone: FixedCone, a0: np.ndarray, eta0: float = 0.1,
                          max_iter: int = 20_000, patience: int = 50, tie: float = 1e-9):
    """Projected subgradient descent of ``log lam_max - log lam_min`` on the
    trace-one slice of the cone."""
    Iv = cone.identity_component()
    ivn2 = np.linalg.norm(Iv) ** 2

    def objective(a):
        w = np.linalg.eigvalsh(a)
        return np.inf if w[0] <= 0 else float(np.log(w[-1]) - np.log(w[0]))

    a = a0 / np.trace(a0).real
    best_a, best_f = a, objective(a)
    last_improve_f, stall = best_f, 0
    it = 0
    for it in range(max_iter):
        w, V = np.linalg.eigh(a)
        top = V[:, w >= w[-1] - tie * abs(w[-1])]
        bot = V[:, w <= w[0] + tie * abs(w[-1])]
        Pt = top @ top.conj().T / top.shape[1]
        Pb = bot @ bot.conj().T / bot.shape[1]
        g = cone.project(Pt / w[-1] - Pb / w[0])
        g -= (np.vdot(Iv, g).real / ivn2) * Iv
        gn = np.linalg.norm(g)
        if gn < 1e-15:
            break
        step = eta0 * np.linalg.norm(a) / np.sqrt(it + 1)
        cand = cone.project(a - step * g / gn)
        cand /= np.trace(cand).real
        f = objective(cand)
        if np.isfinite(f):
            a = cand
            if f < best_f:
                best_a, best_f = a, f
        if best_f < last_improve_f - 1e-10:
            last_improve_f, stall = best_f, 0
        else:
            stall += 1
            if stall >= patience and it > 10 * patience:
                break
    return best_a, it + 1


@dataclass(frozen=True)
class SimReport:
    sim_value: float
    minimizer: PosDefMatrix
    dist_to_fixed: float
    iterations: int
    converged: bool
    method: str = "barrier"
    cone_rank: int = 0

    def to_json(self) -> dict:
        return {"sim": self.sim_value, "dist": self.dist_to_fixed, "converged": self.converged,
                "iterations": self.iterations, "method": self.method, "cone_rank": self.cone_rank}


def _as_cone(H, blocks=None) -> FixedCone:
    if isinstance(H, FixedCone):
        return H
    if isinstance(H, MatrixGroup):
        return fixed_cone(H.generators, blocks)
    return fixed_cone(list(H), blocks)


def similarity_number(H, blocks: Sequence[int] | None = None, method: str = "barrier") -> SimReport:
    """Similarity number of a group given as a :class:`MatrixGroup`, a list of
    generators, or a precomputed :class:`FixedCone`.

    ``blocks`` restricts unitarizers to a block-diagonal algebra.
    """
    cone = _as_cone(H, blocks)
    a0 = _feasible_point(cone)
    if cone.rank == 1:
        a, iters, ok = cone.basis[0], 0, True
    elif method == "barrier":
        c, iters, ok = _barrier_min_cond(cone.basis, cone.coords(a0))
        a = cone.point(c)
    elif method == "subgradient":
        a, iters = _subgradient_min_cond(cone, a0)
        ok = True
    else:
        raise ValueError(f"unknown method {method!r}")
    a = PosDefMatrix((a + a.conj().T) / 2)
    if a.lam_min <= 0:
        a = PosDefMatrix(-a.mat)
    mini = symmetric_rescale(a)
    sim = float(np.sqrt(mini.cond()))
    d = dist(np.eye(cone.dim), mini, OP)
    return SimReport(sim, mini, d, iters, bool(ok), method, cone.rank)


# -------------------------------------------------------- distance to P^H


@dataclass(frozen=True)
class DistResult:
    value: float
    witness: PosDefMatrix
    iterations: int = 0


def _sdp_min_cond(basis: np.ndarray) -> np.ndarray:
    """``min t s.t. I <= a <= t I`` over ``span(basis)`` with cvxpy (Clarabel)."""
    import cvxpy as cp

    k, n = len(basis), basis.shape[1]
    real = np.stack([np.block([[B.real, -B.imag], [B.imag, B.real]]) for B in basis])
    c = cp.Variable(k)
    t = cp.Variable()
    A = sum(c[j] * real[j] for j in range(k))
    A = (A + A.T) / 2
    eye = np.eye(2 * n)
    prob = cp.Problem(cp.Minimize(t), [A - eye >> 0, t * eye - A >> 0])
    with warnings.catch_warnings():
        # tight tolerances often end in "optimal_inaccurate"; the caller checks the value
        warnings.simplefilter("ignore", UserWarning)
        try:
            prob.solve(solver=cp.CLARABEL, tol_gap_abs=1e-11, tol_gap_rel=1e-11, tol_feas=1e-11)
        except Exception:  # noqa: BLE001 - solver failures become NotUnitarizable
            prob.solve(solver=cp.SCS, eps=1e-10)
    if c.value is None or prob.status not in ("optimal", "optimal_inaccurate"):
        raise NotUnitarizable(f"SDP status {prob.status}")
    return np.asarray(c.value)


def _frob_project(b: PosDefMatrix, cone: FixedCone, a0: np.ndarray, max_iter: int = 1000,
                  xtol: float = 1e-13):
    """Closest point of ``P^H`` to ``b`` in the Frobenius metric.

    Riemannian Gauss-Newton: at ``x`` the tangent vector ``Log_x b`` (in the
    frame ``x^{-1/2} . x^{-1/2}``) is projected orthogonally onto the tangent
    space of the totally geodesic submanifold, and ``x`` moves along it.
    """
    x = PosDefMatrix(a0)
    best = dist(b, x, FROB)
    it = 0
    for it in range(1, max_iter + 1):
        R = x.inv_sqrt().mat
        S = x.sqrt().mat
        T = np.stack([R @ B @ R for B in cone.basis])
        Tv = np.stack([_herm_vec(Bt) for Bt in T], axis=1)
        Q, sv, _ = np.linalg.svd(Tv, full_matrices=False)
        Q = Q[:, sv > 1e-12 * sv[0]]
        Mb = R @ b.mat @ R
        w, V = np.linalg.eigh((Mb + Mb.conj().T) / 2)
        L = (V * np.log(w)) @ V.conj().T
        p = Q @ (Q.T @ _herm_vec(L))
        half = p.size // 2
        P = (p[:half] + 1j * p[half:]).reshape(L.shape)
        P = (P + P.conj().T) / 2
        if np.linalg.norm(P) <= xtol * (1 + best):
            break
        step = 1.0
        while True:
            E = exp_herm(step * P).mat
            M = cone.project(S @ E @ S)
            xn = PosDefMatrix((M + M.conj().T) / 2)
            dn = dist(b, xn, FROB)
            if dn <= best * (1 + 1e-14) or step < 1e-8:
                break
            step /= 2
        if dn > best * (1 + 1e-14):
            break
        x, best = xn, dn
    return x, best, it


def dist_to_fixed_cone(b, cone: FixedCone, m=OP, solver: str = "barrier") -> DistResult:
    """Distance from ``b`` to ``P^H`` and a closest point.

    ``b`` is first moved to the identity by ``c -> b^{-1/2} c b^{-1/2}``.  In
    the operator-norm metric the distance from the identity to a cone point is
    minimized after symmetric rescaling, leaving a minimal-condition-number
    problem; ``solver`` is ``"barrier"`` (same optimizer as
    :func:`similarity_number`) or ``"sdp"`` (cvxpy).  In the Frobenius metric a
    Riemannian projection is used.
    """
    m = MetricKind.parse(m)
    b = as_posdef(b)
    a0 = _feasible_point(cone)
    if m is FROB:
        x, value, it = _frob_project(b, cone, a0)
        return DistResult(value, x, it)
    R = b.inv_sqrt().mat
    Bt = np.stack([R @ B @ R for B in cone.basis])
    Bt = (Bt + np.conj(np.transpose(Bt, (0, 2, 1)))) / 2
    it = 0
    if cone.rank == 1:
        c = np.ones(1)
    elif solver == "sdp":
        c = _sdp_min_cond(Bt)
    elif solver == "barrier":
        c, it, _ = _barrier_min_cond(Bt, cone.coords(a0))
    else:
        raise ValueError(f"unknown solver {solver!r}")
    At = np.tensordot(c, Bt, axes=1)
    At = PosDefMatrix((At + At.conj().T) / 2)
    if At.lam_min <= 0:
        At = PosDefMatrix(-At.mat)
    At = symmetric_rescale(At)
    S = b.sqrt().mat
    W = S @ At.mat @ S
    witness = PosDefMatrix((W + W.conj().T) / 2)
    return DistResult(dist(b, witness, OP), witness, it)


# ------------------------------------------------------------- constants


@dataclass(frozen=True)
class ConstantsReport:
    """Envelope ``log Sim <= log K + alpha log|H|`` over a sweep of groups."""

    K: float
    alpha: float
    pairs: list = field(default_factory=list)
    worst_margin: float = 0.0
    alpha_at_K1: float = 0.0

    def holds(self, slack: float = 1e-8) -> bool:
        return self.worst_margin <= slack


def constants_envelope(pairs, alpha: float = 2.0, K: float = 1.0) -> ConstantsReport:
    """Check ``(K, alpha)`` against ``(log|H|, log Sim)`` pairs.

    ``worst_margin`` is ``max(log Sim - log K - alpha log|H|)``; ``alpha_at_K1``
    is the smallest exponent that works with ``K = 1``.
    """
    pairs = [(float(a), float(b)) for a, b in pairs]
    margins = [ls - np.log(K) - alpha * lh for lh, ls in pairs]
    ratios = [ls / lh for lh, ls in pairs if lh > 1e-12]
    return ConstantsReport(K, alpha, pairs, max(margins, default=0.0), max(ratios, default=0.0))
