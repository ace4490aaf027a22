"""Volume of truncated cones, its minimization over fibers, and what follows:
the duality map sending a functional to its unit-slice centroid, the radial
characteristic surface, and spherical centers.

Everything is evaluated in chart coordinates.  For a functional with raw
coefficient vector v, the solid between the apex and the slice {<v,.> = 1}
has volume (n+1)^{-1} * integral of <v, lift(x)>^{-(n+1)} over the chart
region; the gradient and Hessian reduce to exact slice moments:

    grad W(v)  = -(n+1) V(v) mu(slice)
    hess W(v)  =  (n+1)(n+2) V(v) E[x x^T over slice]

Polytope and radial-graph cones use exact simplex decompositions; ellipsoid
cones use exact conic sections.  A fixed-seed Monte-Carlo estimator is kept
as an independent cross-check.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space

from .config import DEFAULT_SEED, TOL
from .domain import (
    ConvexCone,
    ConvexDomain,
    _ball_volume,
    _homogeneous_quadric,
    simplex_second_moment,
)
from .errors import (
    ConvergenceFailureError,
    InvalidInputError,
    OutsideDualConeError,
)
from .projgeom import DualFunctional, ProjPoint, ProjTransform, minimal_rotation


@dataclass
class VolumeResult:
    value: float
    estimator: str  # "exact" | "quadrature"
    error_bound: float


@dataclass
class FiberMinimum:
    phi: np.ndarray       # raw coefficient vector, phi(q) = 1
    value: float          # minimal truncated-cone volume on the fiber
    centroid: np.ndarray  # centroid of the unit slice (equals q at optimum)
    residual: float       # tangential gradient fraction at the solution
    iterations: int


def _raw_coeffs(phi):
    if isinstance(phi, DualFunctional):
        return phi.coeffs.copy()
    v = np.atleast_1d(np.asarray(phi, dtype=float))
    if not np.all(np.isfinite(v)):
        raise InvalidInputError("non-finite functional coefficients")
    return v


def _as_cone(c):
    if isinstance(c, ConvexDomain):
        return c.cone()
    return c


def _require_dual(cone: ConvexCone, v):
    m = cone.dual_margin(v)
    if m <= 0:
        raise OutsideDualConeError(
            "functional is not strictly positive on the closed cone",
            margin=m)
    return m


class _SliceData:
    """Volume of the truncated cone plus exact moments of the unit slice."""

    __slots__ = ("volume", "slice_area", "centroid", "second_moment")

    def __init__(self, volume, slice_area, centroid, second_moment):
        self.volume = volume
        self.slice_area = slice_area
        self.centroid = centroid
        self.second_moment = second_moment


def _slice_exact(cone: ConvexCone, v) -> _SliceData:
    dom = cone.domain
    n = dom.dim
    tri = dom.backend.chart_triangulation()
    if tri is not None:
        pts, simps = tri
        lifts = dom.chart.lift_many(pts)
        g = lifts @ v
        if np.min(g) <= 0:
            raise OutsideDualConeError(
                "functional vanishes on the cone closure",
                witness=pts[int(np.argmin(g))])
        roofs = lifts / g[:, None]
        rv = roofs[simps]                       # (k, n+1, n+1)
        vol = float(np.abs(np.linalg.det(rv)).sum()) / _fact(n + 1)
        e = rv[:, 1:, :] - rv[:, :1, :]         # (k, n, n+1)
        gram = np.einsum("kij,klj->kil", e, e)
        areas = np.sqrt(np.maximum(np.linalg.det(gram), 0.0)) / _fact(n)
        cents = rv.mean(axis=1)
        s = rv.sum(axis=1)
        seconds = (np.einsum("kiv,kiw->kvw", rv, rv)
                   + np.einsum("kv,kw->kvw", s, s)) / ((n + 1) * (n + 2))
        a_tot = float(areas.sum())
        mu = (areas[:, None] * cents).sum(axis=0) / a_tot
        e2 = (areas[:, None, None] * seconds).sum(axis=0) / a_tot
        return _SliceData(vol, a_tot, mu, e2)
    # ellipsoid cone: exact conic section via the inverse quadric.
    # The section center is the pole of the slicing plane; the restricted
    # inverse form is Qinv minus its rank-one part along the pole.
    qinv, qdet = _cone_quadric_inverse(cone)
    u = qinv @ v
    s = float(v @ u)           # negative iff v is interior to the dual cone
    if s >= 0:
        raise OutsideDualConeError("slice of the cone is unbounded", pairing=s)
    mu = u / s
    c0 = -1.0 / s              # section level, positive
    vv = float(v @ v)
    det_restricted = qdet * s / vv   # det of the form on the plane directions
    if det_restricted <= 0:
        raise OutsideDualConeError("slice of the cone is degenerate")
    area = _ball_volume(n) * c0 ** (n / 2.0) / np.sqrt(det_restricted)
    e2 = np.outer(mu, mu) + c0 / (n + 2.0) * (qinv - np.outer(u, u) / s)
    h = 1.0 / np.sqrt(vv)
    return _SliceData(area * h / (n + 1.0), area, mu, e2)


def _cone_quadric(cone: ConvexCone):
    q = getattr(cone, "_quadric", None)
    if q is None:
        dom = cone.domain
        q = _homogeneous_quadric(dom.backend, dom.chart)
        p_int = dom.chart.lift(dom.backend.interior_point())
        if p_int @ q @ p_int > 0:
            q = -q
        cone._quadric = q
    return q


def _cone_quadric_inverse(cone: ConvexCone):
    cached = getattr(cone, "_quadric_inverse", None)
    if cached is None:
        q = _cone_quadric(cone)
        cached = (np.linalg.inv(q), float(np.linalg.det(q)))
        cone._quadric_inverse = cached
    return cached


def _fact(n):
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


# ---------------------------------------------------------------------------
# public operations


def volume_functional(c, phi) -> VolumeResult:
    """Volume of the cone truncated by the unit level of the functional."""
    cone = _as_cone(c)
    v = _raw_coeffs(phi)
    _require_dual(cone, v)
    data = _slice_exact(cone, v)
    return VolumeResult(data.volume, "exact", 0.0)


def volume_functional_quadrature(c, phi, samples=20000, seed=None) -> VolumeResult:
    """Fixed-seed Monte-Carlo estimate with a standard-error bound.

    Independent of the exact path; used as a cross-check oracle.
    """
    cone = _as_cone(c)
    v = _raw_coeffs(phi)
    _require_dual(cone, v)
    dom = cone.domain
    n = dom.dim
    rng = np.random.default_rng(DEFAULT_SEED if seed is None else seed)
    vol_chart = dom.backend.moments()[0]
    xs = dom.random_interior(rng, size=samples)
    g = dom.chart.lift_many(xs) @ v
    vals = g ** (-(n + 1.0))
    est = vol_chart / (n + 1.0) * float(vals.mean())
    stderr = vol_chart / (n + 1.0) * float(vals.std(ddof=1)) / np.sqrt(samples)
    return VolumeResult(est, "quadrature", stderr)


def grad_volume(c, phi):
    """Gradient of the truncated-cone volume with respect to raw coefficients."""
    cone = _as_cone(c)
    v = _raw_coeffs(phi)
    _require_dual(cone, v)
    data = _slice_exact(cone, v)
    n = cone.domain.dim
    return -(n + 1.0) * data.volume * data.centroid


def slice_centroid(c, phi):
    """Centroid of the flat slice where the functional equals one."""
    cone = _as_cone(c)
    v = _raw_coeffs(phi)
    _require_dual(cone, v)
    return _slice_exact(cone, v).centroid


def min_volume_on_fiber(c, q, max_iter=80) -> FiberMinimum:
    """Minimize the truncated volume over functionals with phi(q) = 1.

    Damped Newton with exact gradient and Hessian; the objective is smooth
    and strictly convex on the open fiber and blows up at its frontier.
    Certifies that the optimal slice centroid reproduces q.
    """
    cone = _as_cone(c)
    q = np.atleast_1d(np.asarray(q, dtype=float))
    if isinstance(c, ConvexDomain) or True:
        if cone.contains_vector(q) <= 0:
            raise InvalidInputError("base point is not strictly inside the cone")
    n1 = q.size
    n = n1 - 1
    v_inf = cone.domain.chart.infinity
    v = v_inf / float(v_inf @ q)
    t_basis = null_space(q[None, :])

    def full(vv):
        d = _slice_exact(cone, vv)
        grad = -(n + 1.0) * d.volume * d.centroid
        hess = (n + 1.0) * (n + 2.0) * d.volume * d.second_moment
        return d, grad, hess

    data, grad, hess = full(v)
    it = 0
    for it in range(1, max_iter + 1):
        g_red = t_basis.T @ grad
        g_scale = (n + 1.0) * data.volume * np.linalg.norm(data.centroid)
        if np.linalg.norm(g_red) <= TOL.fiber_gradient * g_scale:
            break
        h_red = t_basis.T @ hess @ t_basis
        try:
            step = np.linalg.solve(h_red, -g_red)
        except np.linalg.LinAlgError:
            step = -g_red / max(np.linalg.norm(g_red), 1e-300)
        direction = t_basis @ step
        s = 1.0
        slope = float(g_red @ step)
        accepted = False
        while s > 1e-14:
            v_try = v + s * direction
            if cone.dual_margin(v_try) > 0:
                try:
                    d_try = _slice_exact(cone, v_try)
                except OutsideDualConeError:
                    d_try = None
                if d_try is not None and \
                        d_try.volume <= data.volume + 0.25 * s * slope:
                    v = v_try
                    data = d_try
                    grad = -(n + 1.0) * data.volume * data.centroid
                    hess = (n + 1.0) * (n + 2.0) * data.volume * data.second_moment
                    accepted = True
                    break
            s *= 0.5
        if not accepted:
            break
    g_red = t_basis.T @ grad
    g_scale = (n + 1.0) * data.volume * np.linalg.norm(data.centroid)
    residual = float(np.linalg.norm(g_red) / max(g_scale, 1e-300))
    cert = np.linalg.norm(data.centroid - q) / max(np.linalg.norm(q), 1e-300)
    if residual > 1e-8 or cert > 1e-6:
        raise ConvergenceFailureError(
            "fiber minimization did not converge",
            residual=residual, centroid_error=cert, iterations=it)
    return FiberMinimum(v, data.volume, data.centroid, residual, it)


def theta(c, phi) -> ProjPoint:
    """Projectivized centroid of the unit slice of a dual-cone functional."""
    mu = slice_centroid(c, phi)
    return ProjPoint(mu, canonicalize=False)


def theta_inverse(c, p) -> np.ndarray:
    """Raw functional with unit minimal fiber volume whose slice centroid lifts p."""
    cone = _as_cone(c)
    if isinstance(p, ProjPoint):
        q = p.coords.copy()
        if cone.domain.chart.height(q) < 0:
            q = -q
    else:
        q = cone.domain.chart.lift(np.asarray(p, dtype=float))
    fm = min_volume_on_fiber(cone, q)
    n1 = q.size
    return fm.phi * fm.value ** (1.0 / n1)


def characteristic_point(c, q) -> np.ndarray:
    """Point of the radial characteristic surface on the ray through q."""
    cone = _as_cone(c)
    q = np.atleast_1d(np.asarray(q, dtype=float))
    qhat = q / np.linalg.norm(q)
    fm = min_volume_on_fiber(cone, qhat)
    t = fm.value ** (-1.0 / qhat.size)
    return t * qhat


def characteristic_radius(c, q) -> float:
    """Distance from the apex to the characteristic surface along the ray of q."""
    return float(np.linalg.norm(characteristic_point(c, q)))


class CharacteristicSurface:
    """Radial evaluator of the surface where the fiber-minimal volume is one."""

    def __init__(self, cone):
        self.cone = _as_cone(cone)

    def radius(self, q) -> float:
        return characteristic_radius(self.cone, q)

    def point(self, q) -> np.ndarray:
        return characteristic_point(self.cone, q)

    def consistency_gap(self, q) -> float:
        """|V(fiber minimum at the surface point) - 1|; small by homogeneity."""
        fm = min_volume_on_fiber(self.cone, self.point(q))
        return abs(fm.value - 1.0)


@dataclass
class SphericalCenter:
    center: ProjPoint
    rotation: ProjTransform  # orthogonal, carries the center to the chart pole
    residual: float
    iterations: int


def spherical_center(dom: ConvexDomain, max_iter=60) -> SphericalCenter:
    """Unique direction whose chart sees the domain centroid at the origin.

    Solves the first-order condition: the fiber-minimizing functional at the
    center is parallel to the center direction.  Newton iteration on the
    chart-coordinate residual with a finite-difference Jacobian, damped to
    stay inside the domain.
    """
    from .domain import validate
    validate(dom)
    cone = dom.cone()
    chart = dom.chart
    n = dom.dim

    def residual(x):
        if dom.backend.contains_margin(x) <= 0:
            return None
        q = chart.lift(x)
        fm = min_volume_on_fiber(cone, q / np.linalg.norm(q))
        vstar = fm.phi
        h = chart.height(vstar)
        if h <= 0:
            return None
        return (chart.frame.T @ vstar) / h - x

    x = np.asarray(dom.backend.moments()[1], dtype=float)
    g = residual(x)
    if g is None:
        raise ConvergenceFailureError("centroid start is infeasible", best=x)
    it = 0
    for it in range(1, max_iter + 1):
        gn = np.linalg.norm(g)
        if gn <= TOL.center_residual:
            break
        h_step = max(1e-7, 1e-7 * np.linalg.norm(x))
        jac = np.empty((n, n))
        ok = True
        for j in range(n):
            xp = x.copy()
            xp[j] += h_step
            gp = residual(xp)
            if gp is None:
                ok = False
                break
            jac[:, j] = (gp - g) / h_step
        if not ok:
            raise ConvergenceFailureError(
                "center iteration left the domain", best=x, residual=gn)
        try:
            step = np.linalg.solve(jac, -g)
        except np.linalg.LinAlgError:
            step = g  # fixed-point fallback
        s = 1.0
        moved = False
        while s > 1e-12:
            g_try = residual(x + s * step)
            if g_try is not None and np.linalg.norm(g_try) < gn:
                x = x + s * step
                g = g_try
                moved = True
                break
            s *= 0.5
        if not moved:
            break
    gn = float(np.linalg.norm(g))
    if gn > 100 * TOL.center_residual:
        raise ConvergenceFailureError(
            "spherical center iteration did not converge",
            best=x, residual=gn, iterations=it)
    q = chart.lift(x)
    q = q / np.linalg.norm(q)
    rot = minimal_rotation(q, chart.infinity)
    return SphericalCenter(
        center=ProjPoint(q, canonicalize=False),
        rotation=ProjTransform(rot),
        residual=gn,
        iterations=it,
    )
