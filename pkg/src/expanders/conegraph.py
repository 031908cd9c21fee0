"""Hypersurfaces written as normal graphs over a round cone.

A graph of height ``u(r, theta)`` over the cone of half-angle alpha is

    F(r, theta) = cone_position + u * cone_normal
                = ((r sin(a) - u cos(a)) Phi(theta),  r cos(a) + u sin(a)).

Writing Z = sin(a) - (u/r) cos(a) and lambda_i for the chart weights, the
induced metric splits as g = M + eta eta^T with M = diag(1, (r Z)^2 lam_i)
and eta = (u_r, u_theta), which is inverted in closed form by one
Sherman-Morrison step.  The (unnormalized) normal is

    N = Z nu_cone - (1/r) sum_i (u_theta_i / lam_i) Phi_i - Z u_r e_r

and the second fundamental form entries are

    h_rr = Z u_rr / |N|
    h_ri = (Z u_ri + (cos(a) u_r - sin(a)) u_theta_i / r) / |N|
    h_ij = (Z u_ij + (2 cos(a)/r) u_i u_j + r Z <Phi_ij, N>) / |N|

where <Phi_ij, N> contracts the sphere-chart second derivatives against the
first n components of N.  All formulas are validated against finite
differences of the embedding in the test suite.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cone import DEFAULT_POLE_MARGIN, ConeSpec, sphere_jet
from .errors import ConfigError, ImmersionFailure, InsufficientAnnuli, ShapeMismatch
from .reports import AnnulusReport
from .surface import SurfacePatch, rotation_generator

Z_FLOOR = 1e-10


@dataclass(frozen=True)
class GraphJet:
    """Second-order jet of a graph height function on a point set."""

    u: np.ndarray
    ur: np.ndarray
    uth: np.ndarray  # (..., d)
    urr: np.ndarray
    urth: np.ndarray  # (..., d)
    uthth: np.ndarray  # (..., d, d)


class GraphFunction:
    """Graph height over the cone, with analytic or finite-difference jets.

    ``value(r, theta)`` must broadcast over grids (r shaped (...,), theta
    shaped (..., d)).  If ``jet`` is omitted, first and second derivatives
    are formed by central differences of ``value`` with relative radial step
    and absolute angular step ``fd_step``.
    """

    def __init__(self, value, jet=None, fd_step: float = 3e-4, name: str = "graph"):
        if not callable(value):
            raise ConfigError("graph height must be callable")
        if fd_step <= 0:
            raise ConfigError("finite-difference step must be positive")
        self.value = value
        self._jet = jet
        self.fd_step = float(fd_step)
        self.name = name

    def jet(self, r, theta) -> GraphJet:
        r = np.asarray(r, dtype=float)
        theta = np.asarray(theta, dtype=float)
        if self._jet is not None:
            return self._jet(r, theta)
        return self.fd_jet(r, theta)

    def fd_jet(self, r, theta) -> GraphJet:
        """Jet by central differences of the height function."""
        r = np.asarray(r, dtype=float)
        theta = np.asarray(theta, dtype=float)
        d = theta.shape[-1]
        hr = self.fd_step * np.maximum(1.0, np.abs(r))
        ht = self.fd_step

        def val(rr, tt):
            return np.asarray(self.value(rr, tt), dtype=float)

        u0 = val(r, theta)
        up = val(r + hr, theta)
        um = val(r - hr, theta)
        ur = (up - um) / (2.0 * hr)
        urr = (up - 2.0 * u0 + um) / hr**2

        uth = np.empty(u0.shape + (d,))
        urth = np.empty(u0.shape + (d,))
        uthth = np.empty(u0.shape + (d, d))
        shifts = []
        for i in range(d):
            e = np.zeros(d)
            e[i] = ht
            tp = val(r, theta + e)
            tm = val(r, theta - e)
            shifts.append((e, tp, tm))
            uth[..., i] = (tp - tm) / (2.0 * ht)
            uthth[..., i, i] = (tp - 2.0 * u0 + tm) / ht**2
            urth[..., i] = (
                val(r + hr, theta + e) - val(r + hr, theta - e)
                - val(r - hr, theta + e) + val(r - hr, theta - e)
            ) / (4.0 * hr * ht)
        for i in range(d):
            ei = shifts[i][0]
            for j in range(i + 1, d):
                ej = shifts[j][0]
                mixed = (
                    val(r, theta + ei + ej) - val(r, theta + ei - ej)
                    - val(r, theta - ei + ej) + val(r, theta - ei - ej)
                ) / (4.0 * ht * ht)
                uthth[..., i, j] = mixed
                uthth[..., j, i] = mixed
        return GraphJet(u=u0, ur=ur, uth=uth, urr=urr, urth=urth, uthth=uthth)

    def check_jet_consistency(self, r, theta, tol: float = 1e-4) -> float:
        """Largest scaled gap between supplied and finite-difference jets.

        Raises ShapeMismatch if no analytic jet is attached, ConfigError if
        the gap exceeds ``tol`` (scaled by 1 + |analytic value|).
        """
        if self._jet is None:
            raise ShapeMismatch("no analytic jet attached to compare against")
        ana = self.jet(r, theta)
        num = self.fd_jet(r, theta)
        worst = 0.0
        for name in ("u", "ur", "uth", "urr", "urth", "uthth"):
            a = np.asarray(getattr(ana, name), dtype=float)
            b = np.asarray(getattr(num, name), dtype=float)
            gap = float(np.max(np.abs(a - b) / (1.0 + np.abs(a))))
            worst = max(worst, gap)
        if worst > tol:
            raise ConfigError(
                f"graph jet inconsistent with finite differences: {worst:.3g} > {tol:g}"
            )
        return worst


# ---------------------------------------------------------------------------
# stock height functions


def radial_power_graph(c: float, p: float) -> GraphFunction:
    """u = c r^(-p), rotationally symmetric."""

    def value(r, theta):
        r = np.asarray(r, dtype=float)
        theta = np.asarray(theta, dtype=float)
        return np.broadcast_to(c * r**-p, np.broadcast_shapes(r.shape, theta.shape[:-1])).copy()

    def jet(r, theta):
        r = np.asarray(r, dtype=float)
        theta = np.asarray(theta, dtype=float)
        d = theta.shape[-1]
        base = np.broadcast_shapes(r.shape, theta.shape[:-1])
        r = np.broadcast_to(r, base)
        u = c * r**-p
        ur = -p * c * r ** (-p - 1)
        urr = p * (p + 1) * c * r ** (-p - 2)
        zd = np.zeros(base + (d,))
        return GraphJet(
            u=u, ur=ur, uth=zd, urr=urr, urth=zd, uthth=np.zeros(base + (d, d))
        )

    return GraphFunction(value, jet, name=f"{c:g}*r^-{p:g}")


def anisotropic_power_graph(c: float, p: float, weights) -> GraphFunction:
    """u = c r^(-p) (1 + <w, Phi(theta)>): decays but breaks all rotations.

    ``weights`` is a vector paired against the sphere-chart position, so the
    height varies over the cross-section and every rotation support function
    on the graph is nontrivial.
    """
    w = np.asarray(weights, dtype=float)

    def value(r, theta):
        r = np.asarray(r, dtype=float)
        phi, _, _, _ = sphere_jet(theta, margin=1e-12)
        if w.shape != phi.shape[-1:]:
            raise ShapeMismatch(
                f"weights need length {phi.shape[-1]} for these angles"
            )
        ang = 1.0 + phi @ w
        return c * r**-p * ang

    def jet(r, theta):
        r = np.asarray(r, dtype=float)
        theta = np.asarray(theta, dtype=float)
        phi, dphi, d2phi, _ = sphere_jet(theta, margin=1e-12)
        if w.shape != phi.shape[-1:]:
            raise ShapeMismatch(f"weights need length {phi.shape[-1]} for these angles")
        base = np.broadcast_shapes(r.shape, theta.shape[:-1])
        r = np.broadcast_to(r, base)
        ang = 1.0 + phi @ w
        dang = dphi @ w
        d2ang = d2phi @ w
        rad = c * r**-p
        rad1 = -p * c * r ** (-p - 1)
        rad2 = p * (p + 1) * c * r ** (-p - 2)
        return GraphJet(
            u=rad * ang,
            ur=rad1 * ang,
            uth=rad[..., None] * dang,
            urr=rad2 * ang,
            urth=rad1[..., None] * dang,
            uthth=rad[..., None, None] * d2ang,
        )

    return GraphFunction(value, jet, name=f"{c:g}*r^-{p:g}*(1+<w,Phi>)")


def bump_graph(c: float, r0: float, r1: float) -> GraphFunction:
    """Radial C^2 bump c (t(1-t))^3 on t = (r-r0)/(r1-r0), zero outside."""
    if not 0 < r0 < r1:
        raise ConfigError("bump needs 0 < r0 < r1")
    width = r1 - r0

    def pieces(r):
        r = np.asarray(r, dtype=float)
        t = (r - r0) / width
        inside = (t > 0.0) & (t < 1.0)
        t = np.where(inside, t, 0.5)
        q = t * (1.0 - t)
        f = np.where(inside, c * q**3, 0.0)
        dq = 1.0 - 2.0 * t
        f1 = np.where(inside, 3.0 * c * q**2 * dq, 0.0) / width
        f2 = np.where(inside, c * (6.0 * q * dq**2 - 6.0 * q**2), 0.0) / width**2
        return f, f1, f2

    def value(r, theta):
        theta = np.asarray(theta, dtype=float)
        f, _, _ = pieces(r)
        base = np.broadcast_shapes(np.shape(f), theta.shape[:-1])
        return np.broadcast_to(f, base).copy()

    def jet(r, theta):
        r = np.asarray(r, dtype=float)
        theta = np.asarray(theta, dtype=float)
        d = theta.shape[-1]
        base = np.broadcast_shapes(r.shape, theta.shape[:-1])
        f, f1, f2 = pieces(np.broadcast_to(r, base))
        zd = np.zeros(base + (d,))
        return GraphJet(u=f, ur=f1, uth=zd, urr=f2, urth=zd, uthth=np.zeros(base + (d, d)))

    return GraphFunction(value, jet, name=f"bump[{r0:g},{r1:g}]")


# ---------------------------------------------------------------------------
# closed-form geometry of the graph


@dataclass(frozen=True)
class GraphMetricParts:
    """Diagonal-plus-rank-one split of the graph metric."""

    M_diag: np.ndarray  # (..., n)
    eta: np.ndarray  # (..., n)

    def dense(self) -> np.ndarray:
        g = np.zeros(self.M_diag.shape + self.M_diag.shape[-1:])
        idx = np.arange(self.M_diag.shape[-1])
        g[..., idx, idx] = self.M_diag
        return g + self.eta[..., :, None] * self.eta[..., None, :]


def sherman_morrison_inverse(M_diag: np.ndarray, eta: np.ndarray) -> np.ndarray:
    """Inverse of diag(M) + eta eta^T, batched over leading axes."""
    M_diag = np.asarray(M_diag, dtype=float)
    eta = np.asarray(eta, dtype=float)
    if M_diag.shape != eta.shape:
        raise ShapeMismatch("diagonal and rank-one factor must share a shape")
    if np.any(M_diag <= 0):
        raise ImmersionFailure("diagonal metric part must be positive")
    w = eta / M_diag
    denom = 1.0 + np.einsum("...i,...i->...", eta, w)
    n = M_diag.shape[-1]
    inv = np.zeros(M_diag.shape + (n,))
    idx = np.arange(n)
    inv[..., idx, idx] = 1.0 / M_diag
    inv -= w[..., :, None] * w[..., None, :] / denom[..., None, None]
    return inv


@dataclass(frozen=True)
class GraphGeometry:
    """Closed-form geometric data of a graph over the cone."""

    points: np.ndarray
    tangents: np.ndarray
    metric_parts: GraphMetricParts
    g: np.ndarray
    g_inv: np.ndarray
    det_g: np.ndarray
    normal_raw: np.ndarray
    nu: np.ndarray
    h: np.ndarray
    H: np.ndarray
    A2: np.ndarray
    Z: np.ndarray
    jet: GraphJet


def graph_geometry(
    spec: ConeSpec,
    gf: GraphFunction,
    r,
    theta,
    margin: float = DEFAULT_POLE_MARGIN,
) -> GraphGeometry:
    """Evaluate the closed-form graph geometry on broadcast (r, theta)."""
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if np.any(r <= 0.0):
        raise ConfigError("graph radii must be positive")
    d = theta.shape[-1]
    if d != spec.sphere_dim:
        raise ShapeMismatch(f"need {spec.sphere_dim} angles for n = {spec.n}")
    base = np.broadcast_shapes(r.shape, theta.shape[:-1])
    r = np.broadcast_to(r, base)
    theta = np.broadcast_to(theta, base + (d,))

    phi, dphi, d2phi, lam = sphere_jet(theta, margin)
    jet = gf.jet(r, theta)
    sa = math.sin(spec.alpha)
    ca = math.cos(spec.alpha)
    n = spec.n
    m = n + 1

    Z = sa - (jet.u / r) * ca
    if np.any(Z <= Z_FLOOR):
        raise ImmersionFailure(
            f"graph leaves the cone chart: min Z = {float(np.min(Z)):.3g}"
        )

    # ambient frame pieces
    e_r = np.empty(base + (m,))
    e_r[..., :n] = sa * phi
    e_r[..., n] = ca
    nu_cone = np.empty(base + (m,))
    nu_cone[..., :n] = -ca * phi
    nu_cone[..., n] = sa

    points = np.empty(base + (m,))
    points[..., :n] = (r * sa - jet.u * ca)[..., None] * phi
    points[..., n] = r * ca + jet.u * sa

    tangents = np.empty(base + (n, m))
    tangents[..., 0, :] = e_r + jet.ur[..., None] * nu_cone
    for i in range(d):
        tangents[..., 1 + i, :n] = (
            jet.uth[..., i, None] * nu_cone[..., :n]
            + (r * Z)[..., None] * dphi[..., i, :]
        )
        tangents[..., 1 + i, n] = jet.uth[..., i] * nu_cone[..., n]

    M_diag = np.empty(base + (n,))
    M_diag[..., 0] = 1.0
    M_diag[..., 1:] = (r * Z)[..., None] ** 2 * lam
    eta = np.empty(base + (n,))
    eta[..., 0] = jet.ur
    eta[..., 1:] = jet.uth
    parts = GraphMetricParts(M_diag=M_diag, eta=eta)
    g = parts.dense()
    g_inv = sherman_morrison_inverse(M_diag, eta)
    det_g = np.prod(M_diag, axis=-1) * (
        1.0 + np.einsum("...i,...i->...", eta, eta / M_diag)
    )

    N = Z[..., None] * nu_cone - (Z * jet.ur)[..., None] * e_r
    N[..., :n] -= np.einsum("...i,...ik->...k", jet.uth / (r[..., None] * lam), dphi)
    norm = np.sqrt(np.einsum("...m,...m->...", N, N))
    nu = N / norm[..., None]

    h = np.empty(base + (n, n))
    h[..., 0, 0] = Z * jet.urr
    for i in range(d):
        hri = Z * jet.urth[..., i] + (ca * jet.ur - sa) * jet.uth[..., i] / r
        h[..., 0, 1 + i] = hri
        h[..., 1 + i, 0] = hri
    # <Phi_ij, N> over the first n ambient components
    cij = np.einsum("...ijk,...k->...ij", d2phi, N[..., :n])
    for i in range(d):
        for j in range(d):
            h[..., 1 + i, 1 + j] = (
                Z * jet.uthth[..., i, j]
                + (2.0 * ca / r) * jet.uth[..., i] * jet.uth[..., j]
                + r * Z * cij[..., i, j]
            )
    h /= norm[..., None, None]

    shape_op = np.einsum("...ab,...bc->...ac", g_inv, h)
    H = np.trace(shape_op, axis1=-2, axis2=-1)
    A2 = np.einsum("...ab,...ba->...", shape_op, shape_op)
    return GraphGeometry(
        points=points,
        tangents=tangents,
        metric_parts=parts,
        g=g,
        g_inv=g_inv,
        det_g=det_g,
        normal_raw=N,
        nu=nu,
        h=h,
        H=H,
        A2=A2,
        Z=Z,
        jet=jet,
    )


def graph_metric(spec: ConeSpec, gf: GraphFunction, r, theta, margin=DEFAULT_POLE_MARGIN):
    geo = graph_geometry(spec, gf, r, theta, margin)
    return geo.metric_parts, geo.g, geo.g_inv


def graph_normal(spec: ConeSpec, gf: GraphFunction, r, theta, margin=DEFAULT_POLE_MARGIN):
    geo = graph_geometry(spec, gf, r, theta, margin)
    return geo.normal_raw, geo.nu


def graph_second_form(spec: ConeSpec, gf: GraphFunction, r, theta, margin=DEFAULT_POLE_MARGIN):
    geo = graph_geometry(spec, gf, r, theta, margin)
    return geo.h


def graph_embedding(
    spec: ConeSpec,
    gf: GraphFunction,
    r_nodes,
    theta_axes,
    margin: float = DEFAULT_POLE_MARGIN,
    boundary_policy: str = "one_sided",
):
    """Sample the graph embedding on a tensor grid as a SurfacePatch.

    Returns (patch, geometry) with the closed-form geometry on the same grid.
    """
    from .surface import wraps_period

    r_nodes = np.asarray(r_nodes, dtype=float)
    axes = [r_nodes] + [np.asarray(t, dtype=float) for t in theta_axes]
    if len(axes) != spec.n:
        raise ConfigError(f"graph over S^{spec.sphere_dim} needs {spec.sphere_dim} angle axes")
    periodic = (False,) + tuple(wraps_period(t) for t in axes[1:])
    grids = np.meshgrid(*axes, indexing="ij")
    r = grids[0]
    theta = np.stack(grids[1:], axis=-1)
    geo = graph_geometry(spec, gf, r, theta, margin)
    patch = SurfacePatch(
        axes=tuple(axes),
        points=geo.points,
        boundary_policy=boundary_policy,
        periodic=periodic,
    )
    return patch, geo


# ---------------------------------------------------------------------------
# asymptotics over dyadic annuli


def _annulus_theta_grid(spec: ConeSpec, margin: float, ntheta: int):
    """Tensor grid of angles: polar angles boxed away from the poles."""
    d = spec.sphere_dim
    axes = []
    for i in range(d):
        if i < d - 1:
            lo, hi = margin + 0.2, math.pi - margin - 0.2
        else:
            lo, hi = 0.0, 2.0 * math.pi * (1.0 - 1.0 / ntheta)
        axes.append(np.linspace(lo, hi, ntheta))
    grids = np.meshgrid(*axes, indexing="ij")
    return np.stack(grids, axis=-1)


def asymptotics_report(
    spec: ConeSpec,
    gf: GraphFunction,
    annuli: list[tuple[float, float]],
    axes=(),
    nr: int = 16,
    ntheta: int = 12,
    margin: float = DEFAULT_POLE_MARGIN,
) -> AnnulusReport:
    """Per-annulus sups of the distance-to-cone indicators and supports.

    Quantities: ``cone_gap`` = |r^2 |A|^2 - (n-1) cot^2(alpha)|, ``H`` and
    ``A`` magnitudes, ``normal_gap`` = |nu - nu_cone|, and one rotation
    support magnitude ``f_R[...]`` per requested axis.
    """
    if len(annuli) < 3:
        raise InsufficientAnnuli("need at least three annuli")
    theta = _annulus_theta_grid(spec, margin, ntheta)
    ca, sa = math.cos(spec.alpha), math.sin(spec.alpha)
    cone_A2_scaled = (spec.n - 1) * (ca / sa) ** 2
    gens = [(axis_label(ax, spec.n + 1), rotation_generator(ax, spec.n + 1)) for ax in axes]

    table: dict[str, list] = {"cone_gap": [], "H": [], "A": [], "normal_gap": []}
    for label, _ in gens:
        table[f"f_R[{label}]"] = []
    for r0, r1 in annuli:
        r_samples = np.geomspace(r0, r1, nr)
        r = r_samples.reshape((nr,) + (1,) * (theta.ndim - 1))
        geo = graph_geometry(spec, gf, r, theta[None, ...], margin)
        nu_cone = np.empty(geo.nu.shape)
        phi, _, _, _ = sphere_jet(np.broadcast_to(theta[None, ...], geo.H.shape + theta.shape[-1:]), margin)
        nu_cone[..., : spec.n] = -ca * phi
        nu_cone[..., spec.n] = sa
        rr = np.broadcast_to(r, geo.H.shape)

        def put(name, field):
            f = np.abs(field)
            table[name].append(((r0, r1), float(f.max()), float(np.sqrt(np.mean(f**2)))))

        put("cone_gap", rr**2 * geo.A2 - cone_A2_scaled)
        put("H", geo.H)
        put("A", np.sqrt(geo.A2))
        put("normal_gap", np.linalg.norm(geo.nu - nu_cone, axis=-1))
        for label, K in gens:
            f_R = np.einsum("...m,...m->...", geo.points @ K.T, geo.nu)
            put(f"f_R[{label}]", f_R)
    return AnnulusReport.build(table)


def check_c2_decay(
    spec: ConeSpec,
    gf: GraphFunction,
    annuli: list[tuple[float, float]],
    nr: int = 16,
    ntheta: int = 12,
    margin: float = DEFAULT_POLE_MARGIN,
):
    """Scaled jet sups per annulus and their monotone-decay flags.

    The six quantities |u|, r|u_r|, r^2|u_rr|, |u_theta|, r|u_rtheta|,
    |u_thetatheta| all tending to zero is the graph-form statement that the
    surface approaches the cone in C^2.
    """
    if len(annuli) < 3:
        raise InsufficientAnnuli("need at least three annuli")
    theta = _annulus_theta_grid(spec, margin, ntheta)
    table: dict[str, list] = {name: [] for name in (
        "u", "r*ur", "r^2*urr", "uth", "r*urth", "uthth",
    )}
    for r0, r1 in annuli:
        r_samples = np.geomspace(r0, r1, nr)
        r = r_samples.reshape((nr,) + (1,) * (theta.ndim - 1))
        base = np.broadcast_shapes(r.shape, theta[None, ...].shape[:-1])
        rr = np.broadcast_to(r, base)
        jet = gf.jet(rr, np.broadcast_to(theta[None, ...], base + theta.shape[-1:]))

        def put(name, field):
            f = np.abs(field)
            table[name].append(((r0, r1), float(f.max()), float(np.sqrt(np.mean(f**2)))))

        put("u", jet.u)
        put("r*ur", rr * jet.ur)
        put("r^2*urr", rr**2 * jet.urr)
        put("uth", np.max(np.abs(jet.uth), axis=-1))
        put("r*urth", rr * np.max(np.abs(jet.urth), axis=-1))
        put("uthth", np.max(np.abs(jet.uthth), axis=(-2, -1)))
    report = AnnulusReport.build(table)
    flags = {q: report.monotone_nonincreasing(q) for q in report.quantities()}
    return report, flags


def axis_label(axis, ambient_dim: int) -> str:
    """Short deterministic label for an ambient axis vector."""
    axis = np.asarray(axis, dtype=float)
    if axis.shape != (ambient_dim,):
        raise ConfigError(f"axis must have length {ambient_dim}")
    nz = np.nonzero(axis)[0]
    if nz.size == 1 and axis[nz[0]] > 0:
        return f"e{nz[0] + 1}"
    return "(" + ",".join(f"{v:g}" for v in axis) + ")"
