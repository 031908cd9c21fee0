"""Hyperspherical charts on the unit sphere and round-cone geometry.

The chart on S^d uses angles ``theta = (theta_1, ..., theta_d)`` with
components built from products of sines and cosines:

    Phi_k     = cos(theta_k) * prod_{j<k} sin(theta_j)   for k = 1..d
    Phi_{d+1} = prod_{j<=d} sin(theta_j)

All angles except the last are polar (their sines must stay away from zero);
the last angle is an azimuth and is unconstrained.  The chart satisfies

    <Phi_i, Phi_j>  = lambda_i delta_ij,   lambda_i = prod_{j<i} sin^2(theta_j)
    <Phi_ij, Phi>   = -lambda_i delta_ij

where subscripts denote partial derivatives in the angles.

A round cone of half-angle ``alpha`` in R^(n+1) is parametrized over
(0, inf) x S^(n-1) by

    F(r, theta) = (r sin(alpha) Phi(theta), r cos(alpha))

with downward unit normal ``(-cos(alpha) Phi, sin(alpha))``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError, PoleProximity

DEFAULT_POLE_MARGIN = 0.1


@dataclass(frozen=True)
class SphereChart:
    """A point (or point grid) of the hyperspherical chart on S^dim."""

    dim: int
    theta: tuple[float, ...]
    avoid_poles_margin: float = DEFAULT_POLE_MARGIN

    def __post_init__(self):
        if self.dim < 1:
            raise ConfigError("sphere dimension must be >= 1")
        if len(self.theta) != self.dim:
            raise ConfigError(
                f"chart on S^{self.dim} needs {self.dim} angles, got {len(self.theta)}"
            )
        if not 0 < self.avoid_poles_margin < math.pi / 2:
            raise ConfigError("pole margin must lie in (0, pi/2)")


@dataclass(frozen=True)
class ConeSpec:
    """Round cone in R^(n+1): half-angle alpha measured from the axis."""

    n: int
    alpha: float

    def __post_init__(self):
        if self.n < 2:
            raise ConfigError("ambient cone dimension needs n >= 2")
        if not 0.0 < self.alpha <= math.pi / 2:
            raise ConfigError("cone half-angle must lie in (0, pi/2]")

    @property
    def sphere_dim(self) -> int:
        return self.n - 1


def check_pole_margin(theta: np.ndarray, margin: float = DEFAULT_POLE_MARGIN) -> None:
    """Reject polar angles within ``margin`` of 0 or pi (last angle exempt)."""
    theta = np.asarray(theta, dtype=float)
    d = theta.shape[-1]
    if d < 2:
        return
    polar = theta[..., : d - 1]
    if np.any(polar < margin) or np.any(polar > math.pi - margin):
        worst = float(np.min(np.minimum(polar, math.pi - polar)))
        raise PoleProximity(
            f"polar angle within {worst:.3g} of a chart pole (margin {margin:g})"
        )


def sphere_jet(theta, margin: float = DEFAULT_POLE_MARGIN):
    """Chart position, first and second angle-derivatives, and weights.

    Parameters
    ----------
    theta : array shape (..., d)
        Chart angles; leading axes are broadcast as a grid.

    Returns
    -------
    phi : (..., d+1)
    dphi : (..., d, d+1)       dphi[..., a, :] = d(phi)/d(theta_a)
    d2phi : (..., d, d, d+1)
    lam : (..., d)             lambda_a = prod_{j<a} sin^2(theta_j)
    """
    theta = np.asarray(theta, dtype=float)
    if theta.ndim == 0 or theta.shape[-1] < 1:
        raise ConfigError("theta must have a trailing angle axis")
    check_pole_margin(theta, margin)
    d = theta.shape[-1]
    base = theta.shape[:-1]
    st = np.sin(theta)
    ct = np.cos(theta)

    # factor tables: fac[o][k][j] is the o-th derivative in theta_j of the
    # j-th factor of component k; inactive factors are the constant 1.
    def factor(k: int, j: int, order: int):
        if j < k:  # sine factor
            return (st[..., j], ct[..., j], -st[..., j])[order]
        if j == k and k < d:  # cosine factor
            return (ct[..., j], -st[..., j], -ct[..., j])[order]
        return (1.0, 0.0, 0.0)[order]

    m = d + 1
    phi = np.empty(base + (m,))
    dphi = np.zeros(base + (d, m))
    d2phi = np.zeros(base + (d, d, m))

    for k in range(m):
        active = range(min(k + 1, d))
        prod = np.ones(base)
        for j in active:
            prod = prod * factor(k, j, 0)
        phi[..., k] = prod
        for a in active:
            prod = np.ones(base) * factor(k, a, 1)
            for j in active:
                if j != a:
                    prod = prod * factor(k, j, 0)
            dphi[..., a, k] = prod
        for a in active:
            for b in active:
                if b < a:
                    d2phi[..., a, b, k] = d2phi[..., b, a, k]
                    continue
                if a == b:
                    prod = np.ones(base) * factor(k, a, 2)
                else:
                    prod = factor(k, a, 1) * factor(k, b, 1)
                for j in active:
                    if j != a and j != b:
                        prod = prod * factor(k, j, 0)
                d2phi[..., a, b, k] = prod

    lam = np.ones(base + (d,))
    for a in range(1, d):
        lam[..., a] = lam[..., a - 1] * st[..., a - 1] ** 2
    return phi, dphi, d2phi, lam


def hyperspherical_chart(chart: SphereChart):
    """Jet of the chart at a single point described by a SphereChart."""
    theta = np.asarray(chart.theta, dtype=float)
    return sphere_jet(theta, chart.avoid_poles_margin)


def cone_frame(spec: ConeSpec, r, theta, margin: float = DEFAULT_POLE_MARGIN):
    """Position, radial tangent, and downward unit normal of the cone.

    ``r`` has shape (...,) and ``theta`` shape (..., n-1); both broadcast.
    Returns (F, dF/dr, nu) with trailing dimension n+1.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.0):
        raise DomainError("cone radius must be positive")
    phi, _, _, _ = sphere_jet(theta, margin)
    sa = math.sin(spec.alpha)
    ca = math.cos(spec.alpha)
    base = np.broadcast_shapes(r.shape, phi.shape[:-1])
    F = np.empty(base + (spec.n + 1,))
    dFdr = np.empty_like(F)
    nu = np.empty_like(F)
    F[..., :-1] = (r * sa)[..., None] * phi
    F[..., -1] = r * ca
    dFdr[..., :-1] = sa * phi
    dFdr[..., -1] = ca
    nu[..., :-1] = -ca * phi
    nu[..., -1] = sa
    return F, dFdr, nu


def cone_geometry(spec: ConeSpec, r, theta, margin: float = DEFAULT_POLE_MARGIN):
    """First/second fundamental forms of the cone in the (r, theta) frame.

    Returns (g, h, H, A2) where g and h have shape (..., n, n) ordered with
    the radial direction first, H is the scalar mean curvature trace and A2
    the squared norm of the shape operator, both computed numerically from
    the assembled matrices.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.0):
        raise DomainError("cone radius must be positive")
    _, _, _, lam = sphere_jet(theta, margin)
    sa = math.sin(spec.alpha)
    ca = math.cos(spec.alpha)
    d = spec.sphere_dim
    base = np.broadcast_shapes(r.shape, lam.shape[:-1])
    r = np.broadcast_to(r, base)
    lam = np.broadcast_to(lam, base + (d,))

    g = np.zeros(base + (spec.n, spec.n))
    h = np.zeros_like(g)
    g[..., 0, 0] = 1.0
    for i in range(d):
        g[..., 1 + i, 1 + i] = (r * sa) ** 2 * lam[..., i]
        h[..., 1 + i, 1 + i] = r * sa * ca * lam[..., i]

    shape_op = np.linalg.solve(g, h)
    H = np.trace(shape_op, axis1=-2, axis2=-1)
    A2 = np.einsum("...ab,...ba->...", shape_op, shape_op)
    return g, h, H, A2


def cone_closed_forms(spec: ConeSpec, r):
    """Exact H and |A|^2 of the cone at radius r: ((n-1)/r) cot(alpha), etc."""
    r = np.asarray(r, dtype=float)
    cot = math.cos(spec.alpha) / math.sin(spec.alpha)
    H = (spec.n - 1) * cot / r
    A2 = (spec.n - 1) * cot**2 / r**2
    return H, A2


def cone_patch(spec: ConeSpec, r_nodes, theta_axes, margin: float = DEFAULT_POLE_MARGIN):
    """Sample the cone embedding on a tensor grid, as a SurfacePatch.

    ``theta_axes`` is a sequence of n-1 one-dimensional angle arrays; an
    angle axis covering a full circle is marked periodic on the patch.
    """
    from .surface import SurfacePatch, wraps_period

    r_nodes = np.asarray(r_nodes, dtype=float)
    axes = [r_nodes] + [np.asarray(t, dtype=float) for t in theta_axes]
    if len(axes) != spec.n:
        raise ConfigError(f"cone over S^{spec.sphere_dim} needs {spec.sphere_dim} angle axes")
    periodic = (False,) + tuple(wraps_period(t) for t in axes[1:])
    grids = np.meshgrid(*axes, indexing="ij")
    r = grids[0]
    theta = np.stack(grids[1:], axis=-1)
    F, _, nu = cone_frame(spec, r, theta, margin)
    return SurfacePatch(axes=tuple(axes), points=F, periodic=periodic), nu
