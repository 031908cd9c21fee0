"""Discrete hypersurface geometry on uniform parameter grids.

A patch is a map from a tensor-product parameter grid into R^m with
m = (number of parameters) + 1.  All derivatives are central second-order
finite differences in the interior with one-sided second-order stencils on
the boundary, so every geometric field is defined at every node; reported
norms can either keep those boundary values (``one_sided``) or restrict to
interior nodes (``trim``).  An axis that samples a full period (a closed
angle) can be marked periodic, in which case its stencils wrap and it has
no boundary at all -- this keeps discrete normals of surfaces of revolution
exactly equivariant under the revolution.

Sign conventions: the second fundamental form is h_ab = <d2F/dxa dxb, nu>,
the shape operator is g^{-1} h, H is its trace and |A|^2 the trace of its
square, so the unit sphere of radius rho with inward normal has H = d/rho.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ConfigError,
    DegenerateMetric,
    ShapeMismatch,
)

BOUNDARY_POLICIES = ("one_sided", "trim")
DET_FLOOR = 1e-12


# ---------------------------------------------------------------------------
# finite-difference stencils


def diff1(values: np.ndarray, spacing: float, axis: int, periodic: bool = False) -> np.ndarray:
    """Second-order first derivative along one grid axis."""
    if periodic:
        return (np.roll(values, -1, axis=axis) - np.roll(values, 1, axis=axis)) / (
            2.0 * spacing
        )
    return np.gradient(values, spacing, axis=axis, edge_order=2)


def diff2(values: np.ndarray, spacing: float, axis: int, periodic: bool = False) -> np.ndarray:
    """Second-order pure second derivative along one grid axis."""
    if values.shape[axis] < 4:
        raise ConfigError("second derivative stencil needs at least 4 nodes per axis")
    if periodic:
        return (
            np.roll(values, -1, axis=axis)
            - 2.0 * values
            + np.roll(values, 1, axis=axis)
        ) / spacing**2
    v = np.moveaxis(values, axis, 0)
    out = np.empty_like(v)
    out[1:-1] = v[2:] - 2.0 * v[1:-1] + v[:-2]
    out[0] = 2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]
    out[-1] = 2.0 * v[-1] - 5.0 * v[-2] + 4.0 * v[-3] - v[-4]
    return np.moveaxis(out, 0, axis) / spacing**2


def diff_mixed(
    values: np.ndarray,
    sa: float,
    axis_a: int,
    sb: float,
    axis_b: int,
    periodic_a: bool = False,
    periodic_b: bool = False,
) -> np.ndarray:
    """Second-order mixed derivative as nested first differences."""
    return diff1(diff1(values, sa, axis_a, periodic_a), sb, axis_b, periodic_b)


def wraps_period(ax: np.ndarray, period: float = 2.0 * np.pi, tol: float = 1e-9) -> bool:
    """True when a uniform axis samples a full period without the endpoint."""
    ax = np.asarray(ax, dtype=float)
    if ax.size < 3:
        return False
    h = ax[1] - ax[0]
    return abs((ax[-1] - ax[0]) + h - period) <= tol * period


# ---------------------------------------------------------------------------
# patch and fields containers


@dataclass(frozen=True)
class SurfacePatch:
    """Uniform tensor grid of points on a hypersurface in R^m."""

    axes: tuple[np.ndarray, ...]
    points: np.ndarray
    boundary_policy: str = "one_sided"
    periodic: tuple[bool, ...] | None = None

    def __post_init__(self):
        if self.boundary_policy not in BOUNDARY_POLICIES:
            raise ConfigError(f"boundary policy must be one of {BOUNDARY_POLICIES}")
        axes = tuple(np.asarray(ax, dtype=float) for ax in self.axes)
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "points", np.asarray(self.points, dtype=float))
        if len(axes) < 1:
            raise ConfigError("patch needs at least one parameter axis")
        for ax in axes:
            if ax.ndim != 1 or ax.size < 2:
                raise ConfigError("each axis must be a 1-d array of >= 2 nodes")
            steps = np.diff(ax)
            if np.any(steps <= 0):
                raise ConfigError("axis nodes must be strictly increasing")
            if np.max(np.abs(steps - steps[0])) > 1e-9 * abs(steps[0]):
                raise ConfigError("axis nodes must be uniformly spaced")
        if self.periodic is None:
            flags = (False,) * len(axes)
        else:
            flags = tuple(bool(p) for p in self.periodic)
            if len(flags) != len(axes):
                raise ConfigError("periodic flags must match the number of axes")
        object.__setattr__(self, "periodic", flags)
        grid = tuple(ax.size for ax in axes)
        if self.points.shape[:-1] != grid:
            raise ShapeMismatch(
                f"points shape {self.points.shape} does not match grid {grid}"
            )
        if not np.all(np.isfinite(self.points)):
            raise ConfigError("patch points must be finite")

    @property
    def nparams(self) -> int:
        return len(self.axes)

    @property
    def ambient_dim(self) -> int:
        return self.points.shape[-1]

    @property
    def grid_shape(self) -> tuple[int, ...]:
        return self.points.shape[:-1]

    @property
    def spacings(self) -> tuple[float, ...]:
        return tuple(float(ax[1] - ax[0]) for ax in self.axes)

    def interior_mask(self, margin: int) -> np.ndarray:
        """Boolean grid mask keeping nodes >= margin layers from each face.

        Periodic axes have no faces and are never trimmed.
        """
        mask = np.ones(self.grid_shape, dtype=bool)
        if margin <= 0:
            return mask
        for a, size in enumerate(self.grid_shape):
            if self.periodic[a]:
                continue
            if size <= 2 * margin:
                raise ConfigError("margin leaves no interior nodes")
            idx = [slice(None)] * len(self.grid_shape)
            idx[a] = slice(0, margin)
            mask[tuple(idx)] = False
            idx[a] = slice(size - margin, size)
            mask[tuple(idx)] = False
        return mask

    def report_mask(self, margin: int) -> np.ndarray:
        """Interior mask honoring the boundary policy (trim drops the rim)."""
        if self.boundary_policy == "trim":
            return self.interior_mask(max(margin, 1))
        return self.interior_mask(margin)

    def scaled(self, c: float) -> "SurfacePatch":
        if c <= 0:
            raise ConfigError("scale factor must be positive")
        return SurfacePatch(
            axes=self.axes,
            points=self.points * c,
            boundary_policy=self.boundary_policy,
            periodic=self.periodic,
        )

    def transformed(self, matrix: np.ndarray) -> "SurfacePatch":
        matrix = np.asarray(matrix, dtype=float)
        return SurfacePatch(
            axes=self.axes,
            points=self.points @ matrix.T,
            boundary_policy=self.boundary_policy,
            periodic=self.periodic,
        )

    def translated(self, v: np.ndarray) -> "SurfacePatch":
        v = np.asarray(v, dtype=float)
        return SurfacePatch(
            axes=self.axes,
            points=self.points + v,
            boundary_policy=self.boundary_policy,
            periodic=self.periodic,
        )

    def to_json_dict(self) -> dict:
        return {
            "axes": [ax.tolist() for ax in self.axes],
            "points": self.points.tolist(),
            "boundary_policy": self.boundary_policy,
            "periodic": list(self.periodic),
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "SurfacePatch":
        return cls(
            axes=tuple(np.asarray(a, dtype=float) for a in d["axes"]),
            points=np.asarray(d["points"], dtype=float),
            boundary_policy=d.get("boundary_policy", "one_sided"),
            periodic=tuple(d["periodic"]) if "periodic" in d else None,
        )


@dataclass(frozen=True)
class ScalarField:
    """Scalar samples on the grid of a patch."""

    patch: SurfacePatch
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.values.shape != self.patch.grid_shape:
            raise ShapeMismatch(
                f"field shape {self.values.shape} != grid {self.patch.grid_shape}"
            )


@dataclass(frozen=True)
class GeometryFields:
    """First and second fundamental data of a patch.

    ``tangents`` has shape grid + (d, m); ``g``, ``g_inv``, ``h`` have shape
    grid + (d, d); ``nu`` has shape grid + (m,); ``H`` and ``A2`` are scalars
    on the grid.
    """

    patch: SurfacePatch | None
    tangents: np.ndarray
    g: np.ndarray
    g_inv: np.ndarray
    det_g: np.ndarray
    h: np.ndarray
    nu: np.ndarray
    H: np.ndarray
    A2: np.ndarray

    @property
    def unit_normal(self) -> np.ndarray:
        return self.nu


# ---------------------------------------------------------------------------
# fundamental forms


def _resolve_orientation(nu_raw: np.ndarray, points: np.ndarray, orient) -> float:
    """Single sign for the whole patch from a reference direction.

    ``orient`` may be None (keep the raw cofactor normal), a constant ambient
    vector, an array of reference vectors on the grid, or a callable mapping
    points to reference vectors.  The sign is fixed at the node where the
    raw normal is best aligned with the reference.
    """
    if orient is None:
        return 1.0
    if callable(orient):
        ref = np.asarray(orient(points), dtype=float)
    else:
        ref = np.asarray(orient, dtype=float)
        if ref.shape == nu_raw.shape[-1:]:
            ref = np.broadcast_to(ref, nu_raw.shape)
    if ref.shape != nu_raw.shape:
        raise ShapeMismatch("orientation reference must broadcast to normal field shape")
    dots = np.einsum("...m,...m->...", nu_raw, ref)
    flat = np.argmax(np.abs(dots))
    anchor = dots.reshape(-1)[flat]
    if anchor == 0.0:
        raise DegenerateMetric("orientation reference is orthogonal to the normal")
    return 1.0 if anchor > 0 else -1.0


def fundamental_forms(
    patch: SurfacePatch,
    orient=None,
    det_floor: float = DET_FLOOR,
) -> GeometryFields:
    """Tangents, metric, normal, and second fundamental form of a patch."""
    d = patch.nparams
    m = patch.ambient_dim
    if m != d + 1:
        raise ConfigError(f"hypersurface patch needs ambient dim {d + 1}, got {m}")
    for size in patch.grid_shape:
        if size < 5:
            raise ConfigError("geometry stencils need at least 5 nodes per axis")
    pts = patch.points
    spac = patch.spacings
    per = patch.periodic

    tangents = np.stack(
        [diff1(pts, spac[a], axis=a, periodic=per[a]) for a in range(d)], axis=-2
    )
    g = np.einsum("...am,...bm->...ab", tangents, tangents)
    det_g = np.linalg.det(g)
    if np.any(det_g < det_floor):
        raise DegenerateMetric(
            f"metric determinant fell below {det_floor:g} (min {det_g.min():.3g})"
        )
    g_inv = np.linalg.inv(g)

    # cofactor normal: N_k = (-1)^k det(tangent rows with column k removed)
    nu = np.empty(pts.shape)
    cols = np.arange(m)
    for k in range(m):
        sub = tangents[..., :, cols != k]
        nu[..., k] = (-1.0) ** k * np.linalg.det(sub)
    norm = np.sqrt(np.einsum("...m,...m->...", nu, nu))
    if np.any(norm <= 0):
        raise DegenerateMetric("vanishing normal vector")
    nu = nu / norm[..., None]
    nu = nu * _resolve_orientation(nu, pts, orient)

    h = np.empty(g.shape)
    for a in range(d):
        for b in range(a, d):
            if a == b:
                second = diff2(pts, spac[a], axis=a, periodic=per[a])
            else:
                second = diff_mixed(pts, spac[a], a, spac[b], b, per[a], per[b])
            h_ab = np.einsum("...m,...m->...", second, nu)
            h[..., a, b] = h_ab
            h[..., b, a] = h_ab

    shape_op = np.einsum("...ab,...bc->...ac", g_inv, h)
    H = np.trace(shape_op, axis1=-2, axis2=-1)
    A2 = np.einsum("...ab,...ba->...", shape_op, shape_op)
    return GeometryFields(
        patch=patch,
        tangents=tangents,
        g=g,
        g_inv=g_inv,
        det_g=det_g,
        h=h,
        nu=nu,
        H=H,
        A2=A2,
    )


# ---------------------------------------------------------------------------
# intrinsic operators on scalar fields


def _field_values(fields: GeometryFields, f) -> np.ndarray:
    if isinstance(f, ScalarField):
        if fields.patch is not None and f.patch is not fields.patch:
            if f.values.shape != fields.H.shape:
                raise ShapeMismatch("scalar field lives on a different grid")
        return f.values
    values = np.asarray(f, dtype=float)
    if values.shape != fields.H.shape:
        raise ShapeMismatch(f"field shape {values.shape} != grid {fields.H.shape}")
    return values


def gradient(fields: GeometryFields, f) -> np.ndarray:
    """Intrinsic gradient as an ambient vector field: g^{ab} (d_b f) T_a."""
    patch = fields.patch
    if patch is None:
        raise ConfigError("gradient needs a patch with grid spacings")
    values = _field_values(fields, f)
    d = patch.nparams
    spac = patch.spacings
    per = patch.periodic
    df = np.stack(
        [diff1(values, spac[b], axis=b, periodic=per[b]) for b in range(d)], axis=-1
    )
    return np.einsum("...ab,...b,...am->...m", fields.g_inv, df, fields.tangents)


def ambient_gradient_pairing(fields: GeometryFields, f, vectors: np.ndarray) -> np.ndarray:
    """<vectors, grad f> with grad taken intrinsically."""
    grad = gradient(fields, f)
    return np.einsum("...m,...m->...", np.asarray(vectors, dtype=float), grad)


def laplace_beltrami(fields: GeometryFields, f) -> np.ndarray:
    """Divergence-form Laplace-Beltrami operator on the grid."""
    patch = fields.patch
    if patch is None:
        raise ConfigError("laplacian needs a patch with grid spacings")
    values = _field_values(fields, f)
    d = patch.nparams
    spac = patch.spacings
    per = patch.periodic
    sqrt_g = np.sqrt(fields.det_g)
    df = np.stack(
        [diff1(values, spac[b], axis=b, periodic=per[b]) for b in range(d)], axis=-1
    )
    flux = sqrt_g[..., None] * np.einsum("...ab,...b->...a", fields.g_inv, df)
    out = np.zeros_like(values)
    for a in range(d):
        out += diff1(flux[..., a], spac[a], axis=a, periodic=per[a])
    return out / sqrt_g


def stability_operator(fields: GeometryFields, f) -> np.ndarray:
    """L f = Lap f + (1/2) <F, grad f> + (|A|^2 - 1/2) f."""
    if fields.patch is None:
        raise ConfigError("stability operator needs a patch with grid spacings")
    values = _field_values(fields, f)
    lap = laplace_beltrami(fields, values)
    drift = ambient_gradient_pairing(fields, values, fields.patch.points)
    return lap + 0.5 * drift + (fields.A2 - 0.5) * values


def support_function(fields: GeometryFields, w) -> np.ndarray:
    """<W, nu> for W a constant vector, a matrix acting on position, or a map.

    A constant ambient vector V gives the translation support <V, nu>; an
    antisymmetric matrix K gives the rotation support <K F, nu>.
    """
    pts = fields.patch.points if fields.patch is not None else None
    if callable(w):
        vec = np.asarray(w(pts), dtype=float)
    else:
        w = np.asarray(w, dtype=float)
        if w.ndim == 1:
            vec = np.broadcast_to(w, fields.nu.shape)
        elif w.ndim == 2:
            if pts is None:
                raise ConfigError("matrix support function needs patch points")
            vec = pts @ w.T
        else:
            raise ConfigError("support generator must be a vector, matrix, or callable")
    if vec.shape != fields.nu.shape:
        raise ShapeMismatch("support generator field does not match the grid")
    return np.einsum("...m,...m->...", vec, fields.nu)


def rotation_generator(axis: np.ndarray, ambient_dim: int) -> np.ndarray:
    """Antisymmetric matrix of the unit-speed rotation fixing ``axis``.

    The rotation plane is spanned by the first two coordinate directions
    most orthogonal to the axis (stable tie-break by index), orthonormalized
    against the axis, so the generator is deterministic.
    """
    axis = np.asarray(axis, dtype=float)
    if axis.shape != (ambient_dim,):
        raise ConfigError(f"axis must be a vector of length {ambient_dim}")
    norm = np.linalg.norm(axis)
    if norm == 0:
        raise ConfigError("axis vector must be nonzero")
    u = axis / norm
    order = np.argsort(np.abs(u), kind="stable")
    basis = []
    for idx in order:
        e = np.zeros(ambient_dim)
        e[idx] = 1.0
        v = e - (e @ u) * u
        for b in basis:
            v = v - (v @ b) * b
        norm_v = np.linalg.norm(v)
        if norm_v > 1e-12:
            basis.append(v / norm_v)
        if len(basis) == 2:
            break
    if len(basis) < 2:
        raise ConfigError("could not build a rotation plane orthogonal to the axis")
    a, b = basis
    return np.outer(b, a) - np.outer(a, b)


def plane_rotation(i: int, j: int, ambient_dim: int) -> np.ndarray:
    """Antisymmetric generator of the rotation in the (e_i, e_j) plane.

    In four or more dimensions an axis no longer pins down a rotation plane,
    so callers that need a specific plane (for instance the one a revolution
    grid realizes exactly) name it by its two coordinate indices.
    """
    if not (0 <= i < ambient_dim and 0 <= j < ambient_dim) or i == j:
        raise ConfigError(
            f"plane indices must be distinct and lie in [0, {ambient_dim}): got ({i}, {j})"
        )
    K = np.zeros((ambient_dim, ambient_dim))
    K[j, i] = 1.0
    K[i, j] = -1.0
    return K


def field_norms(values: np.ndarray, patch: SurfacePatch, margin: int = 0) -> tuple[float, float]:
    """(sup, root-mean-square) of |values| over the report mask."""
    mask = patch.report_mask(margin)
    v = np.abs(np.asarray(values, dtype=float)[mask])
    if v.size == 0:
        raise ConfigError("no nodes left after masking")
    return float(v.max()), float(np.sqrt(np.mean(v**2)))
