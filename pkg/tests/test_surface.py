"""Discrete hypersurface geometry: stencils, patches, forms, operators.

Two exactness facts drive the strongest oracles here.  All stencils in use
(central interior, second-order one-sided at faces) are exact on quadratic
data, so on a quadratic embedding -- a paraboloid graph -- the entire
pipeline from tangents through the shape operator reproduces the closed-form
geometry to rounding, boundary rows included.  And on a periodic axis the
wrap stencils applied to sin/cos have their own closed forms, which pins the
seam handling.
"""
from __future__ import annotations

import math

import numpy as np
import pytest

from expanders.errors import ConfigError, DegenerateMetric, ShapeMismatch
from expanders.reports import fit_loglog_slope
from expanders.surface import (
    BOUNDARY_POLICIES,
    GeometryFields,
    ScalarField,
    SurfacePatch,
    ambient_gradient_pairing,
    diff1,
    diff2,
    diff_mixed,
    field_norms,
    fundamental_forms,
    gradient,
    laplace_beltrami,
    plane_rotation,
    rotation_generator,
    stability_operator,
    support_function,
    wraps_period,
)

from conftest import sphere_patch


def flat_patch(size=17, lo=0.5, hi=1.5):
    """A rectangle of the z = 0 plane in R^3."""
    ax = np.linspace(lo, hi, size)
    X, Y = np.meshgrid(ax, ax, indexing="ij")
    points = np.stack([X, Y, np.zeros_like(X)], axis=-1)
    return SurfacePatch(axes=(ax, ax), points=points)


def paraboloid_patch(size=33, lo=0.5, hi=1.5, c=0.25):
    ax = np.linspace(lo, hi, size)
    X, Y = np.meshgrid(ax, ax, indexing="ij")
    points = np.stack([X, Y, c * (X**2 + Y**2)], axis=-1)
    return SurfacePatch(axes=(ax, ax), points=points), (X, Y, c)


def paraboloid_closed_forms(X, Y, c):
    """Graph geometry of u = c (x^2 + y^2) from first principles."""
    ux, uy = 2 * c * X, 2 * c * Y
    uxx = uyy = 2 * c
    W = np.sqrt(1.0 + ux**2 + uy**2)
    nu = np.stack([-ux, -uy, np.ones_like(X)], axis=-1) / W[..., None]
    g = np.empty(X.shape + (2, 2))
    g[..., 0, 0] = 1 + ux**2
    g[..., 0, 1] = g[..., 1, 0] = ux * uy
    g[..., 1, 1] = 1 + uy**2
    h = np.empty_like(g)
    h[..., 0, 0] = uxx / W
    h[..., 0, 1] = h[..., 1, 0] = 0.0
    h[..., 1, 1] = uyy / W
    shape_op = np.linalg.solve(g, h)
    H = np.trace(shape_op, axis1=-2, axis2=-1)
    A2 = np.einsum("...ab,...ba->...", shape_op, shape_op)
    return g, h, nu, H, A2


class TestStencils:
    def test_quadratics_are_differentiated_exactly(self):
        ax = np.linspace(0.0, 2.0, 9)
        U, V = np.meshgrid(ax, ax, indexing="ij")
        f = 2.0 + 3.0 * U - 1.5 * V + 0.25 * U**2 + U * V - 0.75 * V**2
        h = ax[1] - ax[0]
        assert np.max(np.abs(diff1(f, h, 0) - (3.0 + 0.5 * U + V))) < 1e-12
        assert np.max(np.abs(diff1(f, h, 1) - (-1.5 + U - 1.5 * V))) < 1e-12
        assert np.max(np.abs(diff2(f, h, 0) - 0.5)) < 1e-12
        assert np.max(np.abs(diff2(f, h, 1) + 1.5)) < 1e-12
        assert np.max(np.abs(diff_mixed(f, h, 0, h, 1) - 1.0)) < 1e-12

    def test_periodic_wrap_closed_forms(self):
        # On the circle the central difference of sin is cos * sin(h)/h and
        # the second difference is sin * (2 cos(h) - 2)/h^2, exactly.
        N = 24
        th = np.linspace(0.0, 2 * math.pi, N, endpoint=False)
        h = th[1] - th[0]
        v = np.sin(th)
        d1 = diff1(v, h, 0, periodic=True)
        d2 = diff2(v, h, 0, periodic=True)
        assert np.max(np.abs(d1 - np.cos(th) * math.sin(h) / h)) < 1e-14
        assert np.max(np.abs(d2 - v * (2 * math.cos(h) - 2) / h**2)) < 1e-13

    def test_periodic_stencils_are_shift_equivariant(self):
        rng = np.random.default_rng(7)
        v = rng.standard_normal(16)
        d = diff1(v, 0.3, 0, periodic=True)
        assert np.array_equal(diff1(np.roll(v, 5), 0.3, 0, periodic=True),
                              np.roll(d, 5))

    def test_diff2_needs_four_nodes(self):
        with pytest.raises(ConfigError):
            diff2(np.zeros(3), 0.1, 0)


class TestWrapsPeriod:
    def test_full_circle_without_endpoint(self):
        assert wraps_period(np.linspace(0, 2 * math.pi, 40, endpoint=False))

    def test_endpoint_grid_does_not_wrap(self):
        assert not wraps_period(np.linspace(0, 2 * math.pi, 41))

    def test_partial_arc_does_not_wrap(self):
        assert not wraps_period(np.linspace(0.2, 5.8, 32))

    def test_too_few_nodes(self):
        assert not wraps_period(np.array([0.0, math.pi]))

    def test_custom_period(self):
        assert wraps_period(np.linspace(0, 1, 10, endpoint=False), period=1.0)


class TestSurfacePatch:
    def test_validation_errors(self):
        ax = np.linspace(0, 1, 5)
        pts = np.zeros((5, 5, 3))
        pts[..., 0] = ax[:, None]
        pts[..., 1] = ax[None, :]
        SurfacePatch(axes=(ax, ax), points=pts)
        with pytest.raises(ConfigError):
            SurfacePatch(axes=(ax, ax), points=pts, boundary_policy="mirror")
        with pytest.raises(ConfigError):
            SurfacePatch(axes=(np.array([0.0, 0.5, 0.6]), ), points=np.zeros((3, 2)))
        with pytest.raises(ConfigError):
            SurfacePatch(axes=(ax[::-1], ax), points=pts)
        with pytest.raises(ShapeMismatch):
            SurfacePatch(axes=(ax, ax), points=np.zeros((5, 4, 3)))
        with pytest.raises(ConfigError):
            SurfacePatch(axes=(ax, ax), points=pts, periodic=(True,))
        bad = pts.copy()
        bad[0, 0, 0] = np.nan
        with pytest.raises(ConfigError):
            SurfacePatch(axes=(ax, ax), points=bad)

    def test_basic_properties(self):
        patch = flat_patch(9)
        assert patch.nparams == 2
        assert patch.ambient_dim == 3
        assert patch.grid_shape == (9, 9)
        assert patch.spacings == (0.125, 0.125)
        assert patch.periodic == (False, False)

    def test_interior_mask_counts(self):
        patch = flat_patch(9)
        mask = patch.interior_mask(2)
        assert mask.sum() == 5 * 5
        assert mask[0, 4] == False  # noqa: E712
        assert mask[4, 4] == True  # noqa: E712
        assert patch.interior_mask(0).all()
        with pytest.raises(ConfigError):
            patch.interior_mask(5)

    def test_periodic_axes_are_never_trimmed(self):
        ax = np.linspace(0, 1, 9)
        azi = np.linspace(0, 2 * math.pi, 8, endpoint=False)
        pts = np.zeros((9, 8, 3))
        pts[..., 0] = ax[:, None]
        pts[..., 1] = np.cos(azi)[None, :]
        pts[..., 2] = np.sin(azi)[None, :]
        patch = SurfacePatch(axes=(ax, azi), points=pts, periodic=(False, True))
        mask = patch.interior_mask(3)
        assert mask.sum() == 3 * 8

    def test_report_mask_honors_trim_policy(self):
        patch = flat_patch(9)
        trimmed = SurfacePatch(axes=patch.axes, points=patch.points,
                               boundary_policy="trim")
        assert "trim" in BOUNDARY_POLICIES
        assert trimmed.report_mask(0).sum() == 7 * 7
        assert patch.report_mask(0).sum() == 9 * 9

    def test_transforms(self):
        patch = flat_patch(9)
        assert np.array_equal(patch.scaled(2.0).points, 2.0 * patch.points)
        assert np.array_equal(patch.translated(np.array([1, 2, 3.0])).points,
                              patch.points + np.array([1, 2, 3.0]))
        R = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
        assert np.allclose(patch.transformed(R).points,
                           patch.points @ R.T, atol=0)
        with pytest.raises(ConfigError):
            patch.scaled(0.0)

    def test_rigid_motions_preserve_curvature(self):
        patch, _ = paraboloid_patch(size=17)
        base = fundamental_forms(patch, orient=np.array([0, 0, 1.0]))
        theta = 0.4
        R = np.array([
            [math.cos(theta), -math.sin(theta), 0.0],
            [math.sin(theta), math.cos(theta), 0.0],
            [0.0, 0.0, 1.0],
        ])
        moved = patch.transformed(R).translated(np.array([0.3, -0.2, 5.0]))
        rot = fundamental_forms(moved, orient=np.array([0, 0, 1.0]))
        assert np.max(np.abs(rot.H - base.H)) < 1e-11
        assert np.max(np.abs(rot.A2 - base.A2)) < 1e-11
        assert np.max(np.abs(rot.g - base.g)) < 1e-11

    def test_json_round_trip(self):
        ax = np.linspace(0, 1, 6)
        azi = np.linspace(0, 2 * math.pi, 8, endpoint=False)
        pts = np.random.default_rng(3).uniform(1, 2, size=(6, 8, 3))
        patch = SurfacePatch(axes=(ax, azi), points=pts,
                             boundary_policy="trim", periodic=(False, True))
        clone = SurfacePatch.from_json_dict(patch.to_json_dict())
        assert all(np.array_equal(a, b) for a, b in zip(clone.axes, patch.axes))
        assert np.array_equal(clone.points, patch.points)
        assert clone.periodic == (False, True)
        assert clone.boundary_policy == "trim"

    def test_scalar_field_shape_check(self):
        patch = flat_patch(9)
        ScalarField(patch, np.zeros((9, 9)))
        with pytest.raises(ShapeMismatch):
            ScalarField(patch, np.zeros((9, 8)))


class TestFundamentalForms:
    def test_flat_plane_has_zero_curvature_exactly(self):
        fields = fundamental_forms(flat_patch(9), orient=np.array([0, 0, 1.0]))
        assert np.max(np.abs(fields.H)) < 1e-13
        assert np.max(np.abs(fields.A2)) < 1e-13
        assert np.allclose(fields.nu, np.array([0, 0, 1.0]), atol=1e-14)
        assert np.allclose(fields.g[..., 0, 0], 1.0, atol=1e-14)
        assert np.allclose(fields.det_g, 1.0, atol=1e-13)

    def test_paraboloid_pipeline_is_exact(self):
        # Quadratic embedding: every stencil is exact, so the assembled
        # geometry must match the closed forms to rounding -- boundary
        # rows included.  This exercises tangents, the cofactor normal,
        # orientation, and the shape-operator traces end to end.
        patch, (X, Y, c) = paraboloid_patch(size=21)
        g, h, nu, H, A2 = paraboloid_closed_forms(X, Y, c)
        fields = fundamental_forms(patch, orient=np.array([0, 0, 1.0]))
        assert np.max(np.abs(fields.g - g)) < 1e-12
        assert np.max(np.abs(fields.h - h)) < 1e-12
        assert np.max(np.abs(fields.nu - nu)) < 1e-12
        assert np.max(np.abs(fields.H - H)) < 1e-12
        assert np.max(np.abs(fields.A2 - A2)) < 1e-12

    def test_sphere_curvature_converges(self):
        # Inward-oriented round sphere of radius 2: H -> dim/2, A2 -> 1/2.
        sups = []
        spacings = []
        for size, margin in ((17, 2), (33, 4), (65, 8)):
            patch, orient = sphere_patch(radius=2.0, size=size)
            fields = fundamental_forms(patch, orient=orient)
            sup, _ = field_norms(fields.H - 1.0, patch, margin)
            sups.append(sup)
            spacings.append(patch.spacings[0])
            if size == 65:
                supA, _ = field_norms(fields.A2 - 0.5, patch, margin)
                assert supA < 2e-3
        assert fit_loglog_slope(spacings, sups) > 1.9

    def test_orientation_controls_sign(self):
        patch, orient = sphere_patch(radius=2.0, size=17)
        inward = fundamental_forms(patch, orient=orient)
        outward = fundamental_forms(patch, orient=lambda pts: pts)
        assert np.allclose(inward.H, -outward.H, atol=0)
        assert np.allclose(inward.nu, -outward.nu, atol=0)
        with pytest.raises(ShapeMismatch):
            fundamental_forms(patch, orient=np.zeros((3, 3, 3)))

    def test_degenerate_grid_is_rejected(self):
        ax = np.linspace(0, 1, 6)
        pts = np.zeros((6, 6, 3))
        pts[..., 0] = ax[:, None]  # constant along the second axis
        with pytest.raises(DegenerateMetric):
            fundamental_forms(SurfacePatch(axes=(ax, ax), points=pts))

    def test_dimension_and_size_guards(self):
        ax = np.linspace(0, 1, 6)
        with pytest.raises(ConfigError):
            # ambient dimension must exceed the parameter count by one
            fundamental_forms(SurfacePatch(axes=(ax,), points=np.zeros((6, 3))))
        small = flat_patch(4)
        with pytest.raises(ConfigError):
            fundamental_forms(small)


class TestOperators:
    def test_gradient_and_laplacian_exact_on_flat_quadratic(self):
        patch = flat_patch(9)
        fields = fundamental_forms(patch, orient=np.array([0, 0, 1.0]))
        X = patch.points[..., 0]
        Y = patch.points[..., 1]
        f = X**2 + Y**2
        grad = gradient(fields, f)
        assert np.max(np.abs(grad[..., 0] - 2 * X)) < 1e-12
        assert np.max(np.abs(grad[..., 1] - 2 * Y)) < 1e-12
        assert np.max(np.abs(grad[..., 2])) < 1e-12
        lap = laplace_beltrami(fields, f)
        assert np.max(np.abs(lap - 4.0)) < 1e-11
        pair = ambient_gradient_pairing(fields, f, patch.points)
        assert np.max(np.abs(pair - 2 * f)) < 1e-11

    def test_scalar_field_wrapper_accepted(self):
        patch = flat_patch(9)
        fields = fundamental_forms(patch, orient=np.array([0, 0, 1.0]))
        f = ScalarField(patch, patch.points[..., 0])
        grad = gradient(fields, f)
        assert np.max(np.abs(grad[..., 0] - 1.0)) < 1e-12
        with pytest.raises(ShapeMismatch):
            gradient(fields, np.zeros((3, 3)))

    def test_sphere_eigenfunction_of_laplacian(self):
        # On the radius-rho sphere, coordinates are eigenfunctions:
        # Lap x_i = -(dim / rho^2) x_i.
        patch, orient = sphere_patch(radius=2.0, size=49)
        fields = fundamental_forms(patch, orient=orient)
        f = patch.points[..., 2]
        lap = laplace_beltrami(fields, f)
        sup, _ = field_norms(lap + 0.5 * f, patch, margin=6)
        assert sup < 2e-3

    def test_stability_operator_matches_its_parts(self):
        patch, orient = sphere_patch(radius=2.0, size=17)
        fields = fundamental_forms(patch, orient=orient)
        f = patch.points[..., 0] * patch.points[..., 1]
        explicit = (laplace_beltrami(fields, f)
                    + 0.5 * ambient_gradient_pairing(fields, f, patch.points)
                    + (fields.A2 - 0.5) * f)
        assert np.array_equal(stability_operator(fields, f), explicit)


class TestSupportFunction:
    def test_vector_matrix_and_callable_forms_agree(self):
        patch, orient = sphere_patch(radius=2.0, size=17)
        fields = fundamental_forms(patch, orient=orient)
        V = np.array([0.3, -1.2, 0.7])
        by_vector = support_function(fields, V)
        assert np.allclose(by_vector,
                           np.einsum("m,...m->...", V, fields.nu), atol=0)
        K = plane_rotation(0, 1, 3)
        by_matrix = support_function(fields, K)
        manual = np.einsum("...m,...m->...", patch.points @ K.T, fields.nu)
        assert np.array_equal(by_matrix, manual)
        by_callable = support_function(fields, lambda pts: pts @ K.T)
        assert np.array_equal(by_callable, by_matrix)

    def test_bad_generator_shapes_rejected(self):
        patch, orient = sphere_patch(radius=2.0, size=17)
        fields = fundamental_forms(patch, orient=orient)
        with pytest.raises(ConfigError):
            support_function(fields, np.zeros((3, 3, 3)))
        with pytest.raises(ShapeMismatch):
            support_function(fields, lambda pts: pts[..., :2])


class TestGenerators:
    def test_rotation_generator_properties(self):
        axis = np.array([0.3, -0.4, 0.5, 1.1])
        K = rotation_generator(axis, 4)
        assert np.allclose(K + K.T, 0.0, atol=1e-15)
        assert np.max(np.abs(K @ axis)) < 1e-13
        # unit speed: K acts as a rotation by 90 degrees on its plane, so
        # K^3 = -K
        assert np.allclose(K @ K @ K, -K, atol=1e-13)

    def test_rotation_generator_is_deterministic(self):
        axis = np.array([1.0, 1.0, 1.0])
        assert np.array_equal(rotation_generator(axis, 3),
                              rotation_generator(axis, 3))

    def test_rotation_generator_errors(self):
        with pytest.raises(ConfigError):
            rotation_generator(np.zeros(3), 3)
        with pytest.raises(ConfigError):
            rotation_generator(np.ones(2), 3)

    def test_plane_rotation_action(self):
        K = plane_rotation(0, 2, 4)
        e0 = np.eye(4)[0]
        e2 = np.eye(4)[2]
        assert np.array_equal(K @ e0, e2)
        assert np.array_equal(K @ e2, -e0)
        with pytest.raises(ConfigError):
            plane_rotation(1, 1, 3)
        with pytest.raises(ConfigError):
            plane_rotation(0, 3, 3)


class TestFieldNorms:
    def test_hand_computed_norms(self):
        patch = flat_patch(5)
        values = np.zeros((5, 5))
        values[2, 2] = -3.0
        values[0, 0] = 10.0  # trimmed away by the margin
        sup, rms = field_norms(values, patch, margin=1)
        assert sup == 3.0
        assert abs(rms - math.sqrt(9.0 / 9.0)) < 1e-15

    def test_empty_mask_rejected(self):
        patch = flat_patch(5)
        with pytest.raises(ConfigError):
            field_norms(np.zeros((5, 5)), patch, margin=3)
