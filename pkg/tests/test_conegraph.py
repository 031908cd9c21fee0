"""Graphs over cones: closed-form geometry against independent oracles.

Three cross-checks anchor this module.  The rank-one metric inverse is
compared against dense numpy inversion on random batches.  The zero graph
must reproduce the bare cone exactly.  And the closed-form curvature of a
decaying graph must agree, at second order, with the generic
finite-difference geometry engine run on the embedded points -- two
completely different code paths.
"""
from __future__ import annotations

import math

import numpy as np
import pytest

from expanders.cone import ConeSpec, cone_closed_forms, cone_frame
from expanders.conegraph import (
    GraphFunction,
    anisotropic_power_graph,
    asymptotics_report,
    axis_label,
    bump_graph,
    check_c2_decay,
    graph_embedding,
    graph_geometry,
    graph_metric,
    graph_normal,
    graph_second_form,
    radial_power_graph,
    sherman_morrison_inverse,
)
from expanders.errors import (
    ConfigError,
    ImmersionFailure,
    InsufficientAnnuli,
    ShapeMismatch,
)
from expanders.reports import dyadic_annuli, fit_loglog_slope
from expanders.surface import field_norms, fundamental_forms

RNG = np.random.default_rng(20260814)


def random_angles(d, size):
    theta = RNG.uniform(0.4, math.pi - 0.4, size=(size, d))
    theta[:, -1] = RNG.uniform(0.0, 2 * math.pi, size=size)
    return theta


class TestShermanMorrison:
    def test_matches_dense_inverse_on_random_batches(self):
        for _ in range(200):
            d = int(RNG.integers(1, 5))
            M = RNG.uniform(0.5, 3.0, size=d)
            eta = RNG.uniform(-1.0, 1.0, size=d)
            inv = sherman_morrison_inverse(M, eta)
            dense = np.diag(M) + np.outer(eta, eta)
            assert np.max(np.abs(inv - np.linalg.inv(dense))) < 1e-10
            assert np.max(np.abs(inv @ dense - np.eye(d))) < 1e-12

    def test_batched_shapes(self):
        M = RNG.uniform(0.5, 2.0, size=(6, 7, 3))
        eta = RNG.uniform(-0.5, 0.5, size=(6, 7, 3))
        inv = sherman_morrison_inverse(M, eta)
        assert inv.shape == (6, 7, 3, 3)
        dense = np.zeros((6, 7, 3, 3))
        idx = np.arange(3)
        dense[..., idx, idx] = M
        dense += eta[..., :, None] * eta[..., None, :]
        assert np.max(np.abs(inv @ dense - np.eye(3))) < 1e-12

    def test_guards(self):
        with pytest.raises(ImmersionFailure):
            sherman_morrison_inverse(np.array([1.0, 0.0]), np.zeros(2))
        with pytest.raises(ShapeMismatch):
            sherman_morrison_inverse(np.ones(3), np.ones(2))


class TestZeroGraphIsTheCone:
    def test_geometry_reduces_exactly(self):
        spec = ConeSpec(3, 0.8)
        gf = radial_power_graph(0.0, 1.0)
        theta = random_angles(2, 25)
        r = RNG.uniform(0.5, 4.0, size=25)
        geo = graph_geometry(spec, gf, r, theta)
        F, _, nu_cone = cone_frame(spec, r, theta)
        H_exact, A2_exact = cone_closed_forms(spec, r)
        assert np.max(np.abs(geo.points - F)) < 1e-14
        assert np.max(np.abs(geo.nu - nu_cone)) < 1e-14
        assert np.max(np.abs(geo.H - H_exact)) < 1e-13
        assert np.max(np.abs(geo.A2 - A2_exact)) < 1e-13
        assert np.allclose(geo.Z, math.sin(spec.alpha), atol=1e-15)
        assert np.allclose(geo.det_g, np.prod(geo.metric_parts.M_diag, axis=-1),
                           atol=1e-13)


class TestJetConsistency:
    def test_radial_power_jet(self):
        gf = radial_power_graph(0.7, 1.5)
        theta = random_angles(2, 8)
        r = RNG.uniform(1.0, 4.0, size=8)
        assert gf.check_jet_consistency(r, theta) < 1e-4

    def test_anisotropic_jet(self):
        gf = anisotropic_power_graph(0.4, 1.0, np.array([0.3, -0.2, 0.1, 0.25]))
        theta = random_angles(3, 8)
        r = RNG.uniform(1.0, 4.0, size=8)
        assert gf.check_jet_consistency(r, theta) < 1e-4

    def test_bump_jet_including_support_edges(self):
        gf = bump_graph(0.8, 1.0, 3.0)
        theta = random_angles(1, 40)
        r = np.linspace(0.5, 3.5, 40)  # spans both edges and the outside
        assert gf.check_jet_consistency(r, theta) < 1e-4

    def test_inconsistent_jet_is_caught(self):
        good = radial_power_graph(0.7, 1.5)
        bad = GraphFunction(good.value,
                            lambda r, th: good.jet(np.asarray(r) * 1.1, th))
        with pytest.raises(ConfigError):
            bad.check_jet_consistency(np.array([2.0]), np.array([[1.0]]))

    def test_fd_jet_requires_nothing_but_values(self):
        gf = GraphFunction(lambda r, th: 0.3 * np.asarray(r) ** -1.0
                           * np.ones(np.broadcast_shapes(np.shape(r),
                                                         np.shape(th)[:-1])))
        with pytest.raises(ShapeMismatch):
            gf.check_jet_consistency(np.array([2.0]), np.array([[1.0]]))
        ana = radial_power_graph(0.3, 1.0)
        num = gf.jet(np.array([2.0]), np.array([[1.0]]))
        ref = ana.jet(np.array([2.0]), np.array([[1.0]]))
        assert abs(num.ur[0] - ref.ur[0]) < 1e-7
        assert abs(num.urr[0] - ref.urr[0]) < 1e-5

    def test_constructor_guards(self):
        with pytest.raises(ConfigError):
            GraphFunction(3.0)
        with pytest.raises(ConfigError):
            GraphFunction(lambda r, th: r, fd_step=0.0)


class TestGraphFamilies:
    def test_bump_support(self):
        gf = bump_graph(2.0, 1.0, 2.0)
        theta = np.zeros((5, 1))
        r = np.array([0.5, 1.0, 1.5, 2.0, 3.0])
        u = gf.value(r, theta)
        assert u[0] == 0.0 and u[1] == 0.0 and u[3] == 0.0 and u[4] == 0.0
        assert u[2] == 2.0 * (0.25) ** 3
        jet = gf.jet(r, theta)
        assert jet.ur[0] == 0.0 and jet.urr[-1] == 0.0
        with pytest.raises(ConfigError):
            bump_graph(1.0, 2.0, 1.0)

    def test_anisotropic_weights_length_checked(self):
        gf = anisotropic_power_graph(0.4, 1.0, np.array([0.3, 0.1]))
        with pytest.raises(ShapeMismatch):
            gf.value(np.array([2.0]), np.array([[1.0, 1.0]]))

    def test_anisotropic_height_varies_over_cross_section(self):
        gf = anisotropic_power_graph(0.4, 1.0, np.array([0.0, 0.5, 0.0]))
        r = np.array([2.0, 2.0])
        theta = np.array([[1.0, 0.0], [1.0, math.pi]])
        u = gf.value(r, theta)
        assert abs(u[0] - u[1]) > 1e-3


class TestGraphGeometry:
    def test_wrappers_split_one_evaluation(self):
        spec = ConeSpec(2, 0.9)
        gf = radial_power_graph(0.3, 1.0)
        r = np.array([1.5, 2.5])
        theta = np.array([[0.3], [1.2]])
        parts, g, g_inv = graph_metric(spec, gf, r, theta)
        N, nu = graph_normal(spec, gf, r, theta)
        h = graph_second_form(spec, gf, r, theta)
        geo = graph_geometry(spec, gf, r, theta)
        assert np.array_equal(g, geo.g)
        assert np.array_equal(nu, geo.nu)
        assert np.array_equal(h, geo.h)
        assert np.max(np.abs(g @ g_inv - np.eye(2))) < 1e-12
        assert np.allclose(np.linalg.norm(nu, axis=-1), 1.0, atol=1e-14)
        # normal orthogonal to tangents
        dots = np.einsum("...am,...m->...a", geo.tangents, nu)
        assert np.max(np.abs(dots)) < 1e-12

    def test_immersion_failure_when_graph_leaves_chart(self):
        spec = ConeSpec(2, 0.8)
        gf = radial_power_graph(10.0, 0.5)
        with pytest.raises(ImmersionFailure):
            graph_geometry(spec, gf, np.array([1.0]), np.array([[0.5]]))

    def test_positive_radius_and_angle_count_enforced(self):
        spec = ConeSpec(3, 0.8)
        gf = radial_power_graph(0.1, 1.0)
        with pytest.raises(ConfigError):
            graph_geometry(spec, gf, np.array([0.0]), np.array([[1.0, 1.0]]))
        with pytest.raises(ShapeMismatch):
            graph_geometry(spec, gf, np.array([1.0]), np.array([[1.0]]))

    def test_closed_forms_match_discrete_engine(self):
        # The closed-form jet geometry and the generic finite-difference
        # engine agree on the embedded patch at second order.
        spec = ConeSpec(2, 0.8)
        gf = radial_power_graph(0.5, 1.0)
        sups = []
        spacings = []
        for size, margin in ((17, 2), (33, 4), (65, 8)):
            r_nodes = np.linspace(1.5, 3.5, size)
            azimuth = np.linspace(0.0, 2 * math.pi, size, endpoint=False)
            patch, geo = graph_embedding(spec, gf, r_nodes, (azimuth,))
            fields = fundamental_forms(patch, orient=geo.nu)
            sup, _ = field_norms(fields.H - geo.H, patch, margin)
            sups.append(sup)
            spacings.append(patch.spacings[0])
        assert fit_loglog_slope(spacings, sups) > 1.9
        assert sups[-1] < 5e-3

    def test_embedding_marks_full_azimuth_periodic(self):
        spec = ConeSpec(2, 0.8)
        gf = radial_power_graph(0.2, 1.0)
        r_nodes = np.linspace(1.0, 2.0, 9)
        azimuth = np.linspace(0.0, 2 * math.pi, 10, endpoint=False)
        patch, _ = graph_embedding(spec, gf, r_nodes, (azimuth,))
        assert patch.periodic == (False, True)
        with pytest.raises(ConfigError):
            graph_embedding(spec, gf, r_nodes, (azimuth, azimuth))


class TestAsymptotics:
    def test_decaying_graph_approaches_its_cone(self):
        spec = ConeSpec(3, 0.8)
        gf = anisotropic_power_graph(0.4, 1.0, np.array([0.3, -0.2, 0.1]))
        annuli = dyadic_annuli(1.5, 4)
        axis = np.zeros(4)
        axis[-1] = 1.0
        report = asymptotics_report(spec, gf, annuli, axes=(axis,), nr=8,
                                    ntheta=8)
        for q in ("cone_gap", "normal_gap", "f_R[e4]"):
            assert report.monotone_nonincreasing(q), q
        assert report.sups("cone_gap")[-1] < report.sups("cone_gap")[0]

    def test_needs_three_annuli(self):
        spec = ConeSpec(2, 0.8)
        gf = radial_power_graph(0.2, 1.0)
        with pytest.raises(InsufficientAnnuli):
            asymptotics_report(spec, gf, dyadic_annuli(1.0, 2))
        with pytest.raises(InsufficientAnnuli):
            check_c2_decay(spec, gf, dyadic_annuli(1.0, 2))

    def test_c2_decay_flags(self):
        spec = ConeSpec(2, 0.8)
        annuli = dyadic_annuli(1.5, 4)
        _, flags = check_c2_decay(spec, radial_power_graph(0.5, 1.0), annuli)
        assert all(flags.values())
        # a growing height is flagged
        _, flags = check_c2_decay(spec, radial_power_graph(0.5, -0.5), annuli)
        assert not flags["u"]


class TestAxisLabel:
    def test_coordinate_axes(self):
        assert axis_label(np.array([1.0, 0.0, 0.0]), 3) == "e1"
        assert axis_label(np.array([0.0, 0.0, 2.5]), 3) == "e3"

    def test_general_vectors_spelled_out(self):
        assert axis_label(np.array([0.5, -1.0, 0.0]), 3) == "(0.5,-1,0)"
        assert axis_label(np.array([-1.0, 0.0]), 2) == "(-1,0)"

    def test_length_checked(self):
        with pytest.raises(ConfigError):
            axis_label(np.array([1.0]), 3)
