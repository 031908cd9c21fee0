"""Rotationally symmetric self-expanders of mean curvature flow.

Construction of profile curves by shooting, discrete hypersurface geometry
on revolved and cone-graph patches, and verification of the elliptic
identities and decay estimates underlying the uniqueness-and-symmetry
argument for asymptotically conical expanders.
"""
from __future__ import annotations

from ._ode import available_backends, backend
from .cone import (
    ConeSpec,
    SphereChart,
    cone_closed_forms,
    cone_frame,
    cone_geometry,
    cone_patch,
    hyperspherical_chart,
    sphere_jet,
)
from .conegraph import (
    GraphFunction,
    GraphGeometry,
    GraphJet,
    GraphMetricParts,
    anisotropic_power_graph,
    asymptotics_report,
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
from .errors import (
    AxisSingularity,
    BlowUp,
    ConfigError,
    DegenerateMetric,
    DomainError,
    ExpanderError,
    ImmersionFailure,
    InsufficientAnnuli,
    NoSplitRadius,
    NonConvexLandscape,
    NonPositiveDenominator,
    NotAnExpander,
    NotConical,
    NotMeanConvex,
    PoleProximity,
    ShapeMismatch,
    SingularMetric,
    ToleranceFailure,
)
from .profiles import (
    CriticalAngleResult,
    Profile,
    RevolvedReference,
    ShootingResult,
    ShootingRoot,
    critical_angle,
    estimate_alpha,
    expander_ode_step,
    integrate_profile,
    profile_mean_curvature,
    profile_residual,
    revolve,
    shoot_to_angle,
    straight_profile,
)
from .reports import (
    AnnulusReport,
    AnnulusRow,
    ResidualReport,
    ResidualSample,
    dumps_json,
    dyadic_annuli,
    fit_loglog_slope,
)
from .surface import (
    GeometryFields,
    ScalarField,
    SurfacePatch,
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
from .verify import (
    LiouvilleCertificate,
    certificate_epsilon,
    decay_check,
    expander_residual,
    homothety_check,
    identity_ladder,
    identity_residuals,
    ladder_margins,
    liouville_certificate,
    quotient_field,
    quotient_residual,
    require_expander,
    variation_check,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
