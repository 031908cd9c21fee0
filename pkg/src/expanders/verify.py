"""Pointwise and spectral checks tying the discrete geometry together.

On a self-expanding hypersurface (H = <F, nu>/2 with the sign conventions of
``surface``), the scalar curvature and the supports of ambient motions solve
elliptic equations:

    Lap H     + (1/2) <F, grad H>   + (|A|^2 + 1/2) H   = 0
    Lap f_R   + (1/2) <F, grad f_R> + (|A|^2 - 1/2) f_R = 0   (rotations)
    Lap <V,nu> + (1/2) <F, grad .>  + |A|^2 <V, nu>     = 0   (translations)

and for an eigenfunction f with (Lap + (1/2)<F, grad .> + |A|^2) f = lam f
(H has lam = -1/2, rotation supports lam = +1/2, translations lam = 0)
the quotient w = f / (H + eps) satisfies the drift equation

    Lap w = < -F/2 - (2/(H+eps)) grad(H), grad w >
            + w / (H + eps) * ( (lam + 1/2) H - eps (|A|^2 - lam) ).

The certificate behind the symmetry argument is the positivity of
E = (lam + 1/2) H - eps (|A|^2 - lam) for the explicit choice
eps = delta (lam + 1/2) / (C - lam) with delta = min H on the compact part
and C = max |A|^2; when |A|^2 < lam everywhere any eps works and eps = 1 is
reported.  All residuals here are measured with the same finite-difference
stencils as the geometry itself and are expected to converge at second
order.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ConfigError,
    DomainError,
    InsufficientAnnuli,
    NonPositiveDenominator,
    NoSplitRadius,
    NotAnExpander,
    NotMeanConvex,
)
from .reports import AnnulusReport, ResidualReport, ResidualSample
from .surface import (
    GeometryFields,
    ScalarField,
    SurfacePatch,
    field_norms,
    fundamental_forms,
    gradient,
    laplace_beltrami,
    rotation_generator,
    support_function,
)

EXPANDER_GATE_FACTOR = 100.0
IDENTITY_MARGIN = 3
REPORT_MARGIN = 2


def _sample(name, patch, values, margin) -> ResidualSample:
    sup, l2 = field_norms(values, patch, margin)
    return ResidualSample(
        name=name, spacing=max(patch.spacings), sup=sup, l2=l2, field=values
    )


def expander_residual(
    patch: SurfacePatch, fields: GeometryFields, margin: int = REPORT_MARGIN
) -> ResidualSample:
    """Defect of the self-expander equation, H - <F, nu>/2."""
    values = fields.H - 0.5 * np.einsum("...m,...m->...", patch.points, fields.nu)
    return _sample("expander", patch, values, margin)


def require_expander(
    patch: SurfacePatch,
    fields: GeometryFields,
    tol: float,
    margin: int = REPORT_MARGIN,
) -> ResidualSample:
    """Gate downstream checks on the expander defect (NotAnExpander beyond)."""
    res = expander_residual(patch, fields, margin)
    gate = EXPANDER_GATE_FACTOR * tol
    if res.sup > gate:
        raise NotAnExpander(
            f"expander defect {res.sup:.3g} exceeds {gate:g} "
            f"({EXPANDER_GATE_FACTOR:g} x tolerance {tol:g})"
        )
    return res


def identity_residuals(
    patch: SurfacePatch,
    fields: GeometryFields,
    *,
    axes=(),
    translations=(),
    tol: float = 1e-3,
    margin: int = IDENTITY_MARGIN,
) -> dict[str, ResidualSample]:
    """Residuals of the elliptic identities solved by H and the supports.

    ``axes`` lists rotation axes (ambient vectors), ``translations`` ambient
    directions V.  The patch must pass the expander gate at 100 x tol first.
    """
    from .conegraph import axis_label

    require_expander(patch, fields, tol)
    m = patch.ambient_dim
    out: dict[str, ResidualSample] = {}

    def drift_op(values, zeroth):
        lap = laplace_beltrami(fields, values)
        grad = gradient(fields, values)
        drift = 0.5 * np.einsum("...m,...m->...", patch.points, grad)
        return lap + drift + zeroth * values

    out["H"] = _sample(
        "H", patch, drift_op(fields.H, fields.A2 + 0.5), margin
    )
    for axis in axes:
        label = f"f_R[{axis_label(np.asarray(axis, dtype=float), m)}]"
        f = support_function(fields, rotation_generator(axis, m))
        out[label] = _sample(label, patch, drift_op(f, fields.A2 - 0.5), margin)
    for v in translations:
        v = np.asarray(v, dtype=float)
        label = f"V[{axis_label(v, m)}]"
        f = support_function(fields, v)
        out[label] = _sample(label, patch, drift_op(f, fields.A2), margin)
    return out


def quotient_residual(
    patch: SurfacePatch,
    fields: GeometryFields,
    f,
    lam: float,
    eps: float,
    *,
    tol: float = 1e-3,
    margin: int = IDENTITY_MARGIN,
) -> ResidualSample:
    """Residual of the drift equation for w = f / (H + eps).

    Requires H + eps > 0 on the whole patch (NonPositiveDenominator
    otherwise) and the expander gate.
    """
    require_expander(patch, fields, tol)
    values = f.values if isinstance(f, ScalarField) else np.asarray(f, dtype=float)
    denom = fields.H + eps
    if np.min(denom) <= 0:
        raise NonPositiveDenominator(
            f"H + eps reaches {float(np.min(denom)):.3g}; the quotient is undefined"
        )
    w = values / denom
    lap_w = laplace_beltrami(fields, w)
    grad_w = gradient(fields, w)
    grad_H = gradient(fields, fields.H)
    drift_vec = -0.5 * patch.points - (2.0 / denom)[..., None] * grad_H
    rhs = np.einsum("...m,...m->...", drift_vec, grad_w) + (w / denom) * (
        (lam + 0.5) * fields.H - eps * (fields.A2 - lam)
    )
    return _sample("quotient", patch, lap_w - rhs, margin)


# ---------------------------------------------------------------------------
# normal variation check


def variation_check(
    patch: SurfacePatch,
    phi,
    ds: float,
    *,
    orient=None,
    margin: int = IDENTITY_MARGIN,
) -> dict[str, ResidualSample]:
    """First variation of nu and H under F -> F + t phi nu at t = 0.

    Central differences in t of the discrete geometry are compared against
    the closed forms  d(nu)/dt = -grad(phi)  and  d(H)/dt = (Lap + |A|^2) phi
    (the sign of the H variation follows the h = <d2F, nu> convention used
    throughout; flipping nu flips H, phi-motion, and the variation together).
    """
    if ds <= 0:
        raise ConfigError("variation step must be positive")
    values = phi.values if isinstance(phi, ScalarField) else np.asarray(phi, dtype=float)
    base = fundamental_forms(patch, orient=orient)
    ref = base.nu
    plus = SurfacePatch(
        axes=patch.axes,
        points=patch.points + ds * values[..., None] * ref,
        boundary_policy=patch.boundary_policy,
        periodic=patch.periodic,
    )
    minus = SurfacePatch(
        axes=patch.axes,
        points=patch.points - ds * values[..., None] * ref,
        boundary_policy=patch.boundary_policy,
        periodic=patch.periodic,
    )
    fp = fundamental_forms(plus, orient=ref)
    fm = fundamental_forms(minus, orient=ref)

    dnu = (fp.nu - fm.nu) / (2.0 * ds)
    grad_phi = gradient(base, values)
    nu_gap = np.linalg.norm(dnu + grad_phi, axis=-1)

    dH = (fp.H - fm.H) / (2.0 * ds)
    jacobi = laplace_beltrami(base, values) + base.A2 * values
    H_gap = dH - jacobi
    return {
        "normal_variation": _sample("normal_variation", patch, nu_gap, margin),
        "H_variation": _sample("H_variation", patch, H_gap, margin),
    }


# ---------------------------------------------------------------------------
# scaling behaviour


def homothety_check(
    patch: SurfacePatch,
    c: float,
    *,
    orient=None,
    margin: int = REPORT_MARGIN,
) -> ResidualSample:
    """Deviation from H(c F) = H(F) / c measured through the discrete engine."""
    if c <= 0:
        raise ConfigError("homothety factor must be positive")
    base = fundamental_forms(patch, orient=orient)
    scaled = fundamental_forms(patch.scaled(c), orient=orient)
    gap = scaled.H - base.H / c
    return _sample("homothety", patch, gap, margin)


# ---------------------------------------------------------------------------
# Liouville-type certificate


@dataclass(frozen=True)
class LiouvilleCertificate:
    """Positivity certificate for the zero-order term of the quotient drift.

    ``econst_min`` is the measured minimum of
    (lam + 1/2) H - eps (|A|^2 - lam); the certificate is valid when it is
    positive, which forces decaying eigenfunctions of the quotient equation
    to vanish.
    """

    lam: float
    r_split: float
    C: float
    delta: float
    epsilon: float
    econst_min: float
    n_inside: int
    n_outside: int

    @property
    def valid(self) -> bool:
        return self.econst_min > 0.0

    def to_json_dict(self) -> dict:
        return {
            "lam": self.lam,
            "r_split": self.r_split,
            "C": self.C,
            "delta": self.delta,
            "epsilon": self.epsilon,
            "econst_min": self.econst_min,
            "n_inside": self.n_inside,
            "n_outside": self.n_outside,
            "valid": self.valid,
        }


def certificate_epsilon(delta: float, C: float, lam: float) -> float:
    """The explicit weight eps = delta (lam + 1/2) / (C - lam) (1 if C <= lam)."""
    if lam <= 0:
        raise DomainError("the certificate needs lam > 0")
    if delta <= 0:
        raise NotMeanConvex(f"compact-part minimum of H is {delta:.3g} <= 0")
    if C <= lam:
        return 1.0
    return delta * (lam + 0.5) / (C - lam)


def liouville_certificate(
    patch: SurfacePatch,
    fields: GeometryFields,
    lam: float = 0.5,
    *,
    tol: float = 1e-3,
    margin: int = REPORT_MARGIN,
) -> LiouvilleCertificate:
    """Build and evaluate the positivity certificate on a discrete patch.

    Requires the expander gate and strict mean convexity of the compact
    part.  The split radius is the smallest sampled |F| beyond which
    |A|^2 < lam holds at every node (NoSplitRadius when even the outermost
    shell violates it).
    """
    if lam <= 0:
        raise DomainError("the certificate needs lam > 0")
    require_expander(patch, fields, tol)
    mask = patch.report_mask(margin)
    r = np.linalg.norm(patch.points, axis=-1)[mask]
    H = fields.H[mask]
    A2 = fields.A2[mask]

    C = float(np.max(A2))
    if C < lam:
        delta = float(np.min(H))
        if delta <= 0:
            raise NotMeanConvex(
                f"compact-part minimum of H is {delta:.3g} <= 0"
            )
        eps = 1.0
        r_split = float(np.min(r))
        inside = np.ones_like(H, dtype=bool)
    else:
        bad = A2 >= lam
        if not np.any(bad):
            r_split = float(np.min(r))
        else:
            r_split = float(np.max(r[bad]))
        outside = r > r_split
        if not np.any(outside):
            raise NoSplitRadius(
                f"|A|^2 >= lam = {lam:g} persists to the outermost sampled "
                f"radius {float(np.max(r)):.6g}"
            )
        inside = ~outside
        delta = float(np.min(H[inside]))
        if delta <= 0:
            raise NotMeanConvex(
                f"minimum of H on the compact part (r <= {r_split:.6g}) is "
                f"{delta:.3g} <= 0"
            )
        eps = certificate_epsilon(delta, C, lam)

    econst = (lam + 0.5) * H - eps * (A2 - lam)
    return LiouvilleCertificate(
        lam=float(lam),
        r_split=r_split,
        C=C,
        delta=delta,
        epsilon=float(eps),
        econst_min=float(np.min(econst)),
        n_inside=int(np.sum(inside)),
        n_outside=int(H.size - np.sum(inside)),
    )


# ---------------------------------------------------------------------------
# decay over annuli on a discrete patch


def decay_check(
    patch: SurfacePatch,
    fields: GeometryFields,
    extra_fields: dict[str, np.ndarray] | None = None,
    *,
    annuli: list[tuple[float, float]],
    floors: dict[str, float] | None = None,
    margin: int = REPORT_MARGIN,
    min_annuli: int = 3,
    slack: float = 1e-12,
):
    """Monotone decay of |A|, |H|, and optional extra magnitudes over annuli.

    Returns (AnnulusReport, {quantity: passed}) where passed means the
    per-annulus sups are nonincreasing and, when a floor is given for the
    quantity, the last sup is below it.
    """
    quantities = {"A": np.sqrt(fields.A2), "H": np.abs(fields.H)}
    for name, vals in (extra_fields or {}).items():
        quantities[name] = np.abs(np.asarray(vals, dtype=float))
    mask = patch.report_mask(margin)
    r = np.linalg.norm(patch.points, axis=-1)

    table: dict[str, list] = {name: [] for name in quantities}
    used = 0
    for r0, r1 in annuli:
        ring = mask & (r >= r0) & (r < r1)
        if not np.any(ring):
            continue
        used += 1
        for name, vals in quantities.items():
            v = vals[ring]
            table[name].append(
                ((r0, r1), float(np.max(v)), float(np.sqrt(np.mean(v**2))))
            )
    if used < min_annuli:
        raise InsufficientAnnuli(
            f"only {used} annuli contain interior nodes (need {min_annuli})"
        )
    report = AnnulusReport.build(table)
    passed = {}
    floors = floors or {}
    for name in quantities:
        ok = report.monotone_nonincreasing(name, slack=slack)
        if name in floors:
            ok = ok and report.sups(name)[-1] <= floors[name]
        passed[name] = bool(ok)
    return report, passed


# ---------------------------------------------------------------------------
# refinement ladders


def residual_ladder(name: str, samples: list[ResidualSample]) -> ResidualReport:
    """Assemble ladder samples of one identity into a convergence report."""
    return ResidualReport.from_samples(name, samples)


def ladder_reports(samples_by_identity: dict[str, list[ResidualSample]]) -> dict[str, ResidualReport]:
    return {
        name: ResidualReport.from_samples(name, samples)
        for name, samples in samples_by_identity.items()
    }


def ladder_margins(spacings, base_margin: int = IDENTITY_MARGIN) -> list[int]:
    """Node margins keeping the trimmed border physically fixed across a ladder.

    A constant node margin shrinks toward the boundary under refinement and
    lets the boundary layer own the sup norm, depressing fitted orders; tying
    the margin to the coarsest spacing pins the measured subregion instead.
    """
    h0 = max(spacings)
    return [max(base_margin, int(round(base_margin * h0 / h))) for h in spacings]


def quotient_field(fields: GeometryFields, kind: str, axis=None) -> np.ndarray:
    """The numerator f for the quotient equation: "H" or a rotation support."""
    if kind == "H":
        return fields.H
    if kind == "f_R":
        if axis is None:
            raise ConfigError("quotient kind f_R needs a rotation axis")
        m = fields.patch.ambient_dim
        return support_function(fields, rotation_generator(axis, m))
    raise ConfigError(f"unknown quotient field kind {kind!r} (use 'H' or 'f_R')")


def identity_ladder(
    build,
    sizes,
    *,
    axes=(),
    translations=(),
    quotients=(),
    tol: float = 1e-3,
    base_margin: int = IDENTITY_MARGIN,
    include_expander: bool = True,
) -> dict[str, ResidualReport]:
    """Run the elliptic-identity suite over a grid-refinement ladder.

    ``build(size)`` must return (patch, fields) for one resolution, with all
    sizes covering the same physical window so convergence rates are
    meaningful.  ``quotients`` lists (kind, axis, lam, eps) tuples handled by
    :func:`quotient_field`.  Margins scale with refinement (ladder_margins).
    """
    from .conegraph import axis_label

    entries = [build(size) for size in sizes]
    margins = ladder_margins([max(p.spacings) for p, _ in entries], base_margin)
    per: dict[str, list[ResidualSample]] = {}
    for (patch, fields), mg in zip(entries, margins):
        res = identity_residuals(
            patch, fields, axes=axes, translations=translations, tol=tol, margin=mg
        )
        if include_expander:
            res["expander"] = expander_residual(patch, fields, margin=mg)
        for kind, axis, lam, eps in quotients:
            f = quotient_field(fields, kind, axis)
            tag = kind if kind == "H" else f"f_R[{axis_label(np.asarray(axis, dtype=float), patch.ambient_dim)}]"
            res[f"quotient[{tag}]"] = quotient_residual(
                patch, fields, f, lam, eps, tol=tol, margin=mg
            )
        for name, sample in res.items():
            per.setdefault(name, []).append(sample)
    return ladder_reports(per)
