"""Command-line interface.

Subcommands
-----------
cone            evaluate the round-cone frame and curvature at a point
profile         integrate one disk/neck profile and write it as JSON
shoot           find all shooting parameters matching a target inclination
critical-angle  locate the minimum of the neck inclination landscape
verify          refinement ladder of elliptic-identity residuals on a
                revolved profile, plus homothety/certificate gates
asymptotics     annulus decay table of a revolved profile end

Exit codes: 0 success, 1 a verification gate failed, 2 configuration error,
3 computation failed (blow-up, missing bracket, non-conical end, ...).

Options may come from a ``key = value`` config file (``--config``); explicit
flags take precedence over the file, the file over built-in defaults.  All
angles are radians.  Output files are deterministic (sorted JSON keys, no
timestamps); re-running a command reproduces them byte for byte.
"""
from __future__ import annotations

import argparse
import math
import sys
from types import SimpleNamespace

import numpy as np

from . import _ode
from .cone import ConeSpec, cone_closed_forms, cone_frame, cone_geometry
from .conegraph import axis_label
from .errors import ConfigError, DomainError, ExpanderError
from .profiles import (
    Profile,
    critical_angle,
    integrate_profile,
    revolve,
    shoot_to_angle,
    straight_profile,
)
from .reports import (
    RESIDUAL_CSV_HEADER,
    dumps_json,
    dyadic_annuli,
    write_csv_text,
)
from .surface import fundamental_forms
from .verify import (
    decay_check,
    homothety_check,
    identity_ladder,
    liouville_certificate,
    variation_check,
)

PROG = "expanders"


# ---------------------------------------------------------------------------
# option plumbing


def _floats_csv(text: str) -> list[float]:
    try:
        return [float(v) for v in str(text).split(",") if v.strip() != ""]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated floats: {e}")


def _ints_csv(text: str) -> list[int]:
    try:
        return [int(v) for v in str(text).split(",") if v.strip() != ""]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated ints: {e}")


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def _axes_csv(text: str) -> list[str]:
    return [v.strip() for v in str(text).split(",") if v.strip() != ""]


def _axis_vector(label: str, m: int) -> np.ndarray:
    label = label.strip()
    if label.startswith("e") and label[1:].isdigit():
        idx = int(label[1:]) - 1
        if not 0 <= idx < m:
            raise ConfigError(f"axis {label} out of range for ambient dim {m}")
        v = np.zeros(m)
        v[idx] = 1.0
        return v
    parts = label.split("/")
    if len(parts) == m:
        return np.array([float(p) for p in parts])
    raise ConfigError(
        f"axis {label!r} not understood (use e.g. e1 or v1/v2/.../v{m})"
    )


class _Opt:
    def __init__(self, flag, dest, typ, default, help, choices=None):
        self.flag = flag
        self.dest = dest
        self.typ = typ
        self.default = default
        self.help = help
        self.choices = choices


def _parse(spec: list[_Opt], argv: list[str], command: str) -> SimpleNamespace:
    parser = argparse.ArgumentParser(
        prog=f"{PROG} {command}", argument_default=argparse.SUPPRESS
    )
    parser.add_argument("--config", type=str, help="key = value options file")
    for o in spec:
        kwargs = dict(dest=o.dest, help=f"{o.help} (default {o.default!r})")
        if o.choices:
            kwargs["choices"] = o.choices
        if o.typ is bool:
            kwargs["type"] = _bool
        else:
            kwargs["type"] = o.typ
        parser.add_argument(o.flag, **kwargs)
    given = vars(parser.parse_args(argv))
    conf_path = given.pop("config", None)
    values = {o.dest: o.default for o in spec}
    if conf_path:
        values.update(_load_config(conf_path, spec))
    values.update(given)
    return SimpleNamespace(**values)


def _load_config(path: str, spec: list[_Opt]) -> dict:
    by_dest = {o.dest: o for o in spec}
    out = {}
    try:
        text = open(path).read()
    except OSError as e:
        raise ConfigError(f"cannot read config file: {e}")
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, _, val = line.partition("=")
        dest = key.strip().replace("-", "_")
        if dest not in by_dest:
            raise ConfigError(f"{path}:{lineno}: unknown option {key.strip()!r}")
        o = by_dest[dest]
        try:
            out[dest] = _bool(val.strip()) if o.typ is bool else o.typ(val.strip())
        except (ValueError, argparse.ArgumentTypeError) as e:
            raise ConfigError(f"{path}:{lineno}: bad value for {key.strip()!r}: {e}")
        if o.choices and out[dest] not in o.choices:
            raise ConfigError(
                f"{path}:{lineno}: {key.strip()!r} must be one of {o.choices}"
            )
    return out


def _emit(args, payload: dict, csv_text: str | None = None) -> None:
    fmt = getattr(args, "format", "json")
    path = getattr(args, "output", None)
    if not path:
        return
    if fmt == "csv":
        if csv_text is None:
            raise ConfigError("this subcommand has no CSV form")
        text = csv_text
    else:
        text = dumps_json(payload)
    with open(path, "w") as fh:
        fh.write(text)
    print(f"wrote {path}")


def _gate_line(name: str, value: float, limit: float, kind: str) -> bool:
    """Print one pass/fail line; kind is '<=' or '>='."""
    ok = value <= limit if kind == "<=" else value >= limit
    word = "PASS" if ok else "FAIL"
    print(f"check {name}: {word} ({value:.6g} {kind} {limit:g})")
    return ok


# ---------------------------------------------------------------------------
# cone


_CONE_SPEC = [
    _Opt("--n", "n", int, 2, "ambient dimension parameter n (surface in R^(n+1))"),
    _Opt("--alpha", "alpha", float, math.pi / 4, "cone half-angle in radians"),
    _Opt("--r", "r", float, 1.0, "radius along the cone"),
    _Opt("--theta", "theta", _floats_csv, [1.0], "chart angles, comma separated"),
    _Opt("--margin", "margin", float, 0.1, "pole-avoidance margin for polar angles"),
    _Opt("--tol", "tol", float, 1e-10, "gate on the frame/curvature checks"),
    _Opt("--output", "output", str, "", "write a JSON result file"),
    _Opt("--format", "format", str, "json", "output format", choices=("json", "csv")),
]


def _cmd_cone(argv: list[str]) -> int:
    args = _parse(_CONE_SPEC, argv, "cone")
    spec = ConeSpec(n=args.n, alpha=args.alpha)
    theta = np.asarray(args.theta, dtype=float)
    if theta.shape != (spec.sphere_dim,):
        raise ConfigError(
            f"--theta needs {spec.sphere_dim} angles for n = {spec.n}"
        )
    F, dFdr, nu = cone_frame(spec, np.asarray(args.r), theta, args.margin)
    g, h, H, A2 = cone_geometry(spec, np.asarray(args.r), theta, args.margin)
    H_exact, A2_exact = cone_closed_forms(spec, args.r)

    print(f"F    = {np.array2string(F, precision=12)}")
    print(f"dFdr = {np.array2string(dFdr, precision=12)}")
    print(f"nu   = {np.array2string(nu, precision=12)}")
    print(f"H    = {H:.12g}")
    print(f"A2   = {A2:.12g}")
    checks = {
        "frame_orthogonal": abs(float(dFdr @ nu)),
        "normal_unit": abs(float(nu @ nu) - 1.0),
        "H_closed_form": abs(float(H) - H_exact),
        "A2_closed_form": abs(float(A2) - A2_exact),
    }
    ok = all(_gate_line(k, v, args.tol, "<=") for k, v in sorted(checks.items()))
    payload = {
        "config": {"n": args.n, "alpha": args.alpha, "r": args.r, "theta": args.theta},
        "F": F.tolist(),
        "dFdr": dFdr.tolist(),
        "nu": nu.tolist(),
        "g": g.tolist(),
        "h": h.tolist(),
        "H": float(H),
        "A2": float(A2),
        "checks": checks,
    }
    _emit(args, payload)
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# profile


_PROFILE_SPEC = [
    _Opt("--n", "n", int, 2, "ambient dimension parameter n"),
    _Opt("--family", "family", str, "disk", "shooting family", choices=("disk", "neck", "ray")),
    _Opt("--z0", "z0", float, 1.0, "disk start height on the axis"),
    _Opt("--x0", "x0", float, 1.0, "neck start radius in the z = 0 plane"),
    _Opt("--alpha", "alpha", float, math.pi / 4, "ray inclination (family ray)"),
    _Opt("--s-max", "s_max", float, 14.0, "arc length to integrate"),
    _Opt("--ds", "ds", float, 1.0 / 256.0, "output grid spacing"),
    _Opt("--rtol", "rtol", float, 1e-10, "relative step tolerance"),
    _Opt("--atol", "atol", float, 1e-12, "absolute step tolerance"),
    _Opt("--residual-gate", "residual_gate", float, 1e-8, "max allowed system residual"),
    _Opt("--lane", "lane", str, "", "kernel lane override (python or cython)"),
    _Opt("--output", "output", str, "", "write the profile JSON here"),
    _Opt("--format", "format", str, "json", "output format", choices=("json",)),
]


def _cmd_profile(argv: list[str]) -> int:
    args = _parse(_PROFILE_SPEC, argv, "profile")
    lane = args.lane or None
    if args.family == "ray":
        prof = straight_profile(args.n, args.alpha)
    else:
        param = args.z0 if args.family == "disk" else args.x0
        prof = integrate_profile(
            args.n,
            args.family,
            param,
            s_max=args.s_max,
            ds_out=args.ds,
            rtol=args.rtol,
            atol=args.atol,
            residual_gate=args.residual_gate,
            lane=lane,
        )
    unc = prof.alpha_uncertainty
    print(f"family        = {prof.family} (n = {prof.n})")
    print(f"shoot_param   = {prof.shoot_param:.12g}")
    print(f"kernel        = {prof.backend}")
    print(f"samples       = {len(prof.samples)}")
    print(f"alpha_hat     = {prof.alpha_hat:.9g}")
    print(f"alpha_spread  = {unc if unc is None else format(unc, '.3g')}")
    print(f"residual_sup  = {prof.residual_sup:.6g}")
    print(f"mean_convex   = {prof.mean_convex}")
    print(f"H_sign_changes= {prof.h_sign_changes}")
    _emit(args, prof.to_json_dict())
    return 0


# ---------------------------------------------------------------------------
# shoot


_SHOOT_SPEC = [
    _Opt("--n", "n", int, 2, "ambient dimension parameter n"),
    _Opt("--family", "family", str, "disk", "shooting family", choices=("disk", "neck")),
    _Opt("--target", "target", float, 1.0, "target end inclination (radians)"),
    _Opt("--angle-tol", "angle_tol", float, 1e-6, "matching tolerance on the inclination"),
    _Opt("--scan-lo", "scan_lo", float, 1e-2, "low end of the parameter scan"),
    _Opt("--scan-hi", "scan_hi", float, 1e2, "high end of the parameter scan"),
    _Opt("--per-decade", "per_decade", int, 24, "scan nodes per decade"),
    _Opt("--s-max", "s_max", float, 14.0, "arc length per trajectory"),
    _Opt("--rtol", "rtol", float, 1e-10, "relative step tolerance"),
    _Opt("--lane", "lane", str, "", "kernel lane override"),
    _Opt("--output", "output", str, "", "write a JSON result file"),
    _Opt("--format", "format", str, "json", "output format", choices=("json",)),
]


def _cmd_shoot(argv: list[str]) -> int:
    args = _parse(_SHOOT_SPEC, argv, "shoot")
    result = shoot_to_angle(
        args.n,
        args.family,
        args.target,
        angle_tol=args.angle_tol,
        scan_lo=args.scan_lo,
        scan_hi=args.scan_hi,
        per_decade=args.per_decade,
        s_max=args.s_max,
        rtol=args.rtol,
        lane=args.lane or None,
    )
    print(
        f"family {result.family} (n = {result.n}), target alpha = "
        f"{result.target_alpha:.9g}, scan [{args.scan_lo:g}, {args.scan_hi:g}]"
    )
    for i, root in enumerate(result.roots):
        print(
            f"root {i}: param = {root.param:.9g}  alpha_hat = {root.alpha_hat:.9g}  "
            f"alpha_check = {root.alpha_check:.9g}  mean_convex = {root.mean_convex}  "
            f"H_sign_changes = {root.h_sign_changes}"
        )
    print(f"roots: {len(result.roots)}")
    _emit(args, result.to_json_dict())
    return 0


# ---------------------------------------------------------------------------
# critical-angle


_CRIT_SPEC = [
    _Opt("--n", "n", int, 3, "ambient dimension parameter n (>= 3)"),
    _Opt("--scan-lo", "scan_lo", float, 5e-2, "low end of the parameter scan"),
    _Opt("--scan-hi", "scan_hi", float, 20.0, "high end of the parameter scan"),
    _Opt("--per-decade", "per_decade", int, 32, "scan nodes per decade"),
    _Opt("--s-max", "s_max", float, 14.0, "arc length per trajectory"),
    _Opt("--rtol", "rtol", float, 1e-10, "relative step tolerance"),
    _Opt("--lane", "lane", str, "", "kernel lane override"),
    _Opt("--output", "output", str, "", "write a JSON result file"),
    _Opt("--format", "format", str, "json", "output format", choices=("json",)),
]


def _cmd_critical_angle(argv: list[str]) -> int:
    args = _parse(_CRIT_SPEC, argv, "critical-angle")
    result = critical_angle(
        args.n,
        scan_lo=args.scan_lo,
        scan_hi=args.scan_hi,
        per_decade=args.per_decade,
        s_max=args.s_max,
        rtol=args.rtol,
        lane=args.lane or None,
    )
    print(f"n            = {result.n}")
    print(f"alpha_crit   = {result.alpha_crit:.9g}")
    print(f"param_at_min = {result.param:.9g}")
    print(
        f"bracket      = [{result.param_bracket[0]:.9g}, {result.param_bracket[1]:.9g}]"
    )
    _emit(args, result.to_json_dict())
    return 0


# ---------------------------------------------------------------------------
# verify


_VERIFY_SPEC = [
    _Opt("--input", "input", str, "", "profile JSON produced by the profile command"),
    _Opt("--s-lo", "s_lo", float, 2.0, "arc-length window start"),
    _Opt("--s-hi", "s_hi", float, 8.0, "arc-length window end"),
    _Opt("--sizes", "sizes", _ints_csv, [33, 65, 129], "grid sizes of the ladder"),
    _Opt("--axes", "axes", _axes_csv, ["e1"], "rotation axes for support identities"),
    _Opt("--translations", "translations", _axes_csv, ["e1"], "translation directions"),
    _Opt("--quotient-f", "quotient_f", str, "fR", "numerator of the quotient identity", choices=("fR", "H", "off")),
    _Opt("--quotient-axis", "quotient_axis", str, "e1", "rotation axis when the quotient numerator is fR"),
    _Opt("--lam", "lam", str, "auto", "quotient eigenvalue (auto: 0.5 for fR, -0.5 for H)"),
    _Opt("--eps", "eps", float, 0.1, "denominator shift for the quotient"),
    _Opt("--liouville-lam", "liouville_lam", float, 0.5, "eigenvalue for the certificate (> 0)"),
    _Opt("--order-floor", "order_floor", float, 1.9, "required fitted convergence order"),
    _Opt("--sup-ceiling", "sup_ceiling", float, 1e-3, "required finest-grid sup residual"),
    _Opt("--homothety-c", "homothety_c", float, 2.0, "scale factor for the scaling check"),
    _Opt("--homothety-gate", "homothety_gate", float, 1e-9, "gate on the scaling defect"),
    _Opt("--liouville", "liouville", str, "auto", "certificate mode", choices=("auto", "on", "off")),
    _Opt("--variation", "variation", int, 0, "number of random variation fields"),
    _Opt("--variation-ds", "variation_ds", float, 1e-5, "step for the variation derivative"),
    _Opt("--seed", "seed", int, 20260814, "seed for the random variation fields"),
    _Opt("--margin", "margin", int, 3, "interior margin (in nodes) for norms"),
    _Opt("--output", "output", str, "", "write a JSON/CSV report file"),
    _Opt("--format", "format", str, "json", "output format", choices=("json", "csv")),
]


def _load_profile(path: str) -> Profile:
    import json

    if not path:
        raise ConfigError("--input is required")
    try:
        with open(path) as fh:
            return Profile.from_json_dict(json.load(fh))
    except OSError as e:
        raise ConfigError(f"cannot read profile: {e}")
    except (KeyError, ValueError) as e:
        raise ConfigError(f"malformed profile file: {e}")


def _ladder_axes(profile: Profile, size: int) -> list[np.ndarray]:
    d = profile.n - 1
    axes = []
    for i in range(d):
        if i < d - 1:
            axes.append(np.linspace(0.35, math.pi - 0.35, size))
        else:
            # full circle, no endpoint: the azimuth axis is periodic
            axes.append(np.linspace(0.0, 2.0 * math.pi, size, endpoint=False))
    return axes


def _cmd_verify(argv: list[str]) -> int:
    args = _parse(_VERIFY_SPEC, argv, "verify")
    profile = _load_profile(args.input)
    if len(args.sizes) < 2:
        raise ConfigError("--sizes needs at least two grid sizes")
    if not profile.s[0] <= args.s_lo < args.s_hi <= profile.s[-1]:
        raise DomainError(
            f"window [{args.s_lo:g}, {args.s_hi:g}] outside sampled range "
            f"[{profile.s[0]:g}, {profile.s[-1]:g}]"
        )
    m = profile.n + 1
    axes_vecs = [_axis_vector(a, m) for a in args.axes]
    trans_vecs = [_axis_vector(a, m) for a in args.translations]

    quotients = []
    if args.quotient_f != "off":
        kind = "f_R" if args.quotient_f == "fR" else "H"
        if args.lam == "auto":
            lam = 0.5 if kind == "f_R" else -0.5
        else:
            try:
                lam = float(args.lam)
            except ValueError:
                raise ConfigError(f"--lam must be a number or 'auto', got {args.lam!r}")
        qaxis = _axis_vector(args.quotient_axis, m) if kind == "f_R" else None
        quotients.append((kind, qaxis, lam, args.eps))

    entries = []

    def build(size):
        s_nodes = np.linspace(args.s_lo, args.s_hi, size)
        patch, ref = revolve(profile, s_nodes, _ladder_axes(profile, size))
        fields = fundamental_forms(patch, orient=ref.nu)
        entries.append((patch, fields, ref))
        return patch, fields

    reports = identity_ladder(
        build,
        sorted(args.sizes),
        axes=axes_vecs,
        translations=trans_vecs,
        quotients=quotients,
        base_margin=args.margin,
    )
    ok = True
    for name in sorted(reports):
        rep = reports[name]
        ok &= _gate_line(f"{name}.order", rep.fitted_order, args.order_floor, ">=")
        ok &= _gate_line(f"{name}.finest_sup", rep.sup_residuals[-1], args.sup_ceiling, "<=")

    patch, fields, ref = entries[-1]
    hom = homothety_check(patch, args.homothety_c)
    ok &= _gate_line("homothety.sup", hom.sup, args.homothety_gate, "<=")

    cert_payload = None
    run_cert = args.liouville == "on" or (
        args.liouville == "auto" and float(np.min(fields.H)) > 0.0
    )
    if run_cert:
        cert = liouville_certificate(patch, fields, args.liouville_lam)
        cert_payload = cert.to_json_dict()
        word = "PASS" if cert.valid else "FAIL"
        print(
            f"check liouville.certificate: {word} (econst_min = {cert.econst_min:.6g}, "
            f"eps = {cert.epsilon:.6g}, r_split = {cert.r_split:.6g})"
        )
        ok &= cert.valid
    else:
        print("check liouville.certificate: SKIPPED (surface not mean-convex)")

    var_payload = []
    if args.variation > 0:
        rng = np.random.default_rng(args.seed)
        sup_dphi = 0.0
        for k in range(args.variation):
            coef = rng.standard_normal(3)
            svals = patch.axes[0]
            base = (svals - svals[0]) / (svals[-1] - svals[0])
            prof_f = coef[0] + coef[1] * np.cos(math.pi * base) + coef[2] * base**2
            shape = [1] * len(patch.grid_shape)
            shape[0] = len(svals)
            phi_vals = np.broadcast_to(prof_f.reshape(shape), patch.grid_shape).copy()
            res = variation_check(
                patch, phi_vals, args.variation_ds, orient=ref.nu, margin=args.margin
            )
            entry = {name: s.to_json_dict() for name, s in res.items()}
            var_payload.append(entry)
            worst = max(s.sup for s in res.values())
            sup_dphi = max(sup_dphi, worst)
            print(f"variation field {k}: worst residual {worst:.6g}")

    payload = {
        "input": args.input,
        "window": [args.s_lo, args.s_hi],
        "sizes": sorted(args.sizes),
        "reports": {name: rep.to_json_dict() for name, rep in sorted(reports.items())},
        "homothety": hom.to_json_dict(),
        "liouville": cert_payload,
        "variation": var_payload,
        "passed": bool(ok),
    }
    csv_rows = []
    for name in sorted(reports):
        csv_rows.extend(reports[name].csv_rows())
    _emit(args, payload, csv_text=write_csv_text(RESIDUAL_CSV_HEADER, csv_rows))
    print(f"verify: {'PASS' if ok else 'FAIL'}")
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# asymptotics


_ASYMP_SPEC = [
    _Opt("--input", "input", str, "", "profile JSON produced by the profile command"),
    _Opt("--s-lo", "s_lo", float, 1.0, "arc-length window start"),
    _Opt("--s-hi", "s_hi", float, 0.0, "arc-length window end (0 = end of data)"),
    _Opt("--size", "size", int, 161, "grid size per axis"),
    _Opt("--annuli-r0", "annuli_r0", float, 1.5, "inner radius of the first annulus"),
    _Opt("--annuli-count", "annuli_count", int, 3, "number of dyadic annuli"),
    _Opt("--axes", "axes", _axes_csv, [], "rotation axes for support decay"),
    _Opt("--floor-A", "floor_A", float, 0.0, "required final sup of |A| (0 = off)"),
    _Opt("--floor-H", "floor_H", float, 0.0, "required final sup of |H| (0 = off)"),
    _Opt("--margin", "margin", int, 2, "interior margin (in nodes) for norms"),
    _Opt("--output", "output", str, "", "write a JSON/CSV report file"),
    _Opt("--format", "format", str, "json", "output format", choices=("json", "csv")),
]


def _cmd_asymptotics(argv: list[str]) -> int:
    args = _parse(_ASYMP_SPEC, argv, "asymptotics")
    profile = _load_profile(args.input)
    s_hi = args.s_hi if args.s_hi > 0 else float(profile.s[-1])
    if not profile.s[0] <= args.s_lo < s_hi <= profile.s[-1]:
        raise DomainError("arc-length window outside the sampled range")
    s_nodes = np.linspace(args.s_lo, s_hi, args.size)
    patch, ref = revolve(profile, s_nodes, _ladder_axes(profile, args.size))
    fields = fundamental_forms(patch, orient=ref.nu)

    m = profile.n + 1
    extra = {}
    from .surface import rotation_generator, support_function

    for label in args.axes:
        vec = _axis_vector(label, m)
        extra[f"f_R[{axis_label(vec, m)}]"] = support_function(
            fields, rotation_generator(vec, m)
        )
    annuli = dyadic_annuli(args.annuli_r0, args.annuli_count)
    floors = {}
    if args.floor_A > 0:
        floors["A"] = args.floor_A
    if args.floor_H > 0:
        floors["H"] = args.floor_H
    report, passed = decay_check(
        patch, fields, extra, annuli=annuli, floors=floors, margin=args.margin
    )
    ok = True
    for name in sorted(passed):
        word = "PASS" if passed[name] else "FAIL"
        slope = report.fitted_slopes.get(name, float("nan"))
        sups = report.sups(name)
        print(
            f"check decay[{name}]: {word} (sups {', '.join(f'{v:.4g}' for v in sups)}; "
            f"slope {slope:.3g})"
        )
        ok &= passed[name]
    payload = {
        "input": args.input,
        "window": [args.s_lo, s_hi],
        "annuli": [list(a) for a in annuli],
        "rows": report.to_json_list(),
        "passed": {k: bool(v) for k, v in passed.items()},
    }
    header = ["quantity", "r_min", "r_max", "sup", "l2"]
    rows = [[row.quantity, row.r_min, row.r_max, row.sup, row.l2] for row in report.rows]
    _emit(args, payload, csv_text=write_csv_text(header, rows))
    print(f"asymptotics: {'PASS' if ok else 'FAIL'}")
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# entry point


_COMMANDS = {
    "cone": _cmd_cone,
    "profile": _cmd_profile,
    "shoot": _cmd_shoot,
    "critical-angle": _cmd_critical_angle,
    "verify": _cmd_verify,
    "asymptotics": _cmd_asymptotics,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    if not argv or argv[0] in ("-h", "--help"):
        print(__doc__.strip())
        print("\ncommands:", ", ".join(sorted(_COMMANDS)))
        print(f"backend: {_ode.backend()} (EXPANDERS_ODE_BACKEND overrides)")
        return 0
    cmd, rest = argv[0], argv[1:]
    handler = _COMMANDS.get(cmd)
    if handler is None:
        print(f"unknown command {cmd!r}; choose from {sorted(_COMMANDS)}", file=sys.stderr)
        return 2
    try:
        return handler(rest)
    except SystemExit as e:  # argparse --help or usage error
        code = e.code if e.code is not None else 0
        return int(code) if isinstance(code, int) else 2
    except ConfigError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return 2
    except ExpanderError as e:
        print(f"computation failed: {type(e).__name__}: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
