"""Rotationally invariant profile curves and their shooting problems.

A profile is an arc-length curve (x(s), z(s)) in the half-plane x > 0 whose
revolution about the z-axis moves by homothety under the flow.  With theta
the tangent angle, the reduction is the autonomous first-order system

    x'     = cos(theta)
    z'     = sin(theta)
    theta' = (z cos(theta) - x sin(theta)) / 2 - (n - 1) sin(theta) / x

whose solutions have scalar mean curvature H = (z cos - x sin)/2 on shell.
Two shooting families matter here: ``disk`` starts on the axis at height z0
(x = 0, theta = 0), and ``neck`` starts orthogonally to the plane z = 0 at
radius x0 (theta = pi/2), giving a reflection-symmetric curve.  A ``ray``
profile is the straight line through the origin with inclination alpha; it
revolves to a cone and is not a solution except at alpha = pi/2.

Both ends of every disk/neck trajectory approach a ray; the inclination is
estimated from the tail model theta(s) ~ theta_inf - (n-1) tan(theta_inf)/rho^2
with rho = x cos(theta) + z sin(theta), using a Richardson-type correction
and an independent least-squares fit whose disagreement bounds the error.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _ode
from .cone import DEFAULT_POLE_MARGIN, sphere_jet
from .errors import (
    AxisSingularity,
    BlowUp,
    ConfigError,
    DomainError,
    NonConvexLandscape,
    NotConical,
    ToleranceFailure,
)
from .surface import SurfacePatch, wraps_period

FAMILIES = ("disk", "neck", "ray")
DS_OUT = 1.0 / 256.0
DS_MIN = 1.0 / 4096.0
S_MAX = 14.0
THETA_MARGIN = 0.35


def expander_ode_step(n: int, state) -> tuple[float, float, float]:
    """One derivative evaluation (x', z', theta') of the profile system."""
    if n < 2:
        raise ConfigError("profile system needs n >= 2")
    x, z, th = (float(v) for v in state)
    if x <= 0.0:
        raise AxisSingularity("derivative needs x > 0")
    c = math.cos(th)
    si = math.sin(th)
    return (c, si, 0.5 * (z * c - x * si) - (n - 1) * si / x)


def profile_mean_curvature(x, z, th):
    """On-shell scalar mean curvature H = (z cos(theta) - x sin(theta))/2."""
    return 0.5 * (np.asarray(z) * np.cos(th) - np.asarray(x) * np.sin(th))


def _theta_prime(n, x, z, th):
    x = np.asarray(x, dtype=float)
    return profile_mean_curvature(x, z, th) - (n - 1) * np.sin(th) / x


# ---------------------------------------------------------------------------
# profile container


@dataclass(frozen=True)
class Profile:
    """Integrated (or synthetic) profile curve on a uniform arc-length grid.

    ``samples`` has rows (s, x, z, theta); ``theta_prime`` matches its
    length.  ``alpha_hat`` is the estimated inclination of the asymptotic
    ray and ``alpha_uncertainty`` the disagreement of the two estimators
    (None when not computed).  ``residual_sup`` is the measured sup of the
    finite-difference system residual; for the non-solution ``ray`` family
    it is reported but not gated.
    """

    n: int
    family: str
    shoot_param: float
    tol: float
    samples: np.ndarray
    theta_prime: np.ndarray
    alpha_hat: float
    residual_sup: float
    alpha_uncertainty: float | None = None
    mean_convex: bool = False
    h_sign_changes: int = 0
    backend: str = "unknown"

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"family must be one of {FAMILIES}")
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim != 2 or samples.shape[1] != 4 or samples.shape[0] < 2:
            raise ConfigError("samples must be an (N, 4) array with N >= 2")
        object.__setattr__(self, "samples", samples)
        tp = np.asarray(self.theta_prime, dtype=float)
        if tp.shape != (samples.shape[0],):
            raise ConfigError("theta_prime length must match samples")
        object.__setattr__(self, "theta_prime", tp)
        if np.any(np.diff(samples[:, 0]) <= 0):
            raise ConfigError("sample arc lengths must be strictly increasing")

    @property
    def s(self):
        return self.samples[:, 0]

    @property
    def x(self):
        return self.samples[:, 1]

    @property
    def z(self):
        return self.samples[:, 2]

    @property
    def theta(self):
        return self.samples[:, 3]

    @property
    def H(self):
        return profile_mean_curvature(self.x, self.z, self.theta)

    def to_json_dict(self) -> dict:
        return {
            "n": int(self.n),
            "family": self.family,
            "shoot_param": float(self.shoot_param),
            "tol": float(self.tol),
            "samples": [[float(v) for v in row] for row in self.samples],
            "alpha_hat": float(self.alpha_hat),
            "residual_sup": float(self.residual_sup),
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "Profile":
        samples = np.asarray(d["samples"], dtype=float)
        n = int(d["n"])
        family = d["family"]
        shoot_param = float(d["shoot_param"])
        x, z, th = samples[:, 1], samples[:, 2], samples[:, 3]
        tp = np.zeros(len(samples))
        if family == "ray":
            pass
        else:
            pos = x > 0
            tp[pos] = _theta_prime(n, x[pos], z[pos], th[pos])
            # axis start of a disk: theta'(0) = z0 / (2n)
            tp[~pos] = shoot_param / (2.0 * n)
        Hvals = profile_mean_curvature(x, z, th)
        return cls(
            n=n,
            family=family,
            shoot_param=shoot_param,
            tol=float(d["tol"]),
            samples=samples,
            theta_prime=tp,
            alpha_hat=float(d["alpha_hat"]),
            residual_sup=float(d["residual_sup"]),
            alpha_uncertainty=None,
            mean_convex=bool(np.min(Hvals) > 0.0),
            h_sign_changes=_sign_changes(Hvals),
            backend="loaded",
        )


def _sign_changes(values: np.ndarray, floor: float = 1e-12) -> int:
    signs = np.sign(values[np.abs(values) > floor])
    if signs.size < 2:
        return 0
    return int(np.sum(signs[1:] != signs[:-1]))


# ---------------------------------------------------------------------------
# residual of the first-order system on a stored grid


def profile_residual(samples: np.ndarray, n: int) -> tuple[float, np.ndarray]:
    """Sup and field of the fourth-order FD residual of all three equations.

    The derivative of each stored column is formed with the five-point
    interior stencil, so only nodes with two neighbors on each side are
    scored; nodes on the axis (x = 0) are excluded.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.shape[0] < 7:
        raise ConfigError("residual check needs at least 7 samples")
    s = samples[:, 0]
    ds = np.diff(s)
    if np.max(np.abs(ds - ds[0])) > 1e-9 * abs(ds[0]):
        raise ConfigError("residual check needs a uniform arc-length grid")
    h = float(ds[0])

    def fd4(y):
        return (y[:-4] - 8.0 * y[1:-3] + 8.0 * y[3:-1] - y[4:]) / (12.0 * h)

    x, z, th = samples[:, 1], samples[:, 2], samples[:, 3]
    xi, zi, ti = x[2:-2], z[2:-2], th[2:-2]
    ok = xi > 0
    c = np.cos(ti)
    si = np.sin(ti)
    res = np.zeros((samples.shape[0] - 4, 3))
    res[:, 0] = fd4(x) - c
    res[:, 1] = fd4(z) - si
    res[ok, 2] = (fd4(th) - (0.5 * (zi * c - xi * si) - (n - 1) * si / xi))[ok]
    field = np.max(np.abs(res), axis=1)
    field[~ok] = 0.0
    return float(np.max(field)) if field.size else 0.0, field


# ---------------------------------------------------------------------------
# asymptotic inclination estimators


def estimate_alpha(
    s,
    x,
    z,
    th,
    th_prime,
    *,
    tail_fraction: float = 0.25,
    disagreement_tol: float = 2e-3,
    min_tail: int = 8,
) -> tuple[float, float]:
    """Inclination of the asymptotic ray from the trajectory tail.

    Two estimators are compared: the pointwise Richardson value
    theta + rho theta' / 2 at the last sample, and a least-squares fit of
    theta against (1, rho^-2) over the tail.  Their disagreement is returned
    as the uncertainty; beyond ``disagreement_tol`` the trajectory is not
    accepted as conical.
    """
    s = np.asarray(s, dtype=float)
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    th = np.asarray(th, dtype=float)
    th_prime = np.asarray(th_prime, dtype=float)
    if s.size < min_tail:
        raise NotConical(f"need at least {min_tail} samples for the tail fit")
    cut = s[-1] - tail_fraction * (s[-1] - s[0])
    mask = s >= cut
    if int(mask.sum()) < min_tail:
        mask = np.zeros_like(mask)
        mask[-min_tail:] = True
    xt, zt, tht, tpt = x[mask], z[mask], th[mask], th_prime[mask]
    if np.any(xt <= 0):
        raise NotConical("tail touches the axis")
    rho = xt * np.cos(tht) + zt * np.sin(tht)
    if np.any(rho <= 0) or np.any(np.diff(rho) <= 0):
        raise NotConical("tail support distance is not increasing")

    theta_inf_point = float(tht[-1] + 0.5 * rho[-1] * tpt[-1])
    design = np.column_stack([np.ones_like(rho), rho**-2])
    coef, *_ = np.linalg.lstsq(design, tht, rcond=None)
    theta_inf_fit = float(coef[0])

    spread = abs(theta_inf_point - theta_inf_fit)
    if spread > disagreement_tol:
        raise NotConical(
            f"tail estimators disagree by {spread:.3g} (> {disagreement_tol:g}); "
            "the end is not settling onto a ray"
        )
    alpha = math.pi / 2.0 - theta_inf_point
    return alpha, spread


# ---------------------------------------------------------------------------
# integration drivers


def _disk_series(n: int, z0: float, s):
    """Even/odd power series of the disk solution near the axis."""
    s = np.asarray(s, dtype=float)
    a1 = z0 / (2.0 * n)
    a3 = -a1 * (1.0 + z0 * a1) / (4.0 * (n + 2.0))
    x = s - a1**2 * s**3 / 6.0
    z = z0 + a1 * s**2 / 2.0 + (a3 - a1**3 / 6.0) * s**4 / 4.0
    th = a1 * s + a3 * s**3
    tp = a1 + 3.0 * a3 * s**2
    return x, z, th, tp


def _disk_handoff(z0: float) -> float:
    a1 = abs(z0) / 4.0  # n >= 2 bound, only sets the scale
    return min(1e-2, 1e-2 / max(1.0, a1))


def _raise_for_status(status, s_end, x_end, th_end):
    if status == _ode.OK:
        return
    if status == _ode.HIT_AXIS:
        raise BlowUp(f"trajectory hit the axis at s = {s_end:.6g} (x = {x_end:.3g})")
    if status == _ode.THETA_EXIT:
        raise BlowUp(
            f"tangent angle left the admissible band at s = {s_end:.6g} "
            f"(theta = {th_end:.4g})"
        )
    raise ToleranceFailure("step control failed (step underflow or step budget)")


def integrate_profile(
    n: int,
    family: str,
    shoot_param: float,
    *,
    s_max: float = S_MAX,
    ds_out: float = DS_OUT,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    theta_margin: float = THETA_MARGIN,
    residual_gate: float = 1e-8,
    refine_grid: bool = True,
    estimate: bool = True,
    lane: str | None = None,
) -> Profile:
    """Integrate a disk or neck profile onto a uniform arc-length grid.

    The returned samples sit exactly on s = k * ds, where ds starts at
    ``ds_out`` and is halved (down to DS_MIN, when ``refine_grid``) until
    the finite-difference residual measurement resolves ``residual_gate``
    (ToleranceFailure otherwise); integration failures raise BlowUp.
    """
    if family == "ray":
        raise ConfigError("ray profiles are built with straight_profile()")
    if family not in FAMILIES:
        raise ConfigError(f"family must be one of {FAMILIES}")
    if n < 2:
        raise ConfigError("profile system needs n >= 2")
    if s_max <= 1.0:
        raise ConfigError("s_max must exceed 1")
    if ds_out <= 0 or ds_out > 0.1:
        raise ConfigError("ds_out must lie in (0, 0.1]")

    if family == "disk":
        z0 = float(shoot_param)
        if z0 < 0:
            raise DomainError("disk height z0 must be >= 0")
        if z0 == 0.0:
            # the flat plane: exact at every node
            nnodes = int(math.floor(s_max / ds_out + 1e-9)) + 1
            grid = np.arange(nnodes) * ds_out
            samples = np.column_stack([grid, grid, np.zeros(nnodes), np.zeros(nnodes)])
            tp = np.zeros(nnodes)
            return Profile(
                n=n,
                family="disk",
                shoot_param=0.0,
                tol=rtol,
                samples=samples,
                theta_prime=tp,
                alpha_hat=math.pi / 2.0,
                residual_sup=0.0,
                alpha_uncertainty=0.0,
                mean_convex=False,
                h_sign_changes=0,
                backend=_ode.backend(),
            )
    elif family == "neck":
        x0 = float(shoot_param)
        if x0 <= 0:
            raise DomainError("neck radius x0 must be positive")

    def _build(ds: float) -> tuple[np.ndarray, np.ndarray]:
        nnodes = int(math.floor(s_max / ds + 1e-9)) + 1
        grid = np.arange(nnodes) * ds
        if family == "disk":
            s_hand = _disk_handoff(z0)
            k0 = int(math.floor(s_hand / ds))
            s_start = k0 * ds if k0 >= 1 else s_hand
            head_s = grid[: k0 + 1]
            hx, hz, hth, htp = _disk_series(n, z0, head_s)
            x_start, z_start, th_start, _ = (
                (hx[-1], hz[-1], hth[-1], None)
                if k0 >= 1
                else _disk_series(n, z0, np.array([s_hand]))
            )
            if k0 < 1:
                x_start, z_start, th_start = x_start[0], z_start[0], th_start[0]
            out0 = (k0 + 1) * ds - s_start
            raw = _ode.integrate_raw(
                n,
                1.0,
                float(x_start),
                float(z_start),
                float(th_start),
                s_max - s_start,
                rtol=rtol,
                atol=atol,
                ds_out=ds,
                out0=out0,
                theta_margin=theta_margin,
                record_start=False,
                lane=lane,
            )
            status, ks, kx, kz, kth, s_end, x_end, z_end, th_end, _, _ = raw
            _raise_for_status(status, s_start + s_end, x_end, th_end)
            s_tail = s_start + np.asarray(ks)
            smp = np.column_stack(
                [
                    np.concatenate([head_s, s_tail]),
                    np.concatenate([hx, np.asarray(kx)]),
                    np.concatenate([hz, np.asarray(kz)]),
                    np.concatenate([hth, np.asarray(kth)]),
                ]
            )
            tpv = np.empty(smp.shape[0])
            tpv[: k0 + 1] = htp
            tpv[k0 + 1 :] = _theta_prime(
                n, smp[k0 + 1 :, 1], smp[k0 + 1 :, 2], smp[k0 + 1 :, 3]
            )
        else:
            raw = _ode.integrate_raw(
                n,
                1.0,
                x0,
                0.0,
                math.pi / 2.0,
                s_max,
                rtol=rtol,
                atol=atol,
                ds_out=ds,
                out0=ds,
                theta_margin=theta_margin,
                record_start=True,
                lane=lane,
            )
            status, ks, kx, kz, kth, s_end, x_end, z_end, th_end, _, _ = raw
            _raise_for_status(status, s_end, x_end, th_end)
            smp = np.column_stack(
                [np.asarray(ks), np.asarray(kx), np.asarray(kz), np.asarray(kth)]
            )
            tpv = _theta_prime(n, smp[:, 1], smp[:, 2], smp[:, 3])

        # snap the arc-length column onto the exact grid values
        idx = np.rint(smp[:, 0] / ds).astype(int)
        if np.max(np.abs(smp[:, 0] - idx * ds)) > 1e-9:
            raise ToleranceFailure("integrator output drifted off the forced grid")
        smp[:, 0] = idx * ds
        return smp, tpv

    # The residual check differences the stored samples, so its truncation
    # error scales like ds**4 and can dominate the integrator error near
    # high-curvature starts (small neck radii).  Refine the output grid
    # dyadically until the measurement resolves the gate.
    ds = ds_out
    while True:
        samples, tp = _build(ds)
        residual_sup, _ = profile_residual(samples, n)
        if residual_sup <= residual_gate or not refine_grid or ds <= DS_MIN:
            break
        ds *= 0.5
    if residual_sup > residual_gate:
        raise ToleranceFailure(
            f"system residual {residual_sup:.3g} exceeds the gate {residual_gate:g}"
        )

    alpha_hat = math.nan
    alpha_unc = None
    if estimate:
        alpha_hat, alpha_unc = estimate_alpha(
            samples[:, 0], samples[:, 1], samples[:, 2], samples[:, 3], tp
        )
    Hvals = profile_mean_curvature(samples[:, 1], samples[:, 2], samples[:, 3])
    return Profile(
        n=n,
        family=family,
        shoot_param=float(shoot_param),
        tol=rtol,
        samples=samples,
        theta_prime=tp,
        alpha_hat=alpha_hat,
        residual_sup=residual_sup,
        alpha_uncertainty=alpha_unc,
        mean_convex=bool(np.min(Hvals) > 0.0),
        h_sign_changes=_sign_changes(Hvals),
        backend=_ode.backend(),
    )


def straight_profile(
    n: int, alpha: float, s_range: tuple[float, float] = (1.0, 9.0), npts: int = 257
) -> Profile:
    """Ray through the origin with inclination alpha (a cone when revolved).

    Not a solution of the system unless alpha = pi/2; the reported residual
    is the honest defect (n-1) cot(alpha) / x and is not gated.
    """
    if not 0 < alpha <= math.pi / 2:
        raise ConfigError("ray inclination must lie in (0, pi/2]")
    s0, s1 = s_range
    if not 0 < s0 < s1:
        raise ConfigError("ray needs 0 < s0 < s1")
    if npts < 8:
        raise ConfigError("ray needs at least 8 samples")
    s = np.linspace(s0, s1, npts)
    th = math.pi / 2.0 - alpha
    samples = np.column_stack(
        [s, s * math.sin(alpha), s * math.cos(alpha), np.full(npts, th)]
    )
    residual_sup, _ = profile_residual(samples, n) if npts >= 7 else (0.0, None)
    return Profile(
        n=n,
        family="ray",
        shoot_param=alpha,
        tol=0.0,
        samples=samples,
        theta_prime=np.zeros(npts),
        alpha_hat=alpha,
        residual_sup=residual_sup,
        alpha_uncertainty=0.0,
        mean_convex=False,
        h_sign_changes=0,
        backend="closed-form",
    )


# ---------------------------------------------------------------------------
# shooting


def _alpha_of_param(
    n, family, param, *, s_max, rtol, atol, theta_margin, lane
) -> float:
    """Fast inclination estimate for one shooting parameter (nan on failure)."""
    if family == "disk":
        if param == 0.0:
            return math.pi / 2.0
        s_hand = _disk_handoff(param)
        x0, z0, th0, _ = _disk_series(n, param, np.array([s_hand]))
        raw = _ode.integrate_raw(
            n,
            1.0,
            float(x0[0]),
            float(z0[0]),
            float(th0[0]),
            s_max - s_hand,
            rtol=rtol,
            atol=atol,
            ds_out=0.0,
            theta_margin=theta_margin,
            record_start=True,
            lane=lane,
        )
    else:
        raw = _ode.integrate_raw(
            n,
            1.0,
            float(param),
            0.0,
            math.pi / 2.0,
            s_max,
            rtol=rtol,
            atol=atol,
            ds_out=0.0,
            theta_margin=theta_margin,
            record_start=True,
            lane=lane,
        )
    status, ks, kx, kz, kth = raw[:5]
    if status != _ode.OK or len(ks) < 8:
        return math.nan
    s = np.asarray(ks)
    x = np.asarray(kx)
    z = np.asarray(kz)
    th = np.asarray(kth)
    tp = _theta_prime(n, x, z, th)
    try:
        alpha, _ = estimate_alpha(s, x, z, th, tp)
    except NotConical:
        return math.nan
    return alpha


@dataclass(frozen=True)
class ShootingRoot:
    param: float
    alpha_hat: float
    alpha_check: float
    mean_convex: bool
    h_sign_changes: int


@dataclass(frozen=True)
class ShootingResult:
    """Roots of alpha_hat(param) = target for one family, with scan log."""

    n: int
    family: str
    target_alpha: float
    angle_tol: float
    roots: tuple[ShootingRoot, ...]
    scan_params: np.ndarray
    scan_alphas: np.ndarray
    bracket_log: list

    def root_params(self) -> list[float]:
        return [r.param for r in self.roots]

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "family": self.family,
            "target_alpha": self.target_alpha,
            "angle_tol": self.angle_tol,
            "roots": [
                {
                    "param": r.param,
                    "alpha_hat": r.alpha_hat,
                    "alpha_check": r.alpha_check,
                    "mean_convex": r.mean_convex,
                    "h_sign_changes": r.h_sign_changes,
                }
                for r in self.roots
            ],
            "scan": [
                {"param": float(p), "alpha_hat": float(a)}
                for p, a in zip(self.scan_params, self.scan_alphas)
            ],
            "bracket_log": self.bracket_log,
        }


def shoot_to_angle(
    n: int,
    family: str,
    target_alpha: float,
    *,
    angle_tol: float = 1e-6,
    scan_lo: float = 1e-2,
    scan_hi: float = 1e2,
    per_decade: int = 24,
    s_max: float = S_MAX,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    theta_margin: float = THETA_MARGIN,
    max_bisect: int = 200,
    lane: str | None = None,
) -> ShootingResult:
    """All shooting parameters whose end inclination matches the target.

    The parameter range is scanned on a log grid; every sign change of
    alpha_hat - target is refined by bisection (in log of the parameter,
    linearly when the bracket starts at the plane parameter 0).
    """
    if family not in ("disk", "neck"):
        raise ConfigError("shooting families are disk and neck")
    if not 0 < target_alpha <= math.pi / 2:
        raise DomainError("target inclination must lie in (0, pi/2]")
    if not 0 < scan_lo < scan_hi:
        raise ConfigError("scan range needs 0 < lo < hi")
    if angle_tol <= 0:
        raise ConfigError("angle tolerance must be positive")

    ndec = math.log10(scan_hi / scan_lo)
    count = max(2, int(round(per_decade * ndec)) + 1)
    params = list(np.geomspace(scan_lo, scan_hi, count))
    if family == "disk":
        params = [0.0] + params

    def f(p):
        return _alpha_of_param(
            n, family, p, s_max=s_max, rtol=rtol, atol=atol,
            theta_margin=theta_margin, lane=lane,
        )

    alphas = np.array([f(p) for p in params])
    params = np.asarray(params)
    bracket_log: list = []
    roots: list[ShootingRoot] = []
    root_params: list[float] = []

    def register(param, alpha_val, log_entry):
        for seen in root_params:
            scale = max(abs(seen), abs(param), 1e-12)
            if abs(param - seen) <= 1e-3 * scale:
                return
        root_params.append(param)
        bracket_log.append(log_entry)
        check = integrate_profile(
            n, family, param, s_max=s_max, ds_out=DS_OUT, rtol=rtol, atol=atol,
            theta_margin=theta_margin, lane=lane,
        )
        roots.append(
            ShootingRoot(
                param=float(param),
                alpha_hat=float(alpha_val),
                alpha_check=float(check.alpha_hat),
                mean_convex=check.mean_convex,
                h_sign_changes=check.h_sign_changes,
            )
        )

    # direct hits on scan nodes
    for p, a in zip(params, alphas):
        if math.isfinite(a) and abs(a - target_alpha) <= angle_tol:
            register(float(p), a, {"kind": "grid_hit", "param": float(p), "alpha_hat": float(a)})

    # sign-change brackets
    for i in range(len(params) - 1):
        a0, a1 = alphas[i], alphas[i + 1]
        if not (math.isfinite(a0) and math.isfinite(a1)):
            continue
        f0, f1 = a0 - target_alpha, a1 - target_alpha
        if f0 == 0.0 or f1 == 0.0 or f0 * f1 > 0:
            continue
        lo, hi = float(params[i]), float(params[i + 1])
        flo = f0
        iters = 0
        mid = lo
        fmid = flo
        while iters < max_bisect:
            mid = 0.5 * (lo + hi) if lo == 0.0 else math.sqrt(lo * hi)
            fmid = f(mid) - target_alpha
            iters += 1
            if math.isnan(fmid):
                raise ToleranceFailure(
                    f"integration failed inside bracket [{lo:g}, {hi:g}]"
                )
            if abs(fmid) <= angle_tol:
                break
            if flo * fmid <= 0:
                hi = mid
            else:
                lo, flo = mid, fmid
            if (hi - lo) <= 1e-14 * max(1.0, hi):
                break
        if abs(fmid) > angle_tol:
            raise ToleranceFailure(
                f"bisection stalled in [{lo:g}, {hi:g}] with gap {abs(fmid):.3g}"
            )
        register(
            float(mid),
            fmid + target_alpha,
            {
                "kind": "bisection",
                "bracket": [float(params[i]), float(params[i + 1])],
                "root": float(mid),
                "iterations": iters,
                "alpha_hat": float(fmid + target_alpha),
            },
        )

    order = np.argsort([r.param for r in roots])
    return ShootingResult(
        n=n,
        family=family,
        target_alpha=float(target_alpha),
        angle_tol=float(angle_tol),
        roots=tuple(roots[i] for i in order),
        scan_params=params,
        scan_alphas=alphas,
        bracket_log=bracket_log,
    )


@dataclass(frozen=True)
class CriticalAngleResult:
    """Minimum of the neck inclination landscape for one dimension."""

    n: int
    alpha_crit: float
    param: float
    param_bracket: tuple[float, float]
    scan_params: np.ndarray
    scan_alphas: np.ndarray

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "alpha_crit": self.alpha_crit,
            "param": self.param,
            "param_bracket": list(self.param_bracket),
            "scan": [
                {"param": float(p), "alpha_hat": float(a)}
                for p, a in zip(self.scan_params, self.scan_alphas)
            ],
        }


def critical_angle(
    n: int,
    *,
    scan_lo: float = 5e-2,
    scan_hi: float = 20.0,
    per_decade: int = 32,
    s_max: float = S_MAX,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    theta_margin: float = THETA_MARGIN,
    log_width: float = 1e-8,
    lane: str | None = None,
) -> CriticalAngleResult:
    """Smallest neck-end inclination over the shooting parameter (n >= 3).

    Scans the landscape, demands a single interior minimum (raising
    NonConvexLandscape with all of them otherwise), then refines it by
    golden-section search on the log of the parameter.
    """
    if n < 3:
        raise DomainError("the neck inclination landscape is searched for n >= 3")
    ndec = math.log10(scan_hi / scan_lo)
    count = max(5, int(round(per_decade * ndec)) + 1)
    params = np.geomspace(scan_lo, scan_hi, count)

    def f(p):
        return _alpha_of_param(
            n, "neck", float(p), s_max=s_max, rtol=rtol, atol=atol,
            theta_margin=theta_margin, lane=lane,
        )

    alphas = np.array([f(p) for p in params])
    valid = np.isfinite(alphas)
    if valid.sum() < 5:
        raise ToleranceFailure("too few valid scan points for the landscape")

    floor = 1e-9
    minima = []
    for i in range(1, count - 1):
        if not (valid[i - 1] and valid[i] and valid[i + 1]):
            continue
        if alphas[i] < alphas[i - 1] - floor and alphas[i] < alphas[i + 1] - floor:
            minima.append(i)
    if len(minima) == 0:
        raise DomainError(
            "no interior minimum of the inclination landscape in the scan range; "
            "widen [scan_lo, scan_hi]"
        )
    if len(minima) > 1:
        raise NonConvexLandscape(
            "multiple interior minima of the inclination landscape",
            minima=[(float(params[i]), float(alphas[i])) for i in minima],
        )

    i = minima[0]
    a, b = math.log(params[i - 1]), math.log(params[i + 1])
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc = f(math.exp(c))
    fd = f(math.exp(d))
    while b - a > log_width:
        if math.isnan(fc) or math.isnan(fd):
            raise ToleranceFailure("integration failed during the minimum search")
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(math.exp(c))
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(math.exp(d))
    p_min = math.exp(0.5 * (a + b))
    a_min = f(p_min)
    if math.isnan(a_min):
        raise ToleranceFailure("integration failed at the landscape minimum")
    return CriticalAngleResult(
        n=n,
        alpha_crit=float(a_min),
        param=float(p_min),
        param_bracket=(float(math.exp(a)), float(math.exp(b))),
        scan_params=params,
        scan_alphas=alphas,
    )


# ---------------------------------------------------------------------------
# revolution into a surface patch


def _interp_uniform(s_nodes: np.ndarray, values: np.ndarray, query: np.ndarray) -> np.ndarray:
    """Cubic 4-point Lagrange interpolation on a uniform grid."""
    s0 = float(s_nodes[0])
    h = float(s_nodes[1] - s_nodes[0])
    t = (np.asarray(query, dtype=float) - s0) / h
    npts = len(s_nodes)
    i = np.clip(np.floor(t).astype(int), 1, npts - 3)
    xi = t - i
    w0 = -xi * (xi - 1.0) * (xi - 2.0) / 6.0
    w1 = (xi + 1.0) * (xi - 1.0) * (xi - 2.0) / 2.0
    w2 = -(xi + 1.0) * xi * (xi - 2.0) / 2.0
    w3 = (xi + 1.0) * xi * (xi - 1.0) / 6.0
    return (
        w0 * values[i - 1] + w1 * values[i] + w2 * values[i + 1] + w3 * values[i + 2]
    )


@dataclass(frozen=True)
class RevolvedReference:
    """Closed-form fields of a revolved profile on the patch grid."""

    x: np.ndarray
    z: np.ndarray
    theta: np.ndarray
    theta_prime: np.ndarray
    nu: np.ndarray
    H: np.ndarray
    A2: np.ndarray


def revolve(
    profile: Profile,
    s_nodes,
    theta_axes,
    *,
    margin: float = DEFAULT_POLE_MARGIN,
    boundary_policy: str = "one_sided",
) -> tuple[SurfacePatch, RevolvedReference]:
    """Revolve a profile segment about the axis into a surface patch.

    ``s_nodes`` must lie inside the sampled arc-length range; the profile
    columns are interpolated with a cubic stencil.  Returns the patch and
    the closed-form reference fields (normal, H, |A|^2) on its grid, with
    the normal oriented by continuing nu = (-sin(theta) Phi, cos(theta)).
    """
    s_nodes = np.asarray(s_nodes, dtype=float)
    d = profile.n - 1
    axes = [np.asarray(t, dtype=float) for t in theta_axes]
    if len(axes) != d:
        raise ConfigError(f"revolving an n = {profile.n} profile needs {d} angle axes")
    s = profile.s
    if s_nodes.ndim != 1 or s_nodes.size < 2:
        raise ConfigError("s_nodes must be a 1-d array of >= 2 nodes")
    if s_nodes[0] < s[0] - 1e-12 or s_nodes[-1] > s[-1] + 1e-12:
        raise DomainError(
            f"requested arc range [{s_nodes[0]:g}, {s_nodes[-1]:g}] is outside "
            f"the sampled range [{s[0]:g}, {s[-1]:g}]"
        )
    ds = np.diff(s)
    if np.max(np.abs(ds - ds[0])) > 1e-9 * abs(ds[0]):
        raise ConfigError("revolve needs a profile on a uniform arc-length grid")

    xq = _interp_uniform(s, profile.x, s_nodes)
    zq = _interp_uniform(s, profile.z, s_nodes)
    thq = _interp_uniform(s, profile.theta, s_nodes)
    tpq = _interp_uniform(s, profile.theta_prime, s_nodes)
    if np.any(xq <= 1e-9):
        raise AxisSingularity("revolved segment touches the axis; move s_nodes away")

    grids = np.meshgrid(s_nodes, *axes, indexing="ij")
    theta_grid = np.stack(grids[1:], axis=-1) if d else None
    phi, _, _, _ = sphere_jet(theta_grid, margin)
    shape = grids[0].shape
    expand = (slice(None),) + (None,) * d

    n = profile.n
    F = np.empty(shape + (n + 1,))
    F[..., :n] = xq[expand][..., None] * phi
    F[..., n] = zq[expand] * np.ones(shape)

    nu = np.empty_like(F)
    nu[..., :n] = -np.sin(thq)[expand][..., None] * phi
    nu[..., n] = np.cos(thq)[expand] * np.ones(shape)

    sin_over_x = np.sin(thq) / xq
    H = (tpq + (n - 1) * sin_over_x)[expand] * np.ones(shape)
    A2 = (tpq**2 + (n - 1) * sin_over_x**2)[expand] * np.ones(shape)

    periodic = (False,) + tuple(wraps_period(t) for t in axes)
    patch = SurfacePatch(
        axes=tuple([s_nodes] + axes),
        points=F,
        boundary_policy=boundary_policy,
        periodic=periodic,
    )
    ref = RevolvedReference(
        x=xq[expand] * np.ones(shape),
        z=zq[expand] * np.ones(shape),
        theta=thq[expand] * np.ones(shape),
        theta_prime=tpq[expand] * np.ones(shape),
        nu=nu,
        H=H,
        A2=A2,
    )
    return patch, ref
