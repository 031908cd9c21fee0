"""Pure-Python adaptive Dormand-Prince 5(4) kernel for the profile system.

The state is (x, z, theta) with arc-length derivative

    x'     = sign * cos(theta)
    z'     = sign * sin(theta)
    theta' = sign * ( (z cos(theta) - x sin(theta)) / 2 - (n - 1) sin(theta) / x )

Internal time runs forward from 0 to ``s_len``; ``sign`` folds the direction
into the right-hand side so backward integration reuses the same loop.

This module is the reference lane; ``_ode_cy`` is an operation-for-operation
compiled twin.  Keep the two in sync.
"""
from __future__ import annotations

import math

OK = 0
HIT_AXIS = 1
THETA_EXIT = 2
FAILED = 3

STATUS_NAMES = {OK: "ok", HIT_AXIS: "hit_axis", THETA_EXIT: "theta_exit", FAILED: "failed"}

# Dormand-Prince 5(4) tableau (the system is autonomous, so the abscissae
# c_i are never needed)
_A21 = 1.0 / 5.0
_A31 = 3.0 / 40.0
_A32 = 9.0 / 40.0
_A41 = 44.0 / 45.0
_A42 = -56.0 / 15.0
_A43 = 32.0 / 9.0
_A51 = 19372.0 / 6561.0
_A52 = -25360.0 / 2187.0
_A53 = 64448.0 / 6561.0
_A54 = -212.0 / 729.0
_A61 = 9017.0 / 3168.0
_A62 = -355.0 / 33.0
_A63 = 46732.0 / 5247.0
_A64 = 49.0 / 176.0
_A65 = -5103.0 / 18656.0
_A71 = 35.0 / 384.0
_A73 = 500.0 / 1113.0
_A74 = 125.0 / 192.0
_A75 = -2187.0 / 6784.0
_A76 = 11.0 / 84.0
_E1 = 71.0 / 57600.0
_E3 = -71.0 / 16695.0
_E4 = 71.0 / 1920.0
_E5 = -17253.0 / 339200.0
_E6 = 22.0 / 525.0
_E7 = -1.0 / 40.0


def integrate(
    n,
    sign,
    x0,
    z0,
    th0,
    s_len,
    rtol,
    atol,
    h_max,
    ds_out,
    out0,
    theta_margin,
    x_floor,
    h_init,
    record_start,
    max_steps,
):
    """Integrate the profile system; see module docstring for conventions.

    Returns (status, s_list, x_list, z_list, th_list, s_end, x_end, z_end,
    th_end, naccept, nreject).  With ds_out > 0 output is recorded exactly at
    the forced nodes out0 + j*ds_out; otherwise every accepted step is
    recorded.
    """
    nm1 = float(n - 1)
    sgn = float(sign)
    th_cap = math.pi / 2.0 + theta_margin

    s = 0.0
    x = float(x0)
    z = float(z0)
    th = float(th0)

    out_s = []
    out_x = []
    out_z = []
    out_th = []
    if record_start:
        out_s.append(0.0)
        out_x.append(x)
        out_z.append(z)
        out_th.append(th)

    if x <= x_floor:
        return (HIT_AXIS, out_s, out_x, out_z, out_th, s, x, z, th, 0, 0)
    if abs(th) > th_cap:
        return (THETA_EXIT, out_s, out_x, out_z, out_th, s, x, z, th, 0, 0)

    # first derivative evaluation (FSAL slot)
    c = math.cos(th)
    si = math.sin(th)
    k1x = sgn * c
    k1z = sgn * si
    k1t = sgn * (0.5 * (z * c - x * si) - nm1 * si / x)

    forced = ds_out > 0.0
    next_j = 0

    if h_init > 0.0:
        h = h_init
    else:
        h = 1e-2 / (1.0 + abs(k1t))
    if h > h_max:
        h = h_max
    if forced and h > ds_out:
        h = ds_out

    tiny = 1e-12 * max(1.0, s_len)
    h_floor = 1e-14 * max(1.0, s_len)
    naccept = 0
    nreject = 0
    status = OK

    while s < s_len - tiny:
        hit_out = False
        h_used = h
        if h_used > h_max:
            h_used = h_max
        if s + h_used > s_len:
            h_used = s_len - s
        if forced:
            next_out = out0 + next_j * ds_out
            if next_out <= s + tiny:
                # forced node already reached (can happen at start)
                out_s.append(s)
                out_x.append(x)
                out_z.append(z)
                out_th.append(th)
                next_j += 1
                continue
            if s + h_used >= next_out - 1e-15 * max(1.0, next_out):
                h_used = next_out - s
                hit_out = True
        if h_used < h_floor:
            status = FAILED
            break
        if naccept + nreject >= max_steps:
            status = FAILED
            break

        # --- stages (FSAL: k1 carried over) ---
        bad = False
        xa = x + h_used * _A21 * k1x
        za = z + h_used * _A21 * k1z
        ta = th + h_used * _A21 * k1t
        if xa <= 0.0:
            bad = True
        else:
            c = math.cos(ta)
            si = math.sin(ta)
            k2x = sgn * c
            k2z = sgn * si
            k2t = sgn * (0.5 * (za * c - xa * si) - nm1 * si / xa)

            xa = x + h_used * (_A31 * k1x + _A32 * k2x)
            za = z + h_used * (_A31 * k1z + _A32 * k2z)
            ta = th + h_used * (_A31 * k1t + _A32 * k2t)
            if xa <= 0.0:
                bad = True
        if not bad:
            c = math.cos(ta)
            si = math.sin(ta)
            k3x = sgn * c
            k3z = sgn * si
            k3t = sgn * (0.5 * (za * c - xa * si) - nm1 * si / xa)

            xa = x + h_used * (_A41 * k1x + _A42 * k2x + _A43 * k3x)
            za = z + h_used * (_A41 * k1z + _A42 * k2z + _A43 * k3z)
            ta = th + h_used * (_A41 * k1t + _A42 * k2t + _A43 * k3t)
            if xa <= 0.0:
                bad = True
        if not bad:
            c = math.cos(ta)
            si = math.sin(ta)
            k4x = sgn * c
            k4z = sgn * si
            k4t = sgn * (0.5 * (za * c - xa * si) - nm1 * si / xa)

            xa = x + h_used * (_A51 * k1x + _A52 * k2x + _A53 * k3x + _A54 * k4x)
            za = z + h_used * (_A51 * k1z + _A52 * k2z + _A53 * k3z + _A54 * k4z)
            ta = th + h_used * (_A51 * k1t + _A52 * k2t + _A53 * k3t + _A54 * k4t)
            if xa <= 0.0:
                bad = True
        if not bad:
            c = math.cos(ta)
            si = math.sin(ta)
            k5x = sgn * c
            k5z = sgn * si
            k5t = sgn * (0.5 * (za * c - xa * si) - nm1 * si / xa)

            xa = x + h_used * (_A61 * k1x + _A62 * k2x + _A63 * k3x + _A64 * k4x + _A65 * k5x)
            za = z + h_used * (_A61 * k1z + _A62 * k2z + _A63 * k3z + _A64 * k4z + _A65 * k5z)
            ta = th + h_used * (_A61 * k1t + _A62 * k2t + _A63 * k3t + _A64 * k4t + _A65 * k5t)
            if xa <= 0.0:
                bad = True
        if not bad:
            c = math.cos(ta)
            si = math.sin(ta)
            k6x = sgn * c
            k6z = sgn * si
            k6t = sgn * (0.5 * (za * c - xa * si) - nm1 * si / xa)

            x5 = x + h_used * (_A71 * k1x + _A73 * k3x + _A74 * k4x + _A75 * k5x + _A76 * k6x)
            z5 = z + h_used * (_A71 * k1z + _A73 * k3z + _A74 * k4z + _A75 * k5z + _A76 * k6z)
            t5 = th + h_used * (_A71 * k1t + _A73 * k3t + _A74 * k4t + _A75 * k5t + _A76 * k6t)
            if x5 <= 0.0:
                bad = True
        if bad:
            h = 0.5 * h_used
            nreject += 1
            continue

        c = math.cos(t5)
        si = math.sin(t5)
        k7x = sgn * c
        k7z = sgn * si
        k7t = sgn * (0.5 * (z5 * c - x5 * si) - nm1 * si / x5)

        ex = h_used * (_E1 * k1x + _E3 * k3x + _E4 * k4x + _E5 * k5x + _E6 * k6x + _E7 * k7x)
        ez = h_used * (_E1 * k1z + _E3 * k3z + _E4 * k4z + _E5 * k5z + _E6 * k6z + _E7 * k7z)
        et = h_used * (_E1 * k1t + _E3 * k3t + _E4 * k4t + _E5 * k5t + _E6 * k6t + _E7 * k7t)

        scx = atol + rtol * max(abs(x), abs(x5))
        scz = atol + rtol * max(abs(z), abs(z5))
        sct = atol + rtol * max(abs(th), abs(t5))
        # squares by explicit multiplication: libm pow(x, 2.0) is not always
        # correctly rounded, so x * x is what both lanes must compute
        rx = ex / scx
        rz = ez / scz
        rt = et / sct
        err = math.sqrt((rx * rx + rz * rz + rt * rt) / 3.0)

        if not math.isfinite(err):
            h = 0.5 * h_used
            nreject += 1
            continue

        if err <= 1.0:
            naccept += 1
            s = s + h_used
            if forced and hit_out:
                s = out0 + next_j * ds_out  # land exactly on the node
            x, z, th = x5, z5, t5
            k1x, k1z, k1t = k7x, k7z, k7t
            if forced:
                if hit_out:
                    out_s.append(s)
                    out_x.append(x)
                    out_z.append(z)
                    out_th.append(th)
                    next_j += 1
            else:
                out_s.append(s)
                out_x.append(x)
                out_z.append(z)
                out_th.append(th)
            if x <= x_floor:
                status = HIT_AXIS
                break
            if abs(th) > th_cap:
                status = THETA_EXIT
                break
            if err == 0.0:
                fac = 5.0
            else:
                fac = 0.9 * err ** -0.2
                if fac > 5.0:
                    fac = 5.0
                elif fac < 0.2:
                    fac = 0.2
            h = h_used * fac
        else:
            nreject += 1
            fac = 0.9 * err ** -0.2
            if fac < 0.2:
                fac = 0.2
            elif fac > 1.0:
                fac = 1.0
            h = h_used * fac

    return (status, out_s, out_x, out_z, out_th, s, x, z, th, naccept, nreject)
