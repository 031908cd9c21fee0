# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Dormand-Prince 5(4) kernel: operation-for-operation twin of
``_ode_py``.  Keep the two implementations in sync."""

from libc.math cimport cos, sin, sqrt, fabs, pow, isfinite, M_PI

OK = 0
HIT_AXIS = 1
THETA_EXIT = 2
FAILED = 3

cdef double _A21 = 1.0 / 5.0
cdef double _A31 = 3.0 / 40.0
cdef double _A32 = 9.0 / 40.0
cdef double _A41 = 44.0 / 45.0
cdef double _A42 = -56.0 / 15.0
cdef double _A43 = 32.0 / 9.0
cdef double _A51 = 19372.0 / 6561.0
cdef double _A52 = -25360.0 / 2187.0
cdef double _A53 = 64448.0 / 6561.0
cdef double _A54 = -212.0 / 729.0
cdef double _A61 = 9017.0 / 3168.0
cdef double _A62 = -355.0 / 33.0
cdef double _A63 = 46732.0 / 5247.0
cdef double _A64 = 49.0 / 176.0
cdef double _A65 = -5103.0 / 18656.0
cdef double _A71 = 35.0 / 384.0
cdef double _A73 = 500.0 / 1113.0
cdef double _A74 = 125.0 / 192.0
cdef double _A75 = -2187.0 / 6784.0
cdef double _A76 = 11.0 / 84.0
cdef double _E1 = 71.0 / 57600.0
cdef double _E3 = -71.0 / 16695.0
cdef double _E4 = 71.0 / 1920.0
cdef double _E5 = -17253.0 / 339200.0
cdef double _E6 = 22.0 / 525.0
cdef double _E7 = -1.0 / 40.0


def integrate(
    int n,
    double sign,
    double x0,
    double z0,
    double th0,
    double s_len,
    double rtol,
    double atol,
    double h_max,
    double ds_out,
    double out0,
    double theta_margin,
    double x_floor,
    double h_init,
    bint record_start,
    long max_steps,
):
    """Same contract as ``_ode_py.integrate``."""
    cdef double nm1 = <double>(n - 1)
    cdef double sgn = sign
    cdef double th_cap = M_PI / 2.0 + theta_margin

    cdef double s = 0.0
    cdef double x = x0
    cdef double z = z0
    cdef double th = th0

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
    if fabs(th) > th_cap:
        return (THETA_EXIT, out_s, out_x, out_z, out_th, s, x, z, th, 0, 0)

    cdef double c = cos(th)
    cdef double si = sin(th)
    cdef double k1x = sgn * c
    cdef double k1z = sgn * si
    cdef double k1t = sgn * (0.5 * (z * c - x * si) - nm1 * si / x)

    cdef bint forced = ds_out > 0.0
    cdef long next_j = 0

    cdef double h
    if h_init > 0.0:
        h = h_init
    else:
        h = 1e-2 / (1.0 + fabs(k1t))
    if h > h_max:
        h = h_max
    if forced and h > ds_out:
        h = ds_out

    cdef double tiny = 1e-12 * (1.0 if s_len < 1.0 else s_len)
    cdef double h_floor = 1e-14 * (1.0 if s_len < 1.0 else s_len)
    cdef long naccept = 0
    cdef long nreject = 0
    cdef int status = OK

    cdef bint hit_out, bad
    cdef double h_used, next_out
    cdef double xa, za, ta
    cdef double k2x, k2z, k2t, k3x, k3z, k3t, k4x, k4z, k4t
    cdef double k5x, k5z, k5t, k6x, k6z, k6t, k7x, k7z, k7t
    cdef double x5, z5, t5, ex, ez, et, scx, scz, sct, rx, rz, rt, err, fac

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
                out_s.append(s)
                out_x.append(x)
                out_z.append(z)
                out_th.append(th)
                next_j += 1
                continue
            if s + h_used >= next_out - 1e-15 * (1.0 if next_out < 1.0 else next_out):
                h_used = next_out - s
                hit_out = True
        if h_used < h_floor:
            status = FAILED
            break
        if naccept + nreject >= max_steps:
            status = FAILED
            break

        bad = False
        xa = x + h_used * _A21 * k1x
        za = z + h_used * _A21 * k1z
        ta = th + h_used * _A21 * k1t
        if xa <= 0.0:
            bad = True
        else:
            c = cos(ta)
            si = sin(ta)
            k2x = sgn * c
            k2z = sgn * si
            k2t = sgn * (0.5 * (za * c - xa * si) - nm1 * si / xa)

            xa = x + h_used * (_A31 * k1x + _A32 * k2x)
            za = z + h_used * (_A31 * k1z + _A32 * k2z)
            ta = th + h_used * (_A31 * k1t + _A32 * k2t)
            if xa <= 0.0:
                bad = True
        if not bad:
            c = cos(ta)
            si = sin(ta)
            k3x = sgn * c
            k3z = sgn * si
            k3t = sgn * (0.5 * (za * c - xa * si) - nm1 * si / xa)

            xa = x + h_used * (_A41 * k1x + _A42 * k2x + _A43 * k3x)
            za = z + h_used * (_A41 * k1z + _A42 * k2z + _A43 * k3z)
            ta = th + h_used * (_A41 * k1t + _A42 * k2t + _A43 * k3t)
            if xa <= 0.0:
                bad = True
        if not bad:
            c = cos(ta)
            si = sin(ta)
            k4x = sgn * c
            k4z = sgn * si
            k4t = sgn * (0.5 * (za * c - xa * si) - nm1 * si / xa)

            xa = x + h_used * (_A51 * k1x + _A52 * k2x + _A53 * k3x + _A54 * k4x)
            za = z + h_used * (_A51 * k1z + _A52 * k2z + _A53 * k3z + _A54 * k4z)
            ta = th + h_used * (_A51 * k1t + _A52 * k2t + _A53 * k3t + _A54 * k4t)
            if xa <= 0.0:
                bad = True
        if not bad:
            c = cos(ta)
            si = sin(ta)
            k5x = sgn * c
            k5z = sgn * si
            k5t = sgn * (0.5 * (za * c - xa * si) - nm1 * si / xa)

            xa = x + h_used * (_A61 * k1x + _A62 * k2x + _A63 * k3x + _A64 * k4x + _A65 * k5x)
            za = z + h_used * (_A61 * k1z + _A62 * k2z + _A63 * k3z + _A64 * k4z + _A65 * k5z)
            ta = th + h_used * (_A61 * k1t + _A62 * k2t + _A63 * k3t + _A64 * k4t + _A65 * k5t)
            if xa <= 0.0:
                bad = True
        if not bad:
            c = cos(ta)
            si = sin(ta)
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

        c = cos(t5)
        si = sin(t5)
        k7x = sgn * c
        k7z = sgn * si
        k7t = sgn * (0.5 * (z5 * c - x5 * si) - nm1 * si / x5)

        ex = h_used * (_E1 * k1x + _E3 * k3x + _E4 * k4x + _E5 * k5x + _E6 * k6x + _E7 * k7x)
        ez = h_used * (_E1 * k1z + _E3 * k3z + _E4 * k4z + _E5 * k5z + _E6 * k6z + _E7 * k7z)
        et = h_used * (_E1 * k1t + _E3 * k3t + _E4 * k4t + _E5 * k5t + _E6 * k6t + _E7 * k7t)

        scx = atol + rtol * (fabs(x) if fabs(x) > fabs(x5) else fabs(x5))
        scz = atol + rtol * (fabs(z) if fabs(z) > fabs(z5) else fabs(z5))
        sct = atol + rtol * (fabs(th) if fabs(th) > fabs(t5) else fabs(t5))
        # squares by explicit multiplication: libm pow(x, 2.0) is not always
        # correctly rounded, so x * x is what both lanes must compute
        rx = ex / scx
        rz = ez / scz
        rt = et / sct
        err = sqrt((rx * rx + rz * rz + rt * rt) / 3.0)

        if not isfinite(err):
            h = 0.5 * h_used
            nreject += 1
            continue

        if err <= 1.0:
            naccept += 1
            s = s + h_used
            if forced and hit_out:
                s = out0 + next_j * ds_out
            x = x5
            z = z5
            th = t5
            k1x = k7x
            k1z = k7z
            k1t = k7t
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
            if fabs(th) > th_cap:
                status = THETA_EXIT
                break
            if err == 0.0:
                fac = 5.0
            else:
                fac = 0.9 * pow(err, -0.2)
                if fac > 5.0:
                    fac = 5.0
                elif fac < 0.2:
                    fac = 0.2
            h = h_used * fac
        else:
            nreject += 1
            fac = 0.9 * pow(err, -0.2)
            if fac < 0.2:
                fac = 0.2
            elif fac > 1.0:
                fac = 1.0
            h = h_used * fac

    return (status, out_s, out_x, out_z, out_th, s, x, z, th, naccept, nreject)
