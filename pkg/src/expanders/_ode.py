"""Kernel lane selection for the profile integrator.

The compiled extension ``_ode_cy`` is used when importable; otherwise the
pure-Python twin ``_ode_py`` takes over.  The environment variable
``EXPANDERS_ODE_BACKEND`` forces a lane: ``python``, ``cython``, or ``auto``
(empty behaves like auto).  Requesting ``cython`` without the compiled
module raises at import time rather than silently degrading.
"""
from __future__ import annotations

import os

from . import _ode_py
from .errors import ConfigError

OK = _ode_py.OK
HIT_AXIS = _ode_py.HIT_AXIS
THETA_EXIT = _ode_py.THETA_EXIT
FAILED = _ode_py.FAILED
STATUS_NAMES = _ode_py.STATUS_NAMES

try:
    from . import _ode_cy
except ImportError:  # pragma: no cover - depends on the build environment
    _ode_cy = None


def _select(name: str):
    name = (name or "auto").strip().lower()
    if name == "auto":
        return ("cython", _ode_cy) if _ode_cy is not None else ("python", _ode_py)
    if name == "python":
        return "python", _ode_py
    if name == "cython":
        if _ode_cy is None:
            raise ConfigError(
                "EXPANDERS_ODE_BACKEND=cython but the compiled kernel is not built"
            )
        return "cython", _ode_cy
    raise ConfigError(f"unknown ODE backend {name!r} (use python, cython, or auto)")


_BACKEND_NAME, _KERNEL = _select(os.environ.get("EXPANDERS_ODE_BACKEND", "auto"))


def backend() -> str:
    """Name of the active kernel lane."""
    return _BACKEND_NAME


def available_backends() -> tuple[str, ...]:
    return ("python", "cython") if _ode_cy is not None else ("python",)


def kernel(name: str | None = None):
    """The raw kernel module for a lane (active lane when name is None)."""
    if name is None:
        return _KERNEL
    return _select(name)[1]


def integrate_raw(
    n: int,
    sign: float,
    x0: float,
    z0: float,
    th0: float,
    s_len: float,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    h_max: float = 0.5,
    ds_out: float = 0.0,
    out0: float = 0.0,
    theta_margin: float = 0.35,
    x_floor: float = 1e-9,
    h_init: float = 0.0,
    record_start: bool = True,
    max_steps: int = 2_000_000,
    lane=None,
):
    """Run one kernel integration; returns the raw kernel tuple."""
    if n < 2:
        raise ConfigError("profile system needs n >= 2")
    if s_len <= 0:
        raise ConfigError("integration length must be positive")
    if rtol <= 0 or atol <= 0:
        raise ConfigError("tolerances must be positive")
    if h_max <= 0:
        raise ConfigError("h_max must be positive")
    mod = _KERNEL if lane is None else _select(lane)[1]
    return mod.integrate(
        int(n),
        float(sign),
        float(x0),
        float(z0),
        float(th0),
        float(s_len),
        float(rtol),
        float(atol),
        float(h_max),
        float(ds_out),
        float(out0),
        float(theta_margin),
        float(x_floor),
        float(h_init),
        bool(record_start),
        int(max_steps),
    )
