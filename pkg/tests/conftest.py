"""Shared fixtures: memoized profile integrations and revolved patches.

Profile integration and second-fundamental-form assembly dominate the suite's
runtime, and many tests interrogate the same handful of constructions.  The
helpers here cache by construction parameters (profiles are immutable) so each
expensive object is built once per session.
"""
from __future__ import annotations

import functools

import numpy as np
import pytest

from expanders.cone import sphere_jet
from expanders.profiles import integrate_profile, revolve
from expanders.surface import SurfacePatch, fundamental_forms


@functools.lru_cache(maxsize=None)
def _profile(n, family, param, s_max):
    return integrate_profile(n, family, param, s_max=s_max)


@functools.lru_cache(maxsize=None)
def _revolved(n, family, param, s_max, s_lo, s_hi, size, azimuth_size):
    prof = _profile(n, family, param, s_max)
    s_nodes = np.linspace(s_lo, s_hi, size)
    axes = angle_axes(n, size, azimuth_size)
    patch, ref = revolve(prof, s_nodes, axes)
    fields = fundamental_forms(patch, orient=ref.nu)
    return patch, ref, fields


def angle_axes(n, size, azimuth_size=None):
    """Angular axes for revolving an n-dimensional profile.

    Polar angles stay away from the chart poles; the azimuth covers the full
    circle without repeating the seam node, which the patch detects as
    periodic.
    """
    if azimuth_size is None:
        azimuth_size = size
    azimuth = np.linspace(0.0, 2.0 * np.pi, azimuth_size, endpoint=False)
    polar = np.linspace(0.35, np.pi - 0.35, size)
    return tuple([polar] * (n - 2)) + (azimuth,)


def sphere_patch(radius=2.0, size=33, dim=2):
    """Chart patch on a round sphere, with the inward orientation vector.

    With the normal pointing at the center, the mean curvature is dim/radius
    and the squared second fundamental form is dim/radius**2.
    """
    polar = np.linspace(0.35, np.pi - 0.35, size)
    azimuth = np.linspace(0.0, 2.0 * np.pi, size, endpoint=False)
    axes = tuple([polar] * (dim - 1)) + (azimuth,)
    grids = np.meshgrid(*axes, indexing="ij")
    theta = np.stack(grids, axis=-1)
    flat = theta.reshape(-1, dim)
    pts = np.array([radius * sphere_jet(row, margin=0.1)[0] for row in flat])
    points = pts.reshape(theta.shape[:-1] + (dim + 1,))
    patch = SurfacePatch(axes=axes, points=points)
    return patch, -points


@pytest.fixture(scope="session")
def profile_of():
    """Callable (n, family, param, s_max=6.0) -> cached Profile."""

    def build(n, family, param, s_max=6.0):
        return _profile(n, family, param, float(s_max))

    return build


@pytest.fixture(scope="session")
def revolved_of():
    """Callable -> cached (patch, reference, fields) for a revolved profile."""

    def build(n, family, param, *, s_max=6.0, s_lo=1.0, s_hi=5.0, size=33,
              azimuth_size=None):
        return _revolved(n, family, param, float(s_max), float(s_lo),
                         float(s_hi), int(size), azimuth_size)

    return build
