import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from spherefrac import (
    GreatCircle,
    cap_area,
    circle_distance,
    geodesic_distance,
    normalized_distance,
    sample_at_distance,
    sample_uniform,
    slice_cap_fraction,
    sphere_surface,
    unit_vector,
    volume_radius,
)

from oracles import cap_area_midpoint, sphere_surface_recursive


def test_sphere_surface_closed_forms():
    assert sphere_surface(0) == 2.0
    assert sphere_surface(1) == pytest.approx(2.0 * math.pi, rel=1e-15)
    assert sphere_surface(2) == pytest.approx(4.0 * math.pi, rel=1e-15)
    assert sphere_surface(3) == pytest.approx(2.0 * math.pi**2, rel=1e-15)


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_sphere_surface_matches_slicing_recursion(k):
    assert sphere_surface(k) == pytest.approx(sphere_surface_recursive(k), rel=1e-8)


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("r", [0.3, 1.0, math.pi / 2, 2.5])
def test_cap_area_matches_midpoint_rule(n, r):
    assert cap_area(n, r) == pytest.approx(cap_area_midpoint(n, r), rel=1e-8)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_cap_area_endpoints_and_monotonicity(n):
    assert cap_area(n, 0.0) == 0.0
    assert cap_area(n, math.pi) == pytest.approx(sphere_surface(n), rel=1e-12)
    radii = np.linspace(0.0, math.pi, 50)
    areas = cap_area(n, radii)
    assert np.all(np.diff(areas) > 0.0)


@given(
    n=st.sampled_from([1, 2, 3]),
    frac=st.floats(min_value=1e-6, max_value=1.0 - 1e-6),
)
def test_volume_radius_inverts_cap_area(n, frac):
    alpha = frac * sphere_surface(n)
    r = volume_radius(n, alpha)
    assert 0.0 <= r <= math.pi
    assert cap_area(n, r) == pytest.approx(alpha, rel=1e-9, abs=1e-12)


def test_geodesic_distance_basic_identities():
    gen = np.random.default_rng(1)
    x = sample_uniform(2, 64, gen)
    y = sample_uniform(2, 64, gen)
    z = sample_uniform(2, 64, gen)
    assert np.allclose(geodesic_distance(x, x), 0.0, atol=1e-7)
    assert np.allclose(geodesic_distance(x, -x), math.pi, atol=1e-7)
    assert np.allclose(geodesic_distance(x, y), geodesic_distance(y, x))
    d = geodesic_distance(x, y)
    assert np.all(d <= geodesic_distance(x, z) + geodesic_distance(z, y) + 1e-12)
    assert np.allclose(normalized_distance(x, y), d / math.pi)


def test_unit_vector_normalizes():
    v = unit_vector((3.0, 0.0, 4.0))
    assert np.allclose(v, (0.6, 0.0, 0.8))
    assert np.linalg.norm(unit_vector((1e-3, -2e-3, 5e-3))) == pytest.approx(1.0, rel=1e-14)


def test_slice_cap_fraction_range_and_circle_case():
    phi = np.linspace(0.0, math.pi, 101)
    for n in (2, 3, 5):
        frac = slice_cap_fraction(n, phi)
        assert frac[0] == pytest.approx(1.0, rel=1e-12)
        assert abs(frac[-1]) < 1e-12
        assert np.all(np.diff(frac) <= 1e-14)
    # on S^2 the direction sphere is a circle, so the outside fraction is
    # the plain angle ratio
    assert np.allclose(slice_cap_fraction(2, phi), 1.0 - phi / math.pi, atol=1e-12)


def test_sample_uniform_moments():
    gen = np.random.default_rng(2)
    for n in (1, 2, 3):
        x = sample_uniform(n, 40_000, gen)
        assert x.shape == (40_000, n + 1)
        assert np.allclose(np.linalg.norm(x, axis=1), 1.0, atol=1e-12)
        assert np.all(np.abs(x.mean(axis=0)) < 0.05)
        cov = x.T @ x / len(x)
        assert np.allclose(cov, np.eye(n + 1) / (n + 1), atol=0.02)


def test_sample_at_distance_hits_requested_distance():
    gen = np.random.default_rng(3)
    x = sample_uniform(2, 5000, gen)
    theta = gen.uniform(1e-6, math.pi - 1e-6, size=5000)
    y = sample_at_distance(x, theta, gen)
    assert np.allclose(np.linalg.norm(y, axis=1), 1.0, atol=1e-10)
    assert np.allclose(geodesic_distance(x, y), theta, atol=1e-7)


def test_sample_at_distance_azimuth_is_isotropic():
    # mean of y should align with x, with the transverse parts averaging out
    gen = np.random.default_rng(4)
    x = np.tile(unit_vector((0.0, 0.0, 1.0)), (20_000, 1))
    y = sample_at_distance(x, np.full(20_000, 1.0), gen)
    assert abs(y[:, 2].mean() - math.cos(1.0)) < 1e-12
    assert np.all(np.abs(y[:, :2].mean(axis=0)) < 0.02)


def test_great_circle_frame_and_distance():
    gen = np.random.default_rng(5)
    e = sample_uniform(2, 1, gen)[0]
    g = sample_uniform(2, 1, gen)[0]
    f = unit_vector(g - np.dot(g, e) * e)
    circle = GreatCircle(e, f)
    with pytest.raises(ValueError):
        GreatCircle(e, g)
    phi = np.linspace(0.0, 2.0 * math.pi, 17)
    pts = circle.point(phi)
    assert np.allclose(np.linalg.norm(pts, axis=-1), 1.0, atol=1e-12)
    # intrinsic circle distance equals the ambient geodesic distance
    psi = np.linspace(-3.0, 9.0, 17)
    d = geodesic_distance(circle.point(phi), circle.point(psi))
    assert np.allclose(circle_distance(phi, psi), d, atol=1e-7)
