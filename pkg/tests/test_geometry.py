import numpy as np
import pytest

from sphereconv import (
    ErpGrid,
    angles_from_point,
    angles_to_pixel,
    pixel_to_angles,
    point_from_angles,
)

HALF = np.sqrt(2.0) / 2.0


def test_grid_validation():
    ErpGrid(2, 4)
    ErpGrid(64, 128)
    with pytest.raises(ValueError):
        ErpGrid(2, 5)
    with pytest.raises(ValueError):
        ErpGrid(1, 2)
    with pytest.raises(ValueError):
        ErpGrid(64, 64)


def test_angles_from_point_axes():
    theta, phi = angles_from_point(np.array([0.0, 0.0, 1.0]))
    assert theta == 0.0 and phi == 0.0  # arctan2(0, 0) = 0 by convention
    theta, phi = angles_from_point(np.array([0.0, 1.0, 0.0]))
    assert theta == pytest.approx(np.pi / 2, abs=1e-15)
    assert phi == pytest.approx(np.pi / 2, abs=1e-15)
    theta, phi = angles_from_point(np.array([-1.0, 0.0, 0.0]))
    assert theta == pytest.approx(np.pi / 2, abs=1e-15)
    assert phi == pytest.approx(np.pi, abs=1e-15)


def test_point_from_angles_exact_values():
    assert np.allclose(point_from_angles(0.0, 1.234), [0.0, 0.0, 1.0], atol=1e-15)
    assert np.allclose(point_from_angles(np.pi / 2, np.pi / 2), [0.0, 1.0, 0.0], atol=1e-15)
    p = point_from_angles(np.pi / 4, 0.0)
    assert np.allclose(p, [HALF, 0.0, HALF], atol=1e-15)


def test_point_angle_round_trip_random():
    rng = np.random.default_rng(0)
    theta = rng.uniform(1e-3, np.pi - 1e-3, size=10_000)
    phi = rng.uniform(0.0, 2 * np.pi, size=10_000)
    p = point_from_angles(theta, phi)
    t2, p2 = angles_from_point(p)
    q = point_from_angles(t2, p2)
    assert np.abs(q - p).max() < 1e-10
    assert (t2 >= 0).all() and (t2 <= np.pi).all()
    assert (p2 >= 0).all() and (p2 < 2 * np.pi).all()


def test_pixel_to_angles_values():
    g = ErpGrid(2, 4)
    theta, phi = pixel_to_angles(0, 0, g)
    assert theta == pytest.approx(np.pi / 4, abs=0) and phi == pytest.approx(np.pi / 4, abs=0)
    g = ErpGrid(64, 128)
    theta, _ = pixel_to_angles(32, 0, g)
    assert theta == pytest.approx(np.pi / 2 + np.pi / 128, abs=1e-15)


def test_angles_to_pixel_values():
    g = ErpGrid(2, 4)
    assert angles_to_pixel(np.pi / 4, np.pi / 4, g) == (0, 0)
    g = ErpGrid(64, 128)
    assert angles_to_pixel(np.pi - 1e-9, 2 * np.pi - 1e-9, g) == (63, 127)
    assert angles_to_pixel(np.pi / 2, 0.0, g) == (32, 0)


def test_pixel_round_trip_exhaustive():
    g = ErpGrid(8, 16)
    for v in range(g.height):
        for u in range(g.width):
            theta, phi = pixel_to_angles(v, u, g)
            assert angles_to_pixel(theta, phi, g) == (v, u)


def test_column_wrap_at_seam():
    g = ErpGrid(8, 16)
    eps = 1e-9
    # phi just below 2*pi stays in the last column; wrapping past lands in 0
    _, u = angles_to_pixel(np.pi / 2, 2 * np.pi - eps, g)
    assert u == g.width - 1
    _, u = angles_to_pixel(np.pi / 2, (-eps) % (2 * np.pi), g)
    assert u == g.width - 1
    _, u = angles_to_pixel(np.pi / 2, (2 * np.pi + eps) % (2 * np.pi), g)
    assert u == 0


def test_monotonicity():
    g = ErpGrid(8, 16)
    thetas = np.linspace(1e-6, np.pi - 1e-6, 500)
    vs, _ = angles_to_pixel(thetas, np.full_like(thetas, 0.1), g)
    assert (np.diff(vs) >= 0).all()
    phis = np.linspace(0.0, 2 * np.pi - 1e-9, 500)
    _, us = angles_to_pixel(np.full_like(phis, 1.0), phis, g)
    assert (np.diff(us) >= 0).all()  # non-decreasing before the wrap point
