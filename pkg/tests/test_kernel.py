import numpy as np
import pytest

from sphereconv import (
    ErpGrid,
    KERNEL_POINT_NAMES,
    base_pattern,
    continuous_rotation_angles,
    kernel_at,
    pixel_to_angles,
    point_from_angles,
    ring_radius,
    rotation_angles,
    rotation_matrix,
)


def angle_between(a, b):
    # atan2 form stays well-conditioned for tiny angles (arccos is not)
    cross = np.linalg.norm(np.cross(a, b), axis=-1)
    dot = np.sum(a * b, axis=-1)
    return np.arctan2(cross, dot)


class TestBasePattern:
    def test_center_is_exact_pole(self):
        pat = base_pattern(ErpGrid(8, 16))
        assert (pat[0] == np.array([0.0, 0.0, 1.0])).all()

    def test_ring_height_and_radius(self):
        g = ErpGrid(64, 128)
        pat = base_pattern(g)
        alpha = ring_radius(g)
        assert np.abs(pat[1:, 2] - np.cos(alpha)).max() < 1e-12
        assert np.abs(angle_between(pat[:1], pat[1:]) - alpha).max() < 1e-12
        # ring z for W=128, computed independently
        assert pat[1, 2] == pytest.approx(np.cos(2 * np.pi / 128), abs=1e-12)
        assert pat[1, 2] == pytest.approx(0.9987954562, abs=1e-9)

    def test_uniform_azimuth_spacing_exact(self):
        pat = base_pattern(ErpGrid(8, 16))
        psi = np.arctan2(pat[1:, 1], pat[1:, 0])
        diffs = np.diff(np.unwrap(psi))
        assert np.abs(diffs - np.pi / 4).max() < 1e-12

    def test_w4_ring_on_equator(self):
        pat = base_pattern(ErpGrid(2, 4))  # alpha = pi/2
        assert np.abs(pat[1:, 2]).max() < 1e-12
        # the first ring point sits at azimuth pi/2 -> (0, 1, 0)
        assert np.allclose(pat[1], [0.0, 1.0, 0.0], atol=1e-12)

    def test_names_cover_nine_slots(self):
        assert len(KERNEL_POINT_NAMES) == 9
        assert KERNEL_POINT_NAMES[0] == "mid"
        assert len(set(KERNEL_POINT_NAMES)) == 9


class TestRotationAngles:
    def test_eastern_hemisphere(self):
        yaw, pitch, roll = rotation_angles(np.pi / 2, np.pi / 2)
        assert (yaw, pitch, roll) == (0.0, 0.0, -np.pi / 2)

    def test_western_hemisphere(self):
        yaw, pitch, roll = rotation_angles(np.pi / 2, 3 * np.pi / 2)
        assert (yaw, pitch, roll) == (0.0, 0.0, np.pi / 2)

    def test_meridians_use_pitch(self):
        yaw, pitch, roll = rotation_angles(np.pi / 3, np.pi)
        assert yaw == 0.0 and roll == 0.0
        assert pitch == pytest.approx(-np.pi / 3, abs=0)
        yaw, pitch, roll = rotation_angles(np.pi / 3, 0.0)
        assert yaw == 0.0 and roll == 0.0
        assert pitch == pytest.approx(np.pi / 3, abs=0)

    def test_ranges(self):
        rng = np.random.default_rng(1)
        theta = rng.uniform(0, np.pi, 1000)
        phi = rng.uniform(0, 2 * np.pi, 1000)
        for y, p, r in zip(*rotation_angles(theta, phi)):
            assert -np.pi <= y <= np.pi
            assert -np.pi <= p <= np.pi
            assert -np.pi <= r <= np.pi


class TestRotationMatrix:
    def test_identity(self):
        assert np.array_equal(rotation_matrix(0.0, 0.0, 0.0), np.eye(3))

    def test_pure_roll_maps_pole_to_y(self):
        r = rotation_matrix(0.0, 0.0, -np.pi / 2)
        # hand oracle: R_X(-pi/2) @ (0,0,1) = (0, 1, 0)
        assert np.allclose(r @ np.array([0.0, 0.0, 1.0]), [0.0, 1.0, 0.0], atol=1e-15)

    def test_orthonormal_special_orientation(self):
        rng = np.random.default_rng(2)
        ypr = rng.uniform(-np.pi, np.pi, size=(500, 3))
        rots = rotation_matrix(ypr[:, 0], ypr[:, 1], ypr[:, 2])
        eye = np.eye(3)
        for r in rots:
            assert np.abs(r.T @ r - eye).max() < 1e-10
            assert np.linalg.det(r) == pytest.approx(1.0, abs=1e-10)


class TestKernelAt:
    def test_identity_at_reference_meridian(self):
        pat = base_pattern(ErpGrid(8, 16))
        k = kernel_at(0.0, 0.0, pat)
        assert np.abs(k - pat).max() < 1e-15

    def test_center_placement(self):
        pat = base_pattern(ErpGrid(8, 16))
        k = kernel_at(np.pi / 2, np.pi / 2, pat)
        assert np.allclose(k[0], [0.0, 1.0, 0.0], atol=1e-15)

    @pytest.mark.parametrize("angles_fn", [rotation_angles, continuous_rotation_angles])
    def test_center_matches_direction_randomly(self, angles_fn):
        pat = base_pattern(ErpGrid(8, 16))
        rng = np.random.default_rng(3)
        theta = rng.uniform(1e-3, np.pi - 1e-3, 1000)
        phi = rng.uniform(0, 2 * np.pi, 1000)
        k = kernel_at(theta, phi, pat, angles_fn=angles_fn)
        tgt = point_from_angles(theta, phi)
        assert np.abs(k[:, 0, :] - tgt).max() < 1e-10

    @pytest.mark.parametrize("angles_fn", [rotation_angles, continuous_rotation_angles])
    def test_pairwise_distances_preserved(self, angles_fn):
        pat = base_pattern(ErpGrid(8, 16))
        base_dots = pat @ pat.T
        rng = np.random.default_rng(4)
        theta = rng.uniform(0, np.pi, 1000)
        phi = rng.uniform(0, 2 * np.pi, 1000)
        k = kernel_at(theta, phi, pat, angles_fn=angles_fn)
        dots = np.einsum("nij,nkj->nik", k, k)
        assert np.abs(dots - base_dots).max() < 1e-10

    def test_center_placement_on_grid_pixels(self):
        g = ErpGrid(8, 16)
        pat = base_pattern(g)
        for v in range(g.height):
            for u in range(g.width):
                theta, phi = pixel_to_angles(v, u, g)
                k = kernel_at(theta, phi, pat)
                tgt = point_from_angles(theta, phi)
                assert angle_between(k[0], tgt) < 1e-9

    def test_continuous_scheme_is_z_covariant(self):
        pat = base_pattern(ErpGrid(8, 16))
        theta = 1.1
        a = kernel_at(theta, 0.7, pat, angles_fn=continuous_rotation_angles)
        b = kernel_at(theta, 0.7 + np.pi, pat, angles_fn=continuous_rotation_angles)
        rz = rotation_matrix(np.pi, 0.0, 0.0)
        assert np.abs(b - a @ rz.T).max() < 1e-12

    def test_piecewise_scheme_samples_same_point_set(self):
        # across phi = pi the piecewise kernel is the Z-rotated continuous one
        # with ring slots rotated by four positions
        pat = base_pattern(ErpGrid(8, 16))
        theta = 1.1
        piece = kernel_at(theta, 0.7 + np.pi, pat, angles_fn=rotation_angles)
        cont = kernel_at(theta, 0.7 + np.pi, pat, angles_fn=continuous_rotation_angles)
        perm = np.r_[0, 1 + (np.arange(8) + 4) % 8]
        assert np.abs(piece - cont[perm]).max() < 1e-12
