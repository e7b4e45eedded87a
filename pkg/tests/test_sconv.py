import numpy as np
import pytest

from sphereconv import (
    ErpGrid,
    SphericalConv,
    angles_from_point,
    angles_to_pixel,
    base_pattern,
    compile_lut,
    continuous_rotation_angles,
    gather,
    gather_backward,
    kernel_at,
    pixel_to_angles,
)
from sphereconv.nn import sampled_gradient_error
from sphereconv.sconv import preset_layer


@pytest.fixture(scope="module")
def lut8():
    return compile_lut(ErpGrid(8, 16))


@pytest.fixture(scope="module")
def lut4():
    return compile_lut(ErpGrid(4, 8))


def naive_spherical_conv(x, layer, grid):
    """Per-pixel oracle: rotate the pattern, look up the 9 pixels, apply weights.

    Recomputes the kernel geometry per pixel instead of reusing the LUT.
    """
    n, h, w = x.shape
    pat = base_pattern(grid)
    gw = layer.group_weights.values
    gb = layer.group_bias.values
    pw = layer.pointwise_weights.values
    pb = layer.pointwise_bias.values
    out = np.zeros((pw.shape[0], h, w))
    for v in range(h):
        for u in range(w):
            theta, phi = pixel_to_angles(v, u, grid)
            pts = kernel_at(theta, phi, pat, angles_fn=continuous_rotation_angles)
            tk, pk = angles_from_point(pts)
            vv, uu = angles_to_pixel(tk, pk, grid)
            y1 = np.array([
                (gw[c] * x[c, vv, uu]).sum() + gb[c] for c in range(n)
            ])
            out[:, v, u] = pw @ y1 + pb
    return out


class TestGather:
    def test_table0_slice_is_input(self, lut4):
        rng = np.random.default_rng(0)
        x = rng.normal(size=(3, 4, 8))
        g = gather(x, lut4)
        assert g.shape == (27, 4, 8)
        assert np.array_equal(g[:3], x)

    def test_constant_input(self, lut4):
        x = np.full((2, 4, 8), 5.0)
        assert (gather(x, lut4) == 5.0).all()

    def test_dimension_mismatch(self, lut4):
        with pytest.raises(ValueError):
            gather(np.zeros((1, 8, 16)), lut4)

    def test_backward_matches_finite_differences(self, lut4):
        rng = np.random.default_rng(1)
        x = rng.normal(size=(1, 4, 8))
        w = rng.normal(size=(9, 4, 8))
        dx = gather_backward(w, lut4, 1)
        f = lambda: float((gather(x, lut4) * w).sum())
        assert sampled_gradient_error(f, x, dx, rng, n_samples=32) < 1e-4


class TestForward:
    def test_center_tap_identity(self, lut4):
        layer = preset_layer(lut4, 2, "center-identity")
        rng = np.random.default_rng(2)
        x = rng.normal(size=(2, 4, 8))
        assert np.array_equal(layer.forward(x), x)

    def test_constant_input_closed_form(self, lut8):
        rng = np.random.default_rng(3)
        layer = SphericalConv(lut8, 2, 3, rng, "s")
        c0 = 1.7
        x = np.full((2, 8, 16), c0)
        y = layer.forward(x)
        y1 = c0 * layer.group_weights.values.sum(axis=1) + layer.group_bias.values
        expect = layer.pointwise_weights.values @ y1 + layer.pointwise_bias.values
        assert np.abs(y - expect[:, None, None]).max() < 1e-12

    def test_matches_naive_oracle(self, lut8):
        rng = np.random.default_rng(4)
        layer = SphericalConv(lut8, 2, 3, rng, "o")
        x = rng.normal(size=(2, 8, 16))
        got = layer.forward(x)
        want = naive_spherical_conv(x, layer, lut8.grid)
        assert np.abs(got - want).max() < 1e-12

    def test_average_preset_on_constant(self, lut4):
        layer = preset_layer(lut4, 3, "average")
        x = np.full((3, 4, 8), 2.5)
        assert np.abs(layer.forward(x) - 2.5).max() < 1e-12

    def test_ring_laplacian_on_constant_is_zero(self, lut4):
        layer = preset_layer(lut4, 3, "ring-laplacian")
        x = np.full((3, 4, 8), 2.5)
        assert np.abs(layer.forward(x)).max() < 1e-12


class TestBackward:
    def test_zero_upstream_gives_zero_grads(self, lut4):
        rng = np.random.default_rng(5)
        layer = SphericalConv(lut4, 2, 3, rng, "z")
        layer.forward(rng.normal(size=(2, 4, 8)))
        for p in layer.params:
            p.zero_grad()
        dx = layer.backward(np.zeros((3, 4, 8)))
        assert (dx == 0.0).all()
        assert all((p.grad == 0.0).all() for p in layer.params)

    def test_identity_configuration_passes_grad(self, lut4):
        layer = preset_layer(lut4, 2, "center-identity")
        rng = np.random.default_rng(6)
        layer.forward(rng.normal(size=(2, 4, 8)))
        dy = rng.normal(size=(2, 4, 8))
        assert np.array_equal(layer.backward(dy), dy)

    def test_full_layer_gradient_check(self, lut8):
        rng = np.random.default_rng(7)
        layer = SphericalConv(lut8, 2, 3, rng, "g")
        x = rng.normal(size=(2, 8, 16))
        y = layer.forward(x)
        w = rng.normal(size=y.shape)
        for p in layer.params:
            p.zero_grad()
        dx = layer.backward(w)
        f = lambda: float((layer.forward(x) * w).sum())
        errs = [sampled_gradient_error(f, x, dx, rng, n_samples=20)]
        for p in layer.params:
            errs.append(sampled_gradient_error(
                f, p.values, p.grad, rng, n_samples=min(20, p.values.size)))
        assert max(errs) < 1e-5

    def test_backward_requires_forward(self, lut4):
        layer = SphericalConv(lut4, 1, 1, np.random.default_rng(8), "c")
        with pytest.raises(RuntimeError):
            layer.backward(np.zeros((1, 4, 8)))


class TestEquivariance:
    @pytest.mark.parametrize("height,width", [(8, 16), (16, 32)])
    def test_column_roll_commutes(self, height, width):
        lut = compile_lut(ErpGrid(height, width))
        rng = np.random.default_rng(9)
        layer = SphericalConv(lut, 2, 3, rng, "e")
        x = rng.normal(size=(2, height, width))
        base = layer.forward(x)
        for k in (1, 5, width // 2):
            rolled = layer.forward(np.roll(x, k, axis=2))
            assert np.abs(rolled - np.roll(base, k, axis=2)).max() < 1e-9

    def test_no_out_of_bounds_fuzz(self):
        rng = np.random.default_rng(10)
        for h in (2, 4, 6, 8, 10):
            grid = ErpGrid(h, 2 * h)
            lut = compile_lut(grid)
            layer = SphericalConv(lut, 1, 1, rng, f"f{h}")
            y = layer.forward(rng.normal(size=(1, h, 2 * h)))
            assert np.isfinite(y).all()
