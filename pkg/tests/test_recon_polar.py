import numpy as np
import pytest

from conftest import ncc_mag
from sarlab.apertures import circular_aperture, cylindrical_aperture, \
    linear_aperture
from sarlab.constants import C
from sarlab.forward import EchoData, simulate_echo
from sarlab.grids import grid_spec
from sarlab.recon import azimuth_kernel, bpa, rma_circular, rma_cylindrical, \
    stolt_polar
from sarlab.recon.rect import ReconError
from sarlab.scene import Scatterer, point_scene
from sarlab.waveform import frequency_axis

FC = 100e9
LAM = C / FC


class TestAzimuthKernel:
    def test_matches_direct_dft(self):
        n = 64
        ky, k, r0 = 800.0, 2100.0, 0.25
        q = np.arange(-8, 9)
        got, ok = azimuth_kernel(q, ky, k, r0, n)
        assert ok
        theta = 2 * np.pi * np.arange(n) / n
        kern = np.exp(-1j * np.sqrt(4 * k**2 - ky**2) * r0 * np.cos(theta))
        want = np.array([np.sum(kern * np.exp(-2j * np.pi * qi *
                                              np.arange(n) / n)) for qi in q])
        assert np.max(np.abs(got - want)) / np.max(np.abs(want)) < 1e-12

    def test_boundary_all_energy_in_dc(self):
        k = 1000.0
        q = np.arange(-4, 5)
        got, ok = azimuth_kernel(q, 2 * k, k, 0.3, 32)  # 4k^2 - ky^2 = 0
        assert ok
        assert got[np.where(q == 0)[0][0]] == pytest.approx(32.0)
        others = got[q != 0]
        assert np.max(np.abs(others)) < 1e-9

    def test_evanescent_zeroed_with_flag(self):
        got, ok = azimuth_kernel(np.arange(4), 2500.0, 1000.0, 0.3, 32)
        assert not ok
        assert np.all(got == 0)

    def test_even_in_harmonic(self):
        got, ok = azimuth_kernel(np.array([-5, 5]), 300.0, 2000.0, 0.2, 128)
        assert ok
        assert got[0] == pytest.approx(got[1], rel=1e-12)


class TestStoltPolar:
    def test_constant_spectrum_fills_annulus(self):
        k = np.linspace(1000.0, 1500.0, 32)
        spec = np.ones((64, 32), dtype=complex)
        kg = np.linspace(-2 * k[-1], 2 * k[-1], 41)
        out = stolt_polar(spec, k, kg, kg)
        KU, KV = np.meshgrid(kg, kg, indexing="ij")
        kr = np.sqrt(KU**2 + KV**2)
        inside = (kr >= 2 * k[0] + 1e-9) & (kr <= 2 * k[-1] - 1e-9)
        outside = (kr < 2 * k[0] - 1e-6) | (kr > 2 * k[-1] + 1e-6)
        assert np.allclose(out[inside], 1.0)
        assert np.all(out[outside] == 0)

    def test_origin_is_zero(self):
        k = np.linspace(1000.0, 1500.0, 8)
        spec = np.ones((16, 8), dtype=complex)
        kg = np.linspace(-3000.0, 3000.0, 5)  # includes exact 0
        out = stolt_polar(spec, k, kg, kg)
        assert out[2, 2] == 0

    def test_smooth_field_matches_analytic(self):
        # sigma(alpha, k) sampled from a smooth closed form; the polar
        # resample must agree with direct evaluation on the rect grid
        k = np.linspace(2000.0, 2400.0, 48)
        alpha = 2 * np.pi * np.arange(512) / 512

        def field(a, kk):
            return np.exp(1j * (0.8e-3 * 2 * kk * np.cos(a)
                                - 1.1e-3 * 2 * kk * np.sin(a)))

        spec = field(alpha[:, None], k[None, :])
        kg = np.linspace(-2 * k[-1], 2 * k[-1], 101)
        out = stolt_polar(spec, k, kg, kg)
        KU, KV = np.meshgrid(kg, kg, indexing="ij")
        kr = np.sqrt(KU**2 + KV**2)
        mask = (kr >= 2 * k[0]) & (kr <= 2 * k[-1])
        want = field(np.mod(np.arctan2(KV, KU), 2 * np.pi), kr / 2.0)
        rms = np.sqrt(np.mean(np.abs(out[mask] - want[mask]) ** 2))
        assert rms < 1e-3


def circular_case(n_theta=256, nf=12, seed=4):
    ap = circular_aperture(n_theta, 0.08)
    freq = frequency_axis(FC - 5e9, 10e9, nf)
    rng = np.random.default_rng(seed)
    pts = [Scatterer((0.0, float(y), float(z)), complex(r))
           for y, z, r in zip(rng.uniform(-2e-3, 2e-3, 3),
                              rng.uniform(-2e-3, 2e-3, 3),
                              rng.uniform(0.5, 1.0, 3))]
    echo = simulate_echo(ap, point_scene(pts), freq)
    grid = grid_spec(y=(-3e-3, 3e-3, 41), z=(-3e-3, 3e-3, 41))
    return echo, grid


class TestRmaCircular:
    def test_point_at_origin_centered_peak(self):
        ap = circular_aperture(256, 0.08)
        freq = frequency_axis(FC - 5e9, 10e9, 12)
        echo = simulate_echo(ap, point_scene([((0, 0, 0), 1.0)]), freq)
        grid = grid_spec(y=(-2e-3, 2e-3, 21), z=(-2e-3, 2e-3, 21))
        img, _ = rma_circular(echo, grid)
        iy, iz = np.unravel_index(np.argmax(np.abs(img.voxels)),
                                  img.voxels.shape)
        assert abs(img.axes[0][iy]) <= grid.spacing("y")
        assert abs(img.axes[1][iz]) <= grid.spacing("z")

    def test_rotational_covariance_of_data(self):
        # rotating the scene by one aperture step circularly shifts the
        # theta-axis samples by one bin
        n_theta = 64
        ap = circular_aperture(n_theta, 0.08)
        freq = frequency_axis(FC - 2e9, 4e9, 6)
        p = np.array([0.0, 1.4e-3, -0.7e-3])
        step = 2 * np.pi / n_theta
        rot = np.array([[np.cos(step), -np.sin(step)],
                        [np.sin(step), np.cos(step)]])
        p_rot = np.array([0.0, *rot @ p[1:]])
        e1 = simulate_echo(ap, point_scene([(tuple(p), 1.0)]), freq).samples
        e2 = simulate_echo(ap, point_scene([(tuple(p_rot), 1.0)]), freq).samples
        err = np.max(np.abs(e2 - np.roll(e1, 1, axis=0)))
        assert err / np.max(np.abs(e1)) < 1e-9

    def test_ncc_vs_bpa(self):
        echo, grid = circular_case()
        img, _ = rma_circular(echo, grid)
        ref = bpa(echo, grid)
        assert ncc_mag(img.voxels, ref.voxels) >= 0.90

    def test_requires_circular(self):
        ap = linear_aperture(8, 1e-3, 0.1)
        freq = frequency_axis(FC - 2e9, 4e9, 4)
        echo = EchoData(np.zeros((8, 4), complex), freq, ap)
        with pytest.raises(ReconError):
            rma_circular(echo, grid_spec(y=(-1e-3, 1e-3, 4),
                                         z=(-1e-3, 1e-3, 4)))


def cylindrical_case(n_theta=128, ny=32, nf=12, seed=6):
    ap = cylindrical_aperture(n_theta, ny, LAM / 4, 0.08)
    freq = frequency_axis(FC - 5e9, 10e9, nf)
    rng = np.random.default_rng(seed)
    pts = [Scatterer(tuple(p), complex(r)) for p, r in
           zip(rng.uniform(-2e-3, 2e-3, (3, 3)), rng.uniform(0.5, 1.0, 3))]
    echo = simulate_echo(ap, point_scene(pts), freq)
    grid = grid_spec(x=(-2.5e-3, 2.5e-3, 26), y=(-2.5e-3, 2.5e-3, 26),
                     z=(-2.5e-3, 2.5e-3, 26))
    return echo, grid


class TestRmaCylindrical:
    def test_point_focus(self):
        ap = cylindrical_aperture(128, 32, LAM / 4, 0.08)
        freq = frequency_axis(FC - 5e9, 10e9, 12)
        target = (1e-3, 0.8e-3, -0.6e-3)
        echo = simulate_echo(ap, point_scene([(target, 1.0)]), freq)
        grid = grid_spec(x=(-2.5e-3, 2.5e-3, 21), y=(-2.5e-3, 2.5e-3, 21),
                         z=(-2.5e-3, 2.5e-3, 21))
        img, _ = rma_cylindrical(echo, grid)
        idx = np.unravel_index(np.argmax(np.abs(img.voxels)), img.voxels.shape)
        for d, name in enumerate("xyz"):
            assert abs(img.axes[d][idx[d]] - target[d]) <= grid.spacing(name)

    def test_ncc_vs_bpa_desk_scale(self):
        echo, grid = cylindrical_case()
        img, _ = rma_cylindrical(echo, grid)
        ref = bpa(echo, grid)
        assert ncc_mag(img.voxels, ref.voxels) >= 0.85

    def test_zero_echo(self):
        ap = cylindrical_aperture(16, 4, 1e-3, 0.08)
        freq = frequency_axis(FC - 2e9, 4e9, 4)
        echo = EchoData(np.zeros((64, 4), complex), freq, ap)
        img, _ = rma_cylindrical(echo, grid_spec(x=(-1e-3, 1e-3, 4),
                                                 y=(-1e-3, 1e-3, 4),
                                                 z=(-1e-3, 1e-3, 4)))
        assert np.all(img.voxels == 0)

    def test_linearity(self):
        echo, grid = cylindrical_case(n_theta=64, ny=8, nf=6)
        img1, _ = rma_cylindrical(echo, grid)
        img2, _ = rma_cylindrical(
            EchoData(3.0 * echo.samples, echo.freq, echo.aperture), grid)
        err = np.max(np.abs(img2.voxels - 3.0 * img1.voxels))
        assert err / np.max(np.abs(img1.voxels)) < 1e-10

    def test_stages_recorded(self):
        echo, grid = cylindrical_case(n_theta=32, ny=4, nf=4)
        _, stages = rma_cylindrical(echo, grid, keep_kspace=True)
        assert [s.stage for s in stages] == [
            "stage0_signal", "stage1_kspace", "stage2_compensated",
            "stage3_stolt"]
