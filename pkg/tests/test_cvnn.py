import numpy as np
import pytest

from sarlab.cvnn import (cconv2d_direct, cconv2d_gauss, count_real_convolutions,
                         split_activation)


def brute_force_cconv2d_valid(kernel, image):
    """O(n^2 k^2) scalar complex convolution oracle (true convolution)."""
    kh, kw = kernel.shape
    ih, iw = image.shape
    oh, ow = ih - kh + 1, iw - kw + 1
    out = np.zeros((oh, ow), dtype=complex)
    for i in range(oh):
        for j in range(ow):
            acc = 0.0 + 0.0j
            for a in range(kh):
                for b in range(kw):
                    acc += kernel[a, b] * image[i + kh - 1 - a, j + kw - 1 - b]
            out[i, j] = acc
    return out


def random_complex(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


class TestDirect:
    def test_identity_kernel(self):
        rng = np.random.default_rng(0)
        z = random_complex(rng, (5, 6))
        out = cconv2d_direct(np.array([[1.0 + 0.0j]]), z, mode="valid")
        assert np.allclose(out, z, rtol=1e-15)

    def test_imaginary_unit_kernel_rotates(self):
        rng = np.random.default_rng(1)
        z = random_complex(rng, (4, 4))
        out = cconv2d_direct(np.array([[1j]]), z, mode="valid")
        assert np.allclose(out, 1j * z, rtol=1e-15)

    def test_matches_brute_force(self):
        rng = np.random.default_rng(2)
        w = random_complex(rng, (3, 3))
        z = random_complex(rng, (8, 8))
        out = cconv2d_direct(w, z, mode="valid")
        ref = brute_force_cconv2d_valid(w, z)
        assert np.max(np.abs(out - ref)) / np.max(np.abs(ref)) < 1e-12

    def test_same_mode_shape(self):
        rng = np.random.default_rng(3)
        w = random_complex(rng, (3, 3))
        z = random_complex(rng, (6, 7))
        assert cconv2d_direct(w, z, mode="same").shape == z.shape

    def test_kernel_larger_than_input_rejected(self):
        with pytest.raises(ValueError):
            cconv2d_direct(np.ones((4, 4), complex), np.ones((3, 3), complex),
                           mode="valid")

    def test_uses_four_real_convolutions(self):
        rng = np.random.default_rng(4)
        with count_real_convolutions() as n:
            cconv2d_direct(random_complex(rng, (3, 3)),
                           random_complex(rng, (6, 6)))
        assert n["count"] == 4

    def test_translation_equivariance(self):
        rng = np.random.default_rng(5)
        w = random_complex(rng, (3, 3))
        z = np.zeros((12, 12), dtype=complex)
        z[3:6, 3:6] = random_complex(rng, (3, 3))
        out1 = cconv2d_direct(w, z)
        out2 = cconv2d_direct(w, np.roll(z, (2, 1), axis=(0, 1)))
        assert np.allclose(out2[2:, 1:], out1[:-2, :-1], rtol=1e-12)

    def test_correlate_flag_flips_kernel(self):
        rng = np.random.default_rng(6)
        w = random_complex(rng, (3, 3))
        z = random_complex(rng, (6, 6))
        conv = cconv2d_direct(w[::-1, ::-1], z)
        corr = cconv2d_direct(w, z, correlate=True)
        assert np.allclose(conv, corr, rtol=1e-13)


class TestGauss:
    def test_matches_direct_randomized(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            kh, kw = rng.integers(1, 5, 2)
            ih = rng.integers(kh, 16)
            iw = rng.integers(kw, 16)
            w = random_complex(rng, (kh, kw))
            z = random_complex(rng, (ih, iw))
            mode = rng.choice(["valid", "same"])
            a = cconv2d_direct(w, z, mode=mode)
            b = cconv2d_gauss(w, z, mode=mode)
            scale = max(np.max(np.abs(a)), 1e-30)
            assert np.max(np.abs(a - b)) / scale < 1e-12

    def test_real_input_gives_zero_imaginary(self):
        rng = np.random.default_rng(8)
        w = rng.standard_normal((3, 3)).astype(complex)
        z = rng.standard_normal((7, 7)).astype(complex)
        out = cconv2d_gauss(w, z)
        assert np.max(np.abs(out.imag)) < 1e-12 * np.max(np.abs(out.real))

    def test_exactly_three_real_convolutions(self):
        rng = np.random.default_rng(9)
        with count_real_convolutions() as n:
            cconv2d_gauss(random_complex(rng, (3, 3)),
                          random_complex(rng, (8, 8)))
        assert n["count"] == 3


class TestActivations:
    def test_crelu_positive_passthrough(self):
        assert split_activation(np.array([[1 + 2j]]))[0, 0] == 1 + 2j

    def test_crelu_clips_negative_real(self):
        assert split_activation(np.array([[-1 + 2j]]))[0, 0] == 0 + 2j

    def test_crelu_idempotent(self):
        rng = np.random.default_rng(10)
        z = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
        once = split_activation(z, "crelu")
        twice = split_activation(once, "crelu")
        assert np.array_equal(once, twice)

    def test_ctanh_odd_and_zero(self):
        assert split_activation(np.array([[0.0 + 0.0j]]), "ctanh")[0, 0] == 0
        rng = np.random.default_rng(11)
        z = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        assert np.allclose(split_activation(-z, "ctanh"),
                           -split_activation(z, "ctanh"), rtol=1e-15)

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            split_activation(np.zeros((2, 2)), "modrelu")
