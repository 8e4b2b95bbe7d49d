import numpy as np
import pytest

from seplut.core import ContextVector, identity_lut1d, identity_lut3d
from seplut.errors import ShapeMismatchError
from seplut.generators import (
    extract_basis_luts,
    generate_lut1d,
    generate_lut3d,
    is_monotone_lut1d,
    make_identity_bundle,
    make_random_bundle,
)


def random_context(m: int, seed: int) -> ContextVector:
    rng = np.random.default_rng(seed)
    return ContextVector(rng.standard_normal(32 * m).astype(np.float32))


class TestGenerate1D:
    def test_zero_weights_give_half(self):
        bundle = make_identity_bundle(4, 9, 9, 2)
        bundle.tensors["gen1d.fc.bias"] = np.zeros(27, np.float32)
        lut = generate_lut1d(random_context(4, 1), bundle)
        np.testing.assert_allclose(lut.values, 0.5, atol=1e-7)

    def test_identity_mode_ramp_within_1e4(self):
        bundle = make_identity_bundle(4, 9, 9, 2)
        lut = generate_lut1d(random_context(4, 2), bundle)
        target = identity_lut1d(9).values
        assert np.max(np.abs(lut.values.astype(np.float64) - target)) <= 1e-4

    def test_zero_weight_ignores_context_scale(self):
        bundle = make_identity_bundle(4, 9, 9, 2)
        e = random_context(4, 3)
        a = generate_lut1d(e, bundle)
        b = generate_lut1d(ContextVector(17.0 * e.values), bundle)
        np.testing.assert_array_equal(a.values, b.values)

    def test_entries_strictly_inside_unit_interval(self):
        bundle = make_random_bundle(6, 9, 9, 3, seed=11)
        lut = generate_lut1d(random_context(6, 4), bundle)
        assert np.all(lut.values > 0.0) and np.all(lut.values < 1.0)

    def test_identity_mode_is_monotone(self):
        bundle = make_identity_bundle(6, 17, 9, 3)
        lut = generate_lut1d(random_context(6, 5), bundle)
        assert is_monotone_lut1d(lut)

    def test_shape_mismatch(self):
        bundle = make_identity_bundle(4, 9, 9, 2)
        bundle.tensors["gen1d.fc.weight"] = np.zeros((27, 100), np.float32)
        with pytest.raises(ShapeMismatchError):
            generate_lut1d(random_context(4, 6), bundle)
        with pytest.raises(ShapeMismatchError):
            generate_lut1d(ContextVector(np.zeros(7, np.float32)), make_identity_bundle(4, 9, 9, 2))


class TestGenerate3D:
    def test_bias_only_identity(self):
        bundle = make_identity_bundle(4, 9, 9, 2)
        lut = generate_lut3d(random_context(4, 7), bundle)
        np.testing.assert_array_equal(lut.values, identity_lut3d(9).values)

    def test_rank_one_identity_construction(self):
        # choose the bottleneck so the mixing weight is exactly 1 for any E
        bundle = make_identity_bundle(4, 9, 9, 1)
        bundle.tensors["gen3d.fc1.bias"] = np.ones(1, np.float32)
        bundle.tensors["gen3d.fc2.weight"] = identity_lut3d(9).values.reshape(-1, 1)
        bundle.tensors["gen3d.fc2.bias"] = np.zeros(3 * 9**3, np.float32)
        lut = generate_lut3d(random_context(4, 8), bundle)
        np.testing.assert_array_equal(lut.values, identity_lut3d(9).values)

    def test_parameter_arithmetic_m8_k3_s9(self):
        bundle = make_identity_bundle(8, 9, 9, 3)
        gen3d = sum(
            int(np.prod(t.shape))
            for n, t in bundle.tensors.items()
            if n.startswith("gen3d.")
        )
        assert gen3d == 256 * 3 + 3 + 3 * 2187 + 2187 == 9519

    def test_shape_mismatch(self):
        bundle = make_identity_bundle(4, 9, 9, 2)
        bundle.tensors["gen3d.fc1.weight"] = np.zeros((5, 128), np.float32)
        with pytest.raises(ShapeMismatchError):
            generate_lut3d(random_context(4, 9), bundle)

    def test_unactivated_output_can_leave_unit_range(self):
        # no output activation: a bias outside [0, 1] passes straight through
        bundle = make_identity_bundle(4, 9, 9, 2)
        bundle.tensors["gen3d.fc2.bias"] = np.full(3 * 729, 1.25, np.float32)
        lut = generate_lut3d(random_context(4, 10), bundle)
        assert lut.values.max() > 1.0


class TestBasisDecomposition:
    def test_reconstruction_matches_generator(self):
        bundle = make_random_bundle(6, 9, 9, 3, seed=13)
        e = random_context(6, 11)
        base, basis = extract_basis_luts(bundle)
        assert len(basis) == 3
        w1 = bundle.tensor("gen3d.fc1.weight").astype(np.float64)
        b1 = bundle.tensor("gen3d.fc1.bias").astype(np.float64)
        mix = w1 @ e.values.astype(np.float64) + b1
        recon = base.values.astype(np.float64) + sum(
            mix[i] * basis[i].values.astype(np.float64) for i in range(3)
        )
        lut = generate_lut3d(e, bundle)
        assert np.max(np.abs(recon - lut.values)) <= 1e-6

    def test_zero_weight_degenerates_to_base(self):
        bundle = make_random_bundle(6, 9, 9, 3, seed=14)
        bundle.tensors["gen3d.fc2.weight"] = np.zeros((3 * 729, 3), np.float32)
        base, basis = extract_basis_luts(bundle)
        for b in basis:
            np.testing.assert_array_equal(b.values, 0.0)
        np.testing.assert_array_equal(
            base.values.reshape(-1), bundle.tensors["gen3d.fc2.bias"]
        )

    def test_mixing_weights_scale_linearly(self):
        # doubling the bottleneck output doubles the offset from the base LUT
        bundle = make_random_bundle(6, 9, 9, 3, seed=15)
        base, basis = extract_basis_luts(bundle)
        rng = np.random.default_rng(16)
        w = rng.standard_normal(3)
        t1 = base.values.astype(np.float64) + sum(
            w[i] * basis[i].values.astype(np.float64) for i in range(3)
        )
        t2 = base.values.astype(np.float64) + sum(
            2.0 * w[i] * basis[i].values.astype(np.float64) for i in range(3)
        )
        np.testing.assert_allclose(
            t2 - base.values.astype(np.float64),
            2.0 * (t1 - base.values.astype(np.float64)),
            atol=1e-12,
        )


class TestRankProperty:
    def test_generated_luts_span_affine_subspace_of_dim_k(self):
        k = 3
        bundle = make_random_bundle(6, 9, 9, k, seed=17)
        samples = []
        for i in range(k + 3):
            lut = generate_lut3d(random_context(6, 100 + i), bundle)
            samples.append(lut.values.reshape(-1).astype(np.float64))
        stack = np.stack(samples)
        centered = stack - stack.mean(axis=0)
        s = np.linalg.svd(centered, compute_uv=False)
        assert s[0] > 0
        assert np.all(s[k:] <= 1e-5 * s[0])

    def test_homogeneity_with_zero_biases(self):
        bundle = make_random_bundle(6, 9, 9, 3, seed=18)
        bundle.tensors["gen3d.fc1.bias"] = np.zeros(3, np.float32)
        bundle.tensors["gen3d.fc2.bias"] = np.zeros(3 * 729, np.float32)
        e = random_context(6, 19)
        t1 = generate_lut3d(e, bundle).values.astype(np.float64)
        t2 = generate_lut3d(ContextVector(2.0 * e.values), bundle).values.astype(np.float64)
        np.testing.assert_allclose(t2, 2.0 * t1, atol=1e-6)


class TestIdentityBundle:
    def test_exact_identity_3d(self):
        bundle = make_identity_bundle(6, 9, 9, 3)
        lut = generate_lut3d(random_context(6, 20), bundle)
        np.testing.assert_array_equal(lut.values, identity_lut3d(9).values)

    def test_pipeline_identity_psnr(self):
        from seplut.analysis import psnr
        from seplut.pipeline import enhance

        from conftest import random_float_image

        bundle = make_identity_bundle(6, 9, 9, 3)
        img = random_float_image(48, 64, seed=21)
        result = enhance(img, bundle)
        assert np.max(np.abs(result.output.data - img.data)) <= 2e-3
        assert psnr(result.output, img) >= 50.0
