import numpy as np
import pytest

from flawforge import (
    AnomalySourcePool,
    DegenerateDistortionError,
    DimensionMismatchError,
    EmptyAngleSetError,
    EmptyPoolError,
    ImageBuffer,
    Mask,
    NdaaParams,
    apply_opaque,
    apply_transparent,
    cutpaste,
    make_rng,
    ndaa,
    ndaa_stages,
    poisson_paste,
    rotate_normal,
    sample_source,
    save_png,
)
from flawforge.poisson import _laplacian, blend_channel

from ff_testlib import ndaa_nondegenerate, random_image, random_mask, texture_image


class TestSampleSource:
    def test_empty_pool(self):
        with pytest.raises(EmptyPoolError):
            sample_source(AnomalySourcePool(mode="external"), 8, 8, make_rng(0))

    def test_output_dims(self, tmp_path):
        save_png(texture_image(1, 32), tmp_path / "t.png")
        pool = AnomalySourcePool(mode="external", paths=(str(tmp_path / "t.png"),))
        for w, h in ((16, 16), (24, 9), (40, 40)):
            out = sample_source(pool, w, h, make_rng(2))
            assert (out.height, out.width) == (h, w)

    def test_deterministic(self, tmp_path):
        for i in range(3):
            save_png(texture_image(10 + i, 32), tmp_path / f"{i}.png")
        pool = AnomalySourcePool(
            mode="external", paths=tuple(str(tmp_path / f"{i}.png") for i in range(3))
        )
        a = sample_source(pool, 20, 20, make_rng(5))
        b = sample_source(pool, 20, 20, make_rng(5))
        assert np.array_equal(a.data, b.data)

    def test_self_patch_mode(self):
        img = texture_image(3, 32)
        out = sample_source(AnomalySourcePool(mode="self-patch"), 32, 32, make_rng(1), target=img)
        assert (out.height, out.width) == (32, 32)

    def test_unreadable_source(self, tmp_path):
        bad = tmp_path / "bad.png"
        bad.write_bytes(b"not an image")
        pool = AnomalySourcePool(mode="external", paths=(str(bad),))
        from flawforge import UnreadableSourceError

        with pytest.raises(UnreadableSourceError):
            sample_source(pool, 8, 8, make_rng(0))


class TestTransparentOpaque:
    def test_beta_zero_identity(self):
        rng = make_rng(0)
        I = random_image(rng, 12, 10)
        N = random_image(rng, 12, 10)
        m = random_mask(rng, 12, 10)
        out = apply_transparent(I, N, m, 0.0)
        assert np.array_equal(out.data, I.data)

    def test_midpoint_arithmetic(self):
        I = ImageBuffer(np.full((1, 1, 1), 0.2))
        N = ImageBuffer(np.full((1, 1, 1), 0.8))
        m = Mask(np.ones((1, 1), dtype=np.uint8))
        out = apply_transparent(I, N, m, 0.5)
        assert out.data[0, 0, 0] == pytest.approx(0.5, abs=1e-15)

    def test_beta_one_equals_opaque_bitexact(self):
        rng = make_rng(1)
        for _ in range(50):
            I = random_image(rng, 9, 11)
            N = random_image(rng, 9, 11)
            m = random_mask(rng, 9, 11)
            assert np.array_equal(
                apply_transparent(I, N, m, 1.0).data, apply_opaque(I, N, m).data
            )

    def test_opaque_all_zero_mask(self):
        rng = make_rng(2)
        I = random_image(rng, 6, 6)
        N = random_image(rng, 6, 6)
        out = apply_opaque(I, N, Mask(np.zeros((6, 6), dtype=np.uint8)))
        assert np.array_equal(out.data, I.data)

    def test_opaque_all_one_mask(self):
        rng = make_rng(3)
        I = random_image(rng, 6, 6)
        N = random_image(rng, 6, 6)
        out = apply_opaque(I, N, Mask(np.ones((6, 6), dtype=np.uint8)))
        assert np.array_equal(out.data, N.data)

    def test_opaque_against_per_pixel_oracle(self):
        # oracle: explicit per-pixel if/else select
        rng = make_rng(4)
        I = random_image(rng, 4, 4)
        N = random_image(rng, 4, 4)
        m = random_mask(rng, 4, 4)
        out = apply_opaque(I, N, m)
        for y in range(4):
            for x in range(4):
                expected = N.data[y, x] if m.data[y, x] else I.data[y, x]
                assert np.array_equal(out.data[y, x], expected)

    def test_dimension_mismatch(self):
        rng = make_rng(5)
        with pytest.raises(DimensionMismatchError):
            apply_opaque(random_image(rng, 4, 4), random_image(rng, 4, 5), random_mask(rng, 4, 4))
        with pytest.raises(DimensionMismatchError):
            apply_opaque(random_image(rng, 4, 4), random_image(rng, 4, 4), random_mask(rng, 5, 4))

    def test_beta_out_of_range(self):
        rng = make_rng(6)
        I = random_image(rng, 4, 4)
        with pytest.raises(ValueError):
            apply_transparent(I, I, random_mask(rng, 4, 4), 1.5)

    def test_locality(self):
        rng = make_rng(7)
        for _ in range(30):
            I = random_image(rng, 8, 8)
            N = random_image(rng, 8, 8)
            m = random_mask(rng, 8, 8)
            beta = float(rng.uniform(0, 1))
            out = apply_transparent(I, N, m, beta)
            off = m.data == 0
            assert np.array_equal(out.data[off], I.data[off])


class TestNdaa:
    def test_constant_image_degenerates(self):
        img = ImageBuffer(np.full((64, 64, 3), 0.5))
        with pytest.raises(DegenerateDistortionError):
            ndaa(img, NdaaParams(), make_rng(0))

    def test_mask_containment(self):
        img = texture_image(11)
        stages, _ = ndaa_nondegenerate(img, NdaaParams(), 1)
        assert not np.any(stages.mask.data & ~stages.mask_primary.data)
        assert not np.any(stages.mask.data & ~stages.mask_reduced.data)

    def test_locality(self):
        img = texture_image(12)
        stages, _ = ndaa_nondegenerate(img, NdaaParams(), 2)
        out, mask = stages.output, stages.mask
        off = mask.data == 0
        assert np.array_equal(out.data[off], img.data[off])

    def test_masked_pixels_come_from_distorted(self):
        img = texture_image(13)
        stages, _ = ndaa_nondegenerate(img, NdaaParams(), 3)
        on = stages.mask.data == 1
        assert np.array_equal(stages.output.data[on], stages.distorted.data[on])

    def test_deterministic(self):
        img = texture_image(14)
        _, seed = ndaa_nondegenerate(img, NdaaParams(), 4)
        a, am = ndaa(img, NdaaParams(), make_rng(seed))
        b, bm = ndaa(img, NdaaParams(), make_rng(seed))
        assert np.array_equal(a.data, b.data)
        assert np.array_equal(am.data, bm.data)

    def test_distortion_confined_to_rect(self):
        img = texture_image(15)
        stages, _ = ndaa_nondegenerate(img, NdaaParams(), 5)
        x0, y0, rw, rh = stages.rect
        outside = np.ones(img.data.shape[:2], dtype=bool)
        outside[y0 : y0 + rh, x0 : x0 + rw] = False
        assert np.array_equal(stages.distorted.data[outside], img.data[outside])

    def test_params_validation(self):
        with pytest.raises(ValueError):
            NdaaParams(block_size=1)
        with pytest.raises(ValueError):
            NdaaParams(amplitude_range=(0.5, 2.0))
        with pytest.raises(ValueError):
            NdaaParams(rect_frac_range=(0.0, 0.5))


class TestAnomalySample:
    def test_empty_mask_rejected_outside_rotation(self):
        from flawforge import AnomalySample

        img = texture_image(19, 16)
        empty = Mask(np.zeros((16, 16), dtype=np.uint8))
        with pytest.raises(ValueError):
            AnomalySample(image=img, mask=empty, category="opaque")
        sample = AnomalySample(image=img, mask=empty, category="rotation")
        assert sample.mask.is_empty()

    def test_generate_sample_roundtrip(self):
        from flawforge import AnomalySourcePool, OperatorParams
        from flawforge.dataset import generate_sample

        img = texture_image(18, 48)
        pool = AnomalySourcePool(mode="self-patch")
        for category in ("cutpaste", "opaque", "transparent", "nsa"):
            sample = generate_sample(category, img, 5, pool, OperatorParams(), source_path="x.png")
            assert sample.category == category
            assert not sample.mask.is_empty()
            assert sample.source_path == "x.png"
            assert "mask_area" in sample.params_used


class TestRotateNormal:
    def test_single_angle_identity(self):
        img = texture_image(20)
        sample = rotate_normal(img, make_rng(0), angle_set=[0.0])
        assert np.array_equal(sample.image.data, img.data)
        assert sample.mask.is_empty()

    def test_mask_always_zero(self):
        img = texture_image(21)
        for seed in range(5):
            sample = rotate_normal(img, make_rng(seed))
            assert sample.mask.data.sum() == 0

    def test_deterministic_angle(self):
        img = texture_image(22)
        a = rotate_normal(img, make_rng(9), angle_set=[10.0, 20.0, 30.0])
        b = rotate_normal(img, make_rng(9), angle_set=[10.0, 20.0, 30.0])
        assert a.params_used == b.params_used
        assert np.array_equal(a.image.data, b.image.data)

    def test_empty_angle_set(self):
        with pytest.raises(EmptyAngleSetError):
            rotate_normal(texture_image(23), make_rng(0), angle_set=[])


class TestCutpaste:
    def test_constant_image_noop_pixels(self):
        img = ImageBuffer(np.full((32, 32, 3), 0.25))
        out, mask = cutpaste(img, make_rng(0))
        assert np.array_equal(out.data, img.data)
        assert mask.data.sum() > 0

    def test_mask_is_exact_rectangle(self):
        img = texture_image(30)
        out, mask = cutpaste(img, make_rng(1))
        ys, xs = np.nonzero(mask.data)
        area = (ys.max() - ys.min() + 1) * (xs.max() - xs.min() + 1)
        assert mask.data.sum() == area

    def test_locality(self):
        img = texture_image(31)
        out, mask = cutpaste(img, make_rng(2))
        off = mask.data == 0
        assert np.array_equal(out.data[off], img.data[off])

    def test_pasted_content_matches_source(self):
        img = texture_image(32)
        rng = make_rng(3)
        out, mask = cutpaste(img, rng)
        # pasted region must exist verbatim somewhere in the original image
        ys, xs = np.nonzero(mask.data)
        y0, x0 = ys.min(), xs.min()
        rh, rw = ys.max() - y0 + 1, xs.max() - x0 + 1
        patch = out.data[y0 : y0 + rh, x0 : x0 + rw]
        found = False
        for sy in range(img.height - rh + 1):
            for sx in range(img.width - rw + 1):
                if np.array_equal(img.data[sy : sy + rh, sx : sx + rw], patch):
                    found = True
                    break
            if found:
                break
        assert found


class TestPoissonSolver:
    def test_identical_patch_returns_input_exactly(self):
        rng = make_rng(0)
        dest = rng.uniform(0, 1, (20, 24))
        result = blend_channel(dest, dest.copy(), 1e-4, 10_000)
        assert np.array_equal(result.values, dest)
        assert result.iterations == 0

    def test_boundary_bit_exact(self):
        rng = make_rng(1)
        dest = rng.uniform(0, 1, (16, 16))
        patch = rng.uniform(0, 1, (16, 16))
        result = blend_channel(dest, patch, 1e-4, 10_000)
        assert np.array_equal(result.values[0, :], dest[0, :])
        assert np.array_equal(result.values[-1, :], dest[-1, :])
        assert np.array_equal(result.values[:, 0], dest[:, 0])
        assert np.array_equal(result.values[:, -1], dest[:, -1])

    def test_interior_residual_bound(self):
        # oracle: apply the 5-point stencil to the solver output directly
        rng = make_rng(2)
        tol = 1e-4
        for _ in range(3):
            dest = rng.uniform(0, 1, (64, 64))
            patch = rng.uniform(0, 1, (64, 64))
            result = blend_channel(dest, patch, tol, 10_000)
            assert result.converged
            residual = np.abs(_laplacian(result.values) - _laplacian(patch)).max()
            assert residual <= 4 * tol

    def test_not_converged_reported(self):
        rng = make_rng(3)
        dest = rng.uniform(0, 1, (32, 32))
        patch = rng.uniform(0, 1, (32, 32))
        result = blend_channel(dest, patch, 1e-12, 3)
        assert not result.converged
        assert result.residual > 0


class TestPoissonPaste:
    def test_locality_and_border(self):
        rng = make_rng(4)
        img = random_image(rng, 40, 40)
        src = random_image(rng, 40, 40)
        out, mask = poisson_paste(img, src, make_rng(5))
        off = mask.data == 0
        assert np.array_equal(out.data[off], img.data[off])
        assert mask.data.sum() > 0

    def test_deterministic(self):
        rng = make_rng(6)
        img = random_image(rng, 32, 32)
        src = random_image(rng, 32, 32)
        a, am = poisson_paste(img, src, make_rng(7))
        b, bm = poisson_paste(img, src, make_rng(7))
        assert np.array_equal(a.data, b.data)
        assert np.array_equal(am.data, bm.data)

    def test_range_preserved(self):
        rng = make_rng(8)
        img = random_image(rng, 32, 32)
        src = random_image(rng, 32, 32)
        out, _ = poisson_paste(img, src, make_rng(9))
        assert out.data.min() >= 0.0 and out.data.max() <= 1.0
