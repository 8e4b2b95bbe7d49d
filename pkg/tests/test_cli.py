import json

import numpy as np
import pytest
from click.testing import CliRunner

from seplut.bundle import save_weight_bundle
from seplut.cli import main
from seplut.core import identity_lut3d
from seplut.generators import make_identity_bundle, make_random_bundle
from seplut.imgio import load_png, save_png
from seplut.analysis import psnr
from seplut.lutio import read_lut1d, write_cube, write_lut1d
from seplut.interp import apply_lut1d

from conftest import random_uint8_image


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def workdir(tmp_path):
    img = random_uint8_image(48, 64, seed=1)
    save_png(img, tmp_path / "input.png")
    save_weight_bundle(make_identity_bundle(4, 9, 9, 2), tmp_path / "identity.sepw")
    save_weight_bundle(make_random_bundle(4, 9, 9, 2, seed=2), tmp_path / "random.sepw")
    return tmp_path


def run_ok(runner, args):
    result = runner.invoke(main, args)
    assert result.exit_code == 0, result.output + str(result.exception)
    return result


class TestEnhance:
    def test_identity_bundle_preserves_image(self, runner, workdir):
        run_ok(runner, [
            "enhance", str(workdir / "input.png"),
            "-w", str(workdir / "identity.sepw"),
            "-o", str(workdir / "out.png"),
        ])
        out = load_png(workdir / "out.png")
        inp = load_png(workdir / "input.png")
        assert psnr(out, inp) >= 50.0

    def test_fixed_point_close_to_float(self, runner, workdir):
        run_ok(runner, [
            "enhance", str(workdir / "input.png"),
            "-w", str(workdir / "random.sepw"), "-o", str(workdir / "float.png"),
        ])
        run_ok(runner, [
            "enhance", str(workdir / "input.png"),
            "-w", str(workdir / "random.sepw"), "-o", str(workdir / "fixed.png"),
            "--fixed-point",
        ])
        a = load_png(workdir / "float.png").data.astype(int)
        b = load_png(workdir / "fixed.png").data.astype(int)
        assert np.max(np.abs(a - b)) <= 4

    def test_dumped_luts_reproduce_output(self, runner, workdir):
        run_ok(runner, [
            "enhance", str(workdir / "input.png"),
            "-w", str(workdir / "random.sepw"), "-o", str(workdir / "out.png"),
            "--dump-luts",
        ])
        run_ok(runner, [
            "apply-lut", str(workdir / "input.png"),
            "--lut1d", str(workdir / "out.lut1d.txt"),
            "--lut3d", str(workdir / "out.cube"),
            "-o", str(workdir / "replayed.png"),
        ])
        a = load_png(workdir / "out.png").data.astype(int)
        b = load_png(workdir / "replayed.png").data.astype(int)
        assert np.max(np.abs(a - b)) <= 1

    def test_intermediate_plus_lut3d_reproduces_output(self, runner, workdir):
        run_ok(runner, [
            "enhance", str(workdir / "input.png"),
            "-w", str(workdir / "random.sepw"), "-o", str(workdir / "out.png"),
            "--dump-luts", "--dump-intermediate",
        ])
        run_ok(runner, [
            "apply-lut", str(workdir / "out.intermediate.png"),
            "--lut3d", str(workdir / "out.cube"),
            "-o", str(workdir / "stage2.png"),
        ])
        a = load_png(workdir / "out.png").data.astype(int)
        b = load_png(workdir / "stage2.png").data.astype(int)
        assert np.max(np.abs(a - b)) <= 1

    def test_enhance_is_bit_exact_reproducible(self, runner, workdir):
        for name in ("a.png", "b.png"):
            run_ok(runner, [
                "enhance", str(workdir / "input.png"),
                "-w", str(workdir / "random.sepw"), "-o", str(workdir / name),
            ])
        assert (workdir / "a.png").read_bytes() == (workdir / "b.png").read_bytes()

    def test_tetrahedral_flag(self, runner, workdir):
        run_ok(runner, [
            "enhance", str(workdir / "input.png"),
            "-w", str(workdir / "random.sepw"), "-o", str(workdir / "tet.png"),
            "--interpolator", "tetrahedral",
        ])
        assert (workdir / "tet.png").is_file()

    def test_fixed_point_tetrahedral_is_usage_error(self, runner, workdir):
        result = runner.invoke(main, [
            "enhance", str(workdir / "input.png"),
            "-w", str(workdir / "random.sepw"), "-o", str(workdir / "x.png"),
            "--fixed-point", "--interpolator", "tetrahedral",
        ])
        assert result.exit_code != 0

    def test_sixteen_bit_input(self, runner, workdir):
        import cv2

        rng = np.random.default_rng(3)
        hwc = rng.integers(0, 65536, size=(24, 32, 3), dtype=np.uint16)
        cv2.imwrite(str(workdir / "in16.png"), hwc)
        run_ok(runner, [
            "enhance", str(workdir / "in16.png"),
            "-w", str(workdir / "identity.sepw"), "-o", str(workdir / "out16.png"),
        ])
        out = load_png(workdir / "out16.png")
        assert out.dtype == np.uint8
        # identity transform: 8-bit output equals the rounded 16-bit input
        expected = load_png(workdir / "in16.png").to_uint8()
        assert np.max(np.abs(out.data.astype(int) - expected.data.astype(int))) <= 1

    def test_missing_input_exits_2(self, runner, workdir):
        result = runner.invoke(main, [
            "enhance", str(workdir / "absent.png"),
            "-w", str(workdir / "identity.sepw"), "-o", str(workdir / "o.png"),
        ])
        assert result.exit_code == 2

    def test_corrupt_bundle_exits_2(self, runner, workdir):
        bad = workdir / "bad.sepw"
        bad.write_bytes(b"JUNKJUNKJUNKJUNK")
        result = runner.invoke(main, [
            "enhance", str(workdir / "input.png"),
            "-w", str(bad), "-o", str(workdir / "o.png"),
        ])
        assert result.exit_code == 2

    def test_shape_mismatch_bundle_exits_3(self, runner, workdir):
        raw = (workdir / "identity.sepw").read_bytes()
        patched = raw.replace(b'"m": 4', b'"m": 6', 1)
        (workdir / "mismatch.sepw").write_bytes(patched)
        result = runner.invoke(main, [
            "enhance", str(workdir / "input.png"),
            "-w", str(workdir / "mismatch.sepw"), "-o", str(workdir / "o.png"),
        ])
        assert result.exit_code == 3


class TestApplyLut:
    def test_identity_cube_leaves_image(self, runner, workdir):
        write_cube(identity_lut3d(17), workdir / "id.cube")
        run_ok(runner, [
            "apply-lut", str(workdir / "input.png"),
            "--lut3d", str(workdir / "id.cube"),
            "-o", str(workdir / "same.png"),
        ])
        a = load_png(workdir / "same.png").data.astype(int)
        b = load_png(workdir / "input.png").data.astype(int)
        assert np.max(np.abs(a - b)) <= 1

    def test_only_lut1d_stage(self, runner, workdir):
        rng = np.random.default_rng(4)
        from seplut.core import Lut1D

        lut = Lut1D(np.sort(rng.random((3, 9)), axis=1).astype(np.float32))
        write_lut1d(lut, workdir / "c.lut1d.txt")
        run_ok(runner, [
            "apply-lut", str(workdir / "input.png"),
            "--lut1d", str(workdir / "c.lut1d.txt"),
            "-o", str(workdir / "one.png"),
        ])
        expected = apply_lut1d(
            read_lut1d(workdir / "c.lut1d.txt"), load_png(workdir / "input.png").to_float()
        ).to_uint8()
        out = load_png(workdir / "one.png")
        np.testing.assert_array_equal(out.data, expected.data)

    def test_no_stage_is_usage_error(self, runner, workdir):
        result = runner.invoke(main, [
            "apply-lut", str(workdir / "input.png"), "-o", str(workdir / "o.png"),
        ])
        assert result.exit_code != 0


class TestReports:
    def test_metrics_self_comparison(self, runner, workdir):
        result = run_ok(runner, [
            "metrics", str(workdir / "input.png"), str(workdir / "input.png"),
        ])
        payload = json.loads(result.output)
        assert payload["psnr"] == float("inf")
        assert abs(payload["ssim"] - 1.0) <= 1e-6
        assert payload["delta_e"] == 0.0

    def test_metrics_to_file(self, runner, workdir):
        save_png(random_uint8_image(48, 64, seed=9), workdir / "other.png")
        out = workdir / "report.json"
        run_ok(runner, [
            "metrics", str(workdir / "input.png"), str(workdir / "other.png"),
            "--out", str(out),
        ])
        payload = json.loads(out.read_text())
        assert set(payload) == {"psnr", "ssim", "delta_e"}
        assert payload["psnr"] < 20

    def test_analyze_fields(self, runner, workdir):
        result = run_ok(runner, [
            "analyze", str(workdir / "input.png"), "--lut-size", "9",
            "--reference", str(workdir / "input.png"),
        ])
        payload = json.loads(result.output)
        assert 0 < payload["cell_utilization"] <= 1
        assert len(payload["hist_variance"]) == 3
        assert payload["chi_square"] == 0.0

    def test_quantize_reports_reduction(self, runner, workdir):
        result = run_ok(runner, [
            "quantize", str(workdir / "random.sepw"), str(workdir / "q.sepw"),
        ])
        assert "equivalent parameters" in result.output
        assert (workdir / "q.sepw").is_file()
        run_ok(runner, [
            "enhance", str(workdir / "input.png"),
            "-w", str(workdir / "q.sepw"), "-o", str(workdir / "qout.png"),
        ])

    def test_bench_smoke(self, runner, workdir):
        result = run_ok(runner, [
            "bench", "--resolution", "480p", "--iterations", "3",
            "--mode", "fixed", "--stage", "luts_only",
        ])
        payload = json.loads(result.output)
        assert len(payload["samples_ms"]) == 3
        assert payload["min_ms"] <= payload["mean_ms"] <= payload["max_ms"]
        assert "compute only" in payload["note"]

    def test_bench_both_reports_ratio(self, runner, workdir):
        result = run_ok(runner, [
            "bench", "--resolution", "480p", "--iterations", "3",
            "--mode", "both", "--stage", "luts_only",
        ])
        payload = json.loads(result.output)
        assert payload["speedup_fixed_over_float"] > 0

    def test_bench_luts_only_scales_with_pixels(self):
        from seplut.bench import RESOLUTIONS, run_bench

        small = run_bench("480p", iterations=3, mode="fixed", stage="luts_only", seed=5)
        big = run_bench("4k", iterations=3, mode="fixed", stage="luts_only", seed=5)
        pixel_ratio = (RESOLUTIONS["4k"][0] * RESOLUTIONS["4k"][1]) / (
            RESOLUTIONS["480p"][0] * RESOLUTIONS["480p"][1]
        )
        time_ratio = big["median_ms"] / small["median_ms"]
        assert pixel_ratio / 2 <= time_ratio <= pixel_ratio * 2
