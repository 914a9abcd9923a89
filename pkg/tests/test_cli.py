import json

import numpy as np
import pytest
from PIL import Image

from depthprop import (
    PlaneContainer,
    read_depth_png,
    read_planes,
    write_depth_png,
    write_planes,
)
from depthprop.cli import main
from conftest import sparse_depth


@pytest.fixture
def workspace(rng, tmp_path):
    """Sparse depth, a guidance image, and confidence planes on disk."""
    shape = (16, 20)
    sparse = sparse_depth(rng, shape, density=0.3, low=1.0, high=60.0)
    sparse_path = tmp_path / "sparse.png"
    write_depth_png(sparse, sparse_path)

    image = (rng.random((*shape, 3)) * 255).astype(np.uint8)
    image_path = tmp_path / "guide.png"
    Image.fromarray(image).save(image_path)

    conf_cd = rng.standard_normal(shape).astype(np.float32)
    conf_dd = rng.standard_normal(shape).astype(np.float32)
    cd_path = tmp_path / "conf_cd.bin"
    dd_path = tmp_path / "conf_dd.bin"
    write_planes(PlaneContainer(planes=conf_cd[None]), cd_path)
    write_planes(PlaneContainer(planes=conf_dd[None]), dd_path)

    return {
        "dir": tmp_path,
        "shape": shape,
        "sparse": sparse,
        "sparse_path": sparse_path,
        "image_path": image_path,
        "conf_cd": cd_path,
        "conf_dd": dd_path,
    }


def gen_affinity(workspace, name="field.aff"):
    path = workspace["dir"] / name
    code = main(
        [
            "gen-affinity",
            "--image", str(workspace["image_path"]),
            "--kernel", "3",
            "--sigma", "0.1",
            "--output", str(path),
        ]
    )
    assert code == 0
    return path


class TestRefine:
    def test_end_to_end_with_anchor(self, workspace):
        field = gen_affinity(workspace)
        out = workspace["dir"] / "refined.png"
        code = main(
            [
                "refine",
                "--schedule", "c2",
                "--iterations", "12",
                "--affinity", str(field),
                "--input", str(workspace["sparse_path"]),
                "--anchor",
                "--output", str(out),
            ]
        )
        assert code == 0
        refined = read_depth_png(out)
        sparse = workspace["sparse"]
        mask = sparse > 0
        # anchored pixels survive the PNG round trip within 1/512 m
        assert np.abs(refined[mask] - sparse[mask]).max() <= 1 / 512
        assert (refined > 0).all()

    def test_byte_identical_across_runs(self, workspace):
        field = gen_affinity(workspace)
        out_a = workspace["dir"] / "a.png"
        out_b = workspace["dir"] / "b.png"
        argv = [
            "refine",
            "--affinity", str(field),
            "--input", str(workspace["sparse_path"]),
            "--anchor",
        ]
        assert main(argv + ["--output", str(out_a)]) == 0
        assert main(argv + ["--output", str(out_b)]) == 0
        assert out_a.read_bytes() == out_b.read_bytes()

    def test_explicit_coarse_input(self, workspace):
        field = gen_affinity(workspace)
        coarse_path = workspace["dir"] / "coarse.png"
        write_depth_png(np.full(workspace["shape"], 10.0, np.float32), coarse_path)
        out = workspace["dir"] / "refined.png"
        code = main(
            [
                "refine",
                "--affinity", str(field),
                "--coarse", str(coarse_path),
                "--output", str(out),
                "--engine", "naive",
            ]
        )
        assert code == 0
        np.testing.assert_allclose(read_depth_png(out), 10.0, atol=1 / 256)

    def test_unknown_schedule_is_usage_error(self, workspace, capsys):
        field = gen_affinity(workspace)
        code = main(
            [
                "refine",
                "--schedule", "c9",
                "--affinity", str(field),
                "--input", str(workspace["sparse_path"]),
                "--output", str(workspace["dir"] / "x.png"),
            ]
        )
        assert code == 1
        assert "usage error" in capsys.readouterr().err

    def test_anchor_without_input_is_usage_error(self, workspace):
        field = gen_affinity(workspace)
        coarse_path = workspace["dir"] / "coarse.png"
        write_depth_png(np.full(workspace["shape"], 10.0, np.float32), coarse_path)
        code = main(
            [
                "refine",
                "--affinity", str(field),
                "--coarse", str(coarse_path),
                "--anchor",
                "--output", str(workspace["dir"] / "x.png"),
            ]
        )
        assert code == 1

    def test_corrupt_affinity_is_data_error(self, workspace, capsys):
        bad = workspace["dir"] / "bad.aff"
        bad.write_bytes(b"garbage")
        code = main(
            [
                "refine",
                "--affinity", str(bad),
                "--input", str(workspace["sparse_path"]),
                "--output", str(workspace["dir"] / "x.png"),
            ]
        )
        assert code == 2
        assert "error" in capsys.readouterr().err

    def test_mismatched_shapes_is_data_error(self, workspace, rng):
        field = gen_affinity(workspace)
        other_path = workspace["dir"] / "other.png"
        write_depth_png(np.full((4, 4), 5.0, np.float32), other_path)
        code = main(
            [
                "refine",
                "--affinity", str(field),
                "--coarse", str(other_path),
                "--output", str(workspace["dir"] / "x.png"),
            ]
        )
        assert code == 2


class TestFuse:
    def test_fuses_two_predictions(self, workspace):
        shape = workspace["shape"]
        a_path = workspace["dir"] / "a.png"
        b_path = workspace["dir"] / "b.png"
        write_depth_png(np.full(shape, 10.0, np.float32), a_path)
        write_depth_png(np.full(shape, 20.0, np.float32), b_path)
        out = workspace["dir"] / "fused.png"
        code = main(
            [
                "fuse",
                "--depth-cd", str(a_path),
                "--depth-dd", str(b_path),
                "--conf-cd", str(workspace["conf_cd"]),
                "--conf-dd", str(workspace["conf_dd"]),
                "--output", str(out),
            ]
        )
        assert code == 0
        fused = read_depth_png(out)
        assert (fused >= 10.0 - 1 / 256).all()
        assert (fused <= 20.0 + 1 / 256).all()

    def test_multi_plane_confidence_rejected(self, workspace, rng):
        shape = workspace["shape"]
        a_path = workspace["dir"] / "a.png"
        write_depth_png(np.full(shape, 10.0, np.float32), a_path)
        two = workspace["dir"] / "two.bin"
        write_planes(PlaneContainer(planes=np.zeros((2, *shape), np.float32)), two)
        code = main(
            [
                "fuse",
                "--depth-cd", str(a_path),
                "--depth-dd", str(a_path),
                "--conf-cd", str(two),
                "--conf-dd", str(workspace["conf_dd"]),
                "--output", str(workspace["dir"] / "out.png"),
            ]
        )
        assert code == 2


class TestBackproject:
    def test_with_explicit_intrinsics(self, workspace):
        out = workspace["dir"] / "pos.bin"
        code = main(
            [
                "backproject",
                "--input", str(workspace["sparse_path"]),
                "--fx", "700", "--fy", "700", "--u0", "10", "--v0", "8",
                "--output", str(out),
            ]
        )
        assert code == 0
        container = read_planes(out)
        assert container.plane_count == 3
        # z plane equals the sparse input up to PNG quantization
        sparse = workspace["sparse"]
        np.testing.assert_allclose(container.planes[2], sparse, atol=1 / 512)

    def test_with_calib_file(self, workspace):
        calib = workspace["dir"] / "calib.txt"
        calib.write_text("P2: 721.5 0 609.6 44.9 0 721.5 172.9 0.2 0 0 1 0.003\n")
        out = workspace["dir"] / "pos.bin"
        code = main(
            [
                "backproject",
                "--input", str(workspace["sparse_path"]),
                "--calib", str(calib),
                "--output", str(out),
            ]
        )
        assert code == 0

    def test_missing_intrinsics_is_usage_error(self, workspace):
        code = main(
            [
                "backproject",
                "--input", str(workspace["sparse_path"]),
                "--output", str(workspace["dir"] / "pos.bin"),
            ]
        )
        assert code == 1

    def test_partial_intrinsics_is_usage_error(self, workspace):
        code = main(
            [
                "backproject",
                "--input", str(workspace["sparse_path"]),
                "--fx", "700",
                "--output", str(workspace["dir"] / "pos.bin"),
            ]
        )
        assert code == 1


class TestEval:
    def test_self_comparison_is_all_zero(self, workspace, capsys):
        code = main(
            [
                "eval",
                "--pred", str(workspace["sparse_path"]),
                "--gt", str(workspace["sparse_path"]),
            ]
        )
        assert code == 0
        out = capsys.readouterr().out
        machine = out.splitlines()[0]
        assert "rmse_mm=0.000000" in machine
        assert "imae_per_km=0.000000" in machine
        assert "RMSE" in out

    def test_missing_file_is_data_error(self, workspace):
        code = main(
            [
                "eval",
                "--pred", str(workspace["dir"] / "nope.png"),
                "--gt", str(workspace["sparse_path"]),
            ]
        )
        assert code == 2


class TestBenchCommand:
    def test_json_report(self, workspace):
        report_path = workspace["dir"] / "bench.json"
        code = main(
            [
                "bench",
                "--shape", "24x16",
                "--schedule", "c1",
                "--iterations", "4",
                "--impl", "both",
                "--json", str(report_path),
            ]
        )
        assert code == 0
        payload = json.loads(report_path.read_text())
        assert {r["label"] for r in payload["results"]} == {"naive", "accelerated"}
        assert payload["results"][0]["grid_shape"] == [16, 24]
        assert payload["speedup"] > 0
        assert payload["max_relative_difference"] <= 1e-5

    def test_single_impl(self, workspace, capsys):
        code = main(["bench", "--shape", "16x16", "--impl", "accelerated",
                     "--iterations", "4", "--schedule", "c1"])
        assert code == 0
        assert "accelerated" in capsys.readouterr().out


class TestTopLevel:
    def test_no_command_is_usage_error(self, capsys):
        assert main([]) == 1

    def test_unknown_command_is_usage_error(self):
        assert main(["frobnicate"]) == 1

    def test_help_exits_zero(self):
        assert main(["--help"]) == 0

    def test_threads_flag_accepted(self, workspace):
        code = main(
            [
                "--threads", "2",
                "eval",
                "--pred", str(workspace["sparse_path"]),
                "--gt", str(workspace["sparse_path"]),
            ]
        )
        assert code == 0
