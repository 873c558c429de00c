import subprocess
import sys

import numpy as np
import pytest

from eigenseg.imagecore import labeling_from_mask, load_image, rand_index, write_ppm
from eigenseg.synthetic import noisy_two_block_image, two_block_ground_truth, two_block_image


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "eigenseg", *args],
        capture_output=True,
        text=True,
    )


def stats_dict(path):
    out = {}
    for line in path.read_text().splitlines():
        key, value = line.split("=", 1)
        out[key] = value
    return out


def drop_times(text):
    return "\n".join(l for l in text.splitlines() if not l.startswith("time_"))


@pytest.fixture(scope="module")
def block_pgm(tmp_path_factory):
    path = tmp_path_factory.mktemp("imgs") / "block.ppm"
    write_ppm(two_block_image(), path)
    return path


class TestSegment:
    def test_gray_pipeline_recovers_blocks(self, block_pgm, tmp_path):
        mask = tmp_path / "mask.pgm"
        stats = tmp_path / "stats.txt"
        proc = run_cli(
            "segment", "--input", str(block_pgm), "--output", str(mask),
            "--stats", str(stats), "--lambda", "1",
        )
        assert proc.returncode == 0, proc.stderr
        got = labeling_from_mask(load_image(mask))
        assert rand_index(got, two_block_ground_truth()) == 1.0
        parsed = stats_dict(stats)
        assert int(parsed["s0"]) + int(parsed["s1"]) == int(parsed["n"])
        total = float(parsed["exact_total"])
        expect = float(parsed["exact_data"]) + float(parsed["lambda"]) * float(
            parsed["exact_smooth"]
        )
        assert total == expect
        assert int(parsed["converged"]) == 1

    def test_color_pipeline_recovers_blocks(self, block_pgm, tmp_path):
        mask = tmp_path / "mask.pgm"
        proc = run_cli(
            "segment", "--input", str(block_pgm), "--output", str(mask),
            "--mode", "color",
        )
        assert proc.returncode == 0, proc.stderr
        got = labeling_from_mask(load_image(mask))
        assert rand_index(got, two_block_ground_truth()) == 1.0

    def test_overlay_figure_and_json(self, block_pgm, tmp_path):
        mask = tmp_path / "mask.pgm"
        overlay = tmp_path / "overlay.ppm"
        figure = tmp_path / "fig.png"
        sj = tmp_path / "stats.json"
        proc = run_cli(
            "segment", "--input", str(block_pgm), "--output", str(mask),
            "--overlay", str(overlay), "--figure", str(figure), "--stats-json", str(sj),
        )
        assert proc.returncode == 0, proc.stderr
        ov = load_image(overlay)
        assert (ov.width, ov.height) == (32, 32)
        assert figure.stat().st_size > 0
        import json

        assert "eigenvalue" in json.loads(sj.read_text())

    def test_determinism_modulo_timings(self, block_pgm, tmp_path):
        masks, stats = [], []
        for i in range(2):
            mask = tmp_path / f"m{i}.pgm"
            st = tmp_path / f"s{i}.txt"
            proc = run_cli(
                "segment", "--input", str(block_pgm), "--output", str(mask),
                "--stats", str(st), "--seed", "42",
            )
            assert proc.returncode == 0
            masks.append(mask.read_bytes())
            stats.append(drop_times(st.read_text()))
        assert masks[0] == masks[1]
        assert stats[0] == stats[1]

    def test_missing_input_is_io_error(self, tmp_path):
        mask = tmp_path / "mask.pgm"
        proc = run_cli("segment", "--input", str(tmp_path / "nope.pgm"), "--output", str(mask))
        assert proc.returncode == 3
        assert not mask.exists()

    def test_bad_lambda_is_config_error(self, block_pgm, tmp_path):
        proc = run_cli(
            "segment", "--input", str(block_pgm),
            "--output", str(tmp_path / "m.pgm"), "--lambda", "-2",
        )
        assert proc.returncode == 2

    def test_unknown_flag_is_config_error(self, block_pgm):
        proc = run_cli("segment", "--input", str(block_pgm), "--frobnicate")
        assert proc.returncode == 2


class TestPartitionDemo:
    def test_yes_instance(self):
        proc = run_cli("partition-demo", "1,2,3")
        assert proc.returncode == 0
        assert "partition=YES" in proc.stdout
        assert "min_block_energy=1.9095425048844383" in proc.stdout
        assert "target=1.9095425048844383" in proc.stdout

    def test_no_instance(self):
        proc = run_cli("partition-demo", "1,1,4")
        assert proc.returncode == 0
        assert "partition=NO" in proc.stdout

    def test_odd_total(self):
        proc = run_cli("partition-demo", "3")
        assert proc.returncode == 0
        assert "partition=NO" in proc.stdout

    def test_malformed_list(self):
        assert run_cli("partition-demo", "1,x,3").returncode == 2

    def test_too_many_values(self):
        assert run_cli("partition-demo", ",".join(["1"] * 25)).returncode == 2


class TestBench:
    def test_single_size_no_ratio(self):
        proc = run_cli("bench", "--sizes", "1024", "--repeats", "2")
        assert proc.returncode == 0
        lines = [l for l in proc.stdout.splitlines() if l and not l.startswith("n\t")]
        assert len(lines) == 1
        assert lines[0].endswith("-\t-")

    def test_zero_repeats_is_config_error(self):
        assert run_cli("bench", "--sizes", "1024", "--repeats", "0").returncode == 2

    def test_descending_sizes_is_config_error(self):
        assert run_cli("bench", "--sizes", "2048,1024").returncode == 2

    def test_report_files_written(self, tmp_path):
        proc = run_cli(
            "bench", "--sizes", "256,1024", "--repeats", "2",
            "--report-dir", str(tmp_path),
        )
        assert proc.returncode == 0, proc.stderr
        assert (tmp_path / "bench.csv").exists()
        assert (tmp_path / "bench.png").stat().st_size > 0
        header = (tmp_path / "bench.csv").read_text().splitlines()[0]
        assert header.startswith("n,matvec_seconds,segment_seconds")


class TestSweep:
    def test_reports_and_masks(self, tmp_path):
        src = tmp_path / "noisy.ppm"
        write_ppm(noisy_two_block_image(), src)
        out = tmp_path / "sweep"
        proc = run_cli(
            "sweep", "--input", str(src), "--out-dir", str(out), "--lambdas", "1,10",
        )
        assert proc.returncode == 0, proc.stderr
        assert (out / "sweep.csv").exists()
        assert (out / "sweep.png").stat().st_size > 0
        assert (out / "mask_lambda1.pgm").exists()
        assert (out / "mask_lambda10.pgm").exists()
        assert "non-increasing" in proc.stdout

    def test_bad_lambda_list(self, tmp_path):
        src = tmp_path / "noisy.ppm"
        write_ppm(noisy_two_block_image(), src)
        proc = run_cli(
            "sweep", "--input", str(src), "--out-dir", str(tmp_path / "o"),
            "--lambdas", "a,b",
        )
        assert proc.returncode == 2
