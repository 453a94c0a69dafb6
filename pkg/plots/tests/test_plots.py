"""The plotting scripts consume the producer CLI's CSVs and nothing else.

Real inputs come from invoking ``chebgibbs`` as a subprocess (its external
interface); schema violations are exercised with synthetic files.
"""

import subprocess
import sys
from pathlib import Path

import pytest

PLOTS_DIR = Path(__file__).resolve().parent.parent
CONVERGENCE = PLOTS_DIR / "plot_convergence.py"
COMPARE = PLOTS_DIR / "plot_fourier_compare.py"
HIGHFREQ = PLOTS_DIR / "plot_highfreq.py"

CONFIG_TEXT = """{
  "preset": {"name": "cantor", "alpha": 0.3183098861837907, "weights": [0.5, 0.5]},
  "defaults": {"N": 48, "T": 5000, "T0": 200, "replicas": 4, "seed": 3}
}
"""


def _run(script, *argv):
    return subprocess.run(
        [sys.executable, str(script), *argv], capture_output=True, text=True
    )


def _producer(*argv):
    proc = subprocess.run(
        [sys.executable, "-m", "chebgibbs.cli", *argv], capture_output=True, text=True
    )
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    path = tmp_path_factory.mktemp("figures")
    (path / "system.json").write_text(CONFIG_TEXT)
    return path


@pytest.fixture(scope="module")
def sweep_csv(workdir):
    out = workdir / "sweep.csv"
    _producer("integrate", str(workdir / "system.json"), "--psi", "x^2",
              "--sweep-N", "8:48:8", "--out", str(out))
    return out


@pytest.fixture(scope="module")
def method_csvs(workdir):
    cfg = str(workdir / "system.json")
    paths = {}
    for method in ("oracle", "direct", "ulam"):
        out = workdir / f"{method}.csv"
        _producer("fourier", cfg, "--method", method, "--xi", "0:40:21",
                  "--M", "60", "--out", str(out))
        paths[method] = out
    return paths


@pytest.fixture(scope="module")
def highfreq_csv(workdir):
    out = workdir / "window.csv"
    _producer("fourier", str(workdir / "system.json"), "--method", "mc",
              "--xi", "1000:1010:6", "--T", "5000", "--reference", "oracle",
              "--out", str(out))
    return out


def _assert_image(path):
    assert path.exists()
    assert path.stat().st_size > 1000


class TestConvergence:
    def test_renders_producer_output(self, workdir, sweep_csv):
        out = workdir / "convergence.png"
        proc = _run(CONVERGENCE, str(sweep_csv), "--out", str(out))
        assert proc.returncode == 0, proc.stderr
        _assert_image(out)

    def test_monotone_synthetic(self, tmp_path):
        csv = tmp_path / "synthetic.csv"
        rows = [f"{n},{1.0},{10.0 ** -n}" for n in range(1, 8)]
        csv.write_text("# schema=1\nN,value,delta_vs_final\n" + "\n".join(rows) + "\n")
        out = tmp_path / "synthetic.svg"
        assert _run(CONVERGENCE, str(csv), "--out", str(out)).returncode == 0
        _assert_image(out)

    def test_empty_data_rejected(self, tmp_path):
        csv = tmp_path / "empty.csv"
        csv.write_text("# schema=1\nN,value,delta_vs_final\n")
        proc = _run(CONVERGENCE, str(csv), "--out", str(tmp_path / "no.png"))
        assert proc.returncode != 0
        assert "error" in proc.stderr

    def test_unknown_schema_rejected(self, tmp_path):
        csv = tmp_path / "v2.csv"
        csv.write_text("# schema=2\nN,value,delta_vs_final\n4,1.0,0.1\n")
        assert _run(CONVERGENCE, str(csv), "--out", str(tmp_path / "no.png")).returncode != 0

    def test_missing_columns_rejected(self, tmp_path):
        csv = tmp_path / "cols.csv"
        csv.write_text("# schema=1\nN,value\n4,1.0\n")
        assert _run(CONVERGENCE, str(csv), "--out", str(tmp_path / "no.png")).returncode != 0


class TestFourierCompare:
    def test_full_comparison(self, workdir, method_csvs):
        out = workdir / "compare.png"
        proc = _run(
            COMPARE,
            str(method_csvs["oracle"]), str(method_csvs["direct"]), str(method_csvs["ulam"]),
            "--labels", "oracle", "direct", "ulam",
            "--out", str(out),
        )
        assert proc.returncode == 0, proc.stderr
        _assert_image(out)

    def test_single_method_no_error_panel(self, workdir, method_csvs):
        out = workdir / "single.png"
        proc = _run(COMPARE, str(method_csvs["direct"]), "--out", str(out))
        assert proc.returncode == 0, proc.stderr
        _assert_image(out)

    def test_misaligned_grids_rejected(self, workdir, method_csvs, tmp_path):
        other = tmp_path / "offgrid.csv"
        _producer("fourier", str(workdir / "system.json"), "--method", "oracle",
                  "--xi", "0:40:11", "--out", str(other))
        proc = _run(COMPARE, str(method_csvs["oracle"]), str(other),
                    "--out", str(tmp_path / "no.png"))
        assert proc.returncode != 0
        assert "xi grid" in proc.stderr

    def test_label_count_mismatch(self, method_csvs, tmp_path):
        proc = _run(COMPARE, str(method_csvs["oracle"]), "--labels", "a", "b",
                    "--out", str(tmp_path / "no.png"))
        assert proc.returncode != 0


class TestHighFreq:
    def test_renders_window(self, workdir, highfreq_csv):
        out = workdir / "window.png"
        proc = _run(HIGHFREQ, str(highfreq_csv), "--out", str(out))
        assert proc.returncode == 0, proc.stderr
        _assert_image(out)

    def test_constant_synthetic(self, tmp_path):
        csv = tmp_path / "flat.csv"
        rows = [f"{x},0.5,0.0,0.5,0.01,0.5,0.0" for x in range(5)]
        csv.write_text(
            "# schema=1\nxi,re,im,abs,std_error,ref_abs,abs_error\n" + "\n".join(rows) + "\n"
        )
        out = tmp_path / "flat.png"
        assert _run(HIGHFREQ, str(csv), "--out", str(out)).returncode == 0
        _assert_image(out)

    def test_missing_reference_columns_rejected(self, workdir, tmp_path):
        bare = tmp_path / "bare.csv"
        _producer("fourier", str(workdir / "system.json"), "--method", "mc",
                  "--xi", "0:5:3", "--T", "2000", "--out", str(bare))
        proc = _run(HIGHFREQ, str(bare), "--out", str(tmp_path / "no.png"))
        assert proc.returncode != 0
        assert "ref_abs" in proc.stderr
