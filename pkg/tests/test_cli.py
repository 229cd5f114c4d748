import csv
import subprocess
import sys

import pytest

from vlsvitals.cli import main


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def trace_file(tmp_path, capsys):
    path = tmp_path / "trace.txt"
    assert run(["simulate", path], capsys)[0] == 0
    return path


class TestSimulate:
    def test_default(self, trace_file):
        lines = trace_file.read_text().splitlines()
        assert sum(not l.startswith("#") for l in lines) == 6000

    def test_scheduled(self, tmp_path, capsys):
        path = tmp_path / "long.txt"
        code, out, _ = run(["simulate", path, "--duration", 900, "--schedule", "0:30:120; 900:12:70"], capsys)
        assert code == 0
        assert "samples: 90000" in out

    def test_csv(self, tmp_path, capsys):
        out_csv = tmp_path / "t.csv"
        run(["simulate", tmp_path / "t.txt", "--duration", 1, "--csv", out_csv], capsys)
        rows = list(csv.reader(out_csv.open()))
        assert rows[0] == ["time_s", "power_w"] and len(rows) == 101

    @pytest.mark.parametrize("extra", [["--distance", "-1"], ["--schedule", "1:2"], ["--snr", "x"]])
    def test_invalid(self, tmp_path, capsys, extra):
        code, _, err = run(["simulate", tmp_path / "x.txt", *extra], capsys)
        assert code == 1 and "error" in err

    def test_unwritable(self, tmp_path, capsys):
        assert run(["simulate", tmp_path / "missing" / "x.txt"], capsys)[0] == 2


class TestEstimate:
    def test_default(self, trace_file, capsys):
        code, out, _ = run(["estimate", trace_file], capsys)
        assert code == 0
        assert "breathing: 14.6484 BPM" in out
        assert "heart: 73.2422 BPM" in out
        assert "error 2.3438% vs 15.0000 BPM" in out
        assert "bin width: 2.9297 BPM" in out

    def test_window_1024(self, trace_file, capsys):
        assert "bin width: 5.8594 BPM" in run(["estimate", trace_file, "--window", 1024], capsys)[1]

    def test_no_truth_no_error(self, tmp_path, capsys, trace_file):
        bare = tmp_path / "bare.txt"
        bare.write_text("\n".join(l for l in trace_file.read_text().splitlines() if "truth" not in l) + "\n")
        code, out, _ = run(["estimate", bare], capsys)
        assert code == 0 and "error" not in out

    def test_preset_filter_needs_override(self, trace_file, capsys):
        code, _, err = run(["estimate", trace_file, "--filter", "paper"], capsys)
        assert code == 3 and "--allow-unstable" in err
        assert run(["estimate", trace_file, "--filter", "paper", "--allow-unstable"], capsys)[0] == 0

    def test_csv_rows(self, trace_file, tmp_path, capsys):
        out_csv = tmp_path / "w.csv"
        run(["estimate", trace_file, "--csv", out_csv], capsys)
        rows = list(csv.DictReader(out_csv.open()))
        assert len(rows) == 4 and rows[1]["bpm"] == "73.2421875"

    def test_missing_file(self, tmp_path, capsys):
        assert run(["estimate", tmp_path / "none.txt"], capsys)[0] == 2

    def test_bad_trace(self, tmp_path, capsys):
        bad = tmp_path / "bad.txt"
        bad.write_text("# fs=100\n1\nfoo\n")
        code, _, err = run(["estimate", bad], capsys)
        assert code == 1 and "line 3" in err

    def test_bad_window(self, trace_file, capsys):
        assert run(["estimate", trace_file, "--window", 1000], capsys)[0] == 1


class TestSweepAndResponse:
    def test_sweep_deterministic(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["sweep", "--values", "0.3,0.6", "--trials", 2, "--noise-std", 1e-13, "--seed", 7]
        assert run([*args, "--csv", a], capsys)[0] == 0
        run([*args, "--csv", b], capsys)
        assert a.read_bytes() == b.read_bytes()
        rows = list(csv.DictReader(a.open()))
        assert float(rows[0]["mean_power_w"]) > float(rows[1]["mean_power_w"])

    def test_sweep_stdout(self, capsys):
        code, out, _ = run(["sweep", "--values", "0.4", "--trials", 1], capsys)
        assert code == 0 and out.startswith("parameter,value,trials")

    def test_identity_response(self, capsys):
        code, out, _ = run(["response", "--filter", "identity", "--points", 5], capsys)
        rows = list(csv.DictReader(out.splitlines()))
        assert code == 0 and len(rows) == 10
        assert all(float(r["magnitude_db"]) == 0.0 for r in rows)

    def test_preset_verdicts(self, capsys):
        code, _, err = run(["response", "--filter", "paper", "--points", 11], capsys)
        assert code == 0
        assert "breathing filter [paper-breathing]: marginal" in err
        assert "heart filter [paper-heart]: unstable" in err

    def test_config_file(self, tmp_path, capsys, trace_file):
        ini = tmp_path / "c.ini"
        ini.write_text("[pipeline]\nwindow_size = 512\n")
        assert "11.7188" in run(["estimate", trace_file, "--config", ini], capsys)[1]
        ini.write_text("[pipeline]\nwindo = 512\n")
        code, _, err = run(["estimate", trace_file, "--config", ini], capsys)
        assert code == 1 and "pipeline.windo" in err

    def test_usage_error_exit_code(self):
        proc = subprocess.run([sys.executable, "-m", "vlsvitals", "bogus"], capture_output=True, text=True)
        assert proc.returncode == 1
