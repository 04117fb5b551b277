import json
import subprocess

import pytest

from tpsdist.cli import main


def run_ok(argv):
    code = main(argv)
    assert code == 0
    return code


class TestPhiCommand:
    def test_grid_spec_row_count(self, tmp_path):
        run_ok(["phi", "--model", "tfim", "--regime", "nonintegrable",
                "--n", "3", "--times", "0:0.1:10", "--outdir", str(tmp_path)])
        csv = tmp_path / "phi_tfim_nonintegrable_N3.csv"
        lines = csv.read_text().splitlines()
        assert lines[0] == "t,phi"
        assert len(lines) == 102
        assert lines[1].startswith("0.0,")
        assert lines[-1].startswith("10.0,")

    def test_swap_unitary_single_row(self, tmp_path, capsys):
        run_ok(["phi", "--unitary", "swap", "--dims", "2,2",
                "--outdir", str(tmp_path)])
        text = (tmp_path / "phi_swap.csv").read_text()
        assert text == "t,phi\n0.0,0.0\n"
        assert "phi = 0.0" in capsys.readouterr().out

    def test_two_unitary_reaches_one(self, tmp_path):
        run_ok(["phi", "--unitary", "two-unitary", "--q", "3",
                "--outdir", str(tmp_path)])
        text = (tmp_path / "phi_two_unitary_q3.csv").read_text()
        assert text == "t,phi\n0.0,1.0\n"

    def test_haar_unitary_in_range(self, tmp_path):
        run_ok(["phi", "--unitary", "haar", "--dims", "2,3", "--seed", "4",
                "--outdir", str(tmp_path)])
        value = float((tmp_path / "phi_haar.csv").read_text()
                      .splitlines()[1].split(",")[1])
        assert 0.0 <= value <= 1.0

    def test_cluster_grouping(self, tmp_path):
        run_ok(["phi", "--model", "tfim", "--regime", "integrable",
                "--n", "4", "--clusters", "2", "--times", "0,1",
                "--outdir", str(tmp_path)])
        meta = json.loads((tmp_path / "phi_tfim_integrable_N4.json").read_text())
        assert "4" in meta["config"]["algebras"]

    def test_usage_errors_exit_two(self, tmp_path):
        cases = [
            ["phi"],
            ["phi", "--model", "tfim", "--n", "3"],
            ["phi", "--model", "tfim", "--regime", "chaotic", "--n", "3"],
            ["phi", "--model", "tfim", "--regime", "integrable", "--n", "3",
             "--dims", "2,2"],
            ["phi", "--model", "tfim", "--regime", "integrable", "--n", "4",
             "--clusters", "3"],
            ["phi", "--unitary", "swap", "--dims", "2,2,2"],
            ["phi", "--model", "tfim", "--regime", "integrable", "--n", "3",
             "--times", "5:1:2"],
        ]
        for argv in cases:
            with pytest.raises(SystemExit) as err:
                main(argv + ["--outdir", str(tmp_path)])
            assert err.value.code == 2

    def test_size_cap_exits_three(self, tmp_path, capsys):
        code = main(["phi", "--model", "tjz", "--n", "9", "--times", "0,1",
                     "--outdir", str(tmp_path)])
        assert code == 3
        assert "error:" in capsys.readouterr().err

    def test_outdir_env_fallback(self, tmp_path, monkeypatch):
        monkeypatch.setenv("TPSDIST_OUTDIR", str(tmp_path / "from_env"))
        run_ok(["phi", "--unitary", "swap", "--q", "2"])
        assert (tmp_path / "from_env" / "phi_swap.csv").exists()

    def test_config_file_preload_with_flag_override(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            "# preset for a small integrable run\n"
            "model = tfim\n"
            "regime = integrable\n"
            "n = 5\n"
            "times = 0,1\n"
            f"outdir = {tmp_path}\n")
        run_ok(["--config", str(cfg), "phi", "--n", "3"])
        assert (tmp_path / "phi_tfim_integrable_N3.csv").exists()
        run_ok(["--config", str(cfg), "phi"])
        assert (tmp_path / "phi_tfim_integrable_N5.csv").exists()


class TestVerifyCommand:
    def test_default_suite_passes(self, capsys):
        assert main(["verify"]) == 0
        out = capsys.readouterr().out
        assert "all identities passed" in out
        assert "FAIL" not in out

    def test_single_identity(self, capsys):
        assert main(["verify", "--identity", "bridge-identity"]) == 0
        out = capsys.readouterr().out
        assert "bridge-identity" in out

    def test_unknown_identity_exits_two(self):
        with pytest.raises(SystemExit) as err:
            main(["verify", "--identity", "bogus"])
        assert err.value.code == 2


class TestFiguresCommand:
    def test_fig2_tiny(self, tmp_path):
        run_ok(["figures", "--which", "2", "--n", "4", "--clusters", "1,2",
                "--window", "5,20", "--samples", "16",
                "--outdir", str(tmp_path)])
        assert (tmp_path / "fig2_m1.csv").exists()
        assert (tmp_path / "fig2_m2.csv").exists()

    def test_fig1_small(self, tmp_path):
        run_ok(["figures", "--which", "1", "--n", "4",
                "--outdir", str(tmp_path)])
        for regime in ("integrable", "nonintegrable"):
            lines = (tmp_path / f"fig1_{regime}.csv").read_text().splitlines()
            assert lines[0] == "t,phi,ep"
            assert len(lines) == 103


class TestEntryPoint:
    def test_console_script_is_wired(self, tmp_path):
        proc = subprocess.run(
            ["tpsdist", "phi", "--unitary", "swap", "--outdir", str(tmp_path)],
            capture_output=True, text=True)
        assert proc.returncode == 0
        assert (tmp_path / "phi_swap.csv").exists()
