import json

import pytest

from gaborlab.cli import main


def run(args):
    return main(args)


def read_json(path):
    return json.loads(path.read_text())


SMALL_MATRIX = ["--n", "256", "--radius", "2", "--alpha", "0.5", "--beta", "0.5"]


class TestExitCodes:
    def test_selftest_passes(self, tmp_path, capsys):
        rc = run(["selftest", "--out", str(tmp_path)])
        out = capsys.readouterr().out
        assert rc == 0
        assert "PASS" in out and "FAIL" not in out
        assert (tmp_path / "selftest.json").exists()

    def test_invalid_tau_is_config_error(self, tmp_path):
        rc = run(["matrix", "--out", str(tmp_path), "--tau", "1.5"])
        assert rc == 2

    def test_invalid_symbol_is_config_error(self, tmp_path):
        rc = run(["matrix", "--out", str(tmp_path), "--symbol", "bogus(1)"])
        assert rc == 2

    def test_route_violation_is_exit_3(self, tmp_path):
        rc = run(["matrix", "--out", str(tmp_path), "--route", "both",
                  "--route-tol", "1e-30"] + SMALL_MATRIX)
        assert rc == 3
        assert (tmp_path / "route_check.json").exists()

    def test_unknown_command_is_exit_2(self, tmp_path):
        rc = run(["frobnicate"])
        assert rc == 2


class TestMatrixCommand:
    def test_both_routes_with_artifacts(self, tmp_path):
        rc = run(["matrix", "--out", str(tmp_path), "--route", "both"]
                 + SMALL_MATRIX)
        assert rc == 0
        manifest = read_json(tmp_path / "manifest.json")
        assert set(manifest["artifacts"]) == {"matrix.csv", "matrix_stft.csv",
                                              "route_check.json"}
        check = read_json(tmp_path / "route_check.json")
        assert check["within_tolerance"]
        assert check["config_hash"] == manifest["config_hash"]
        first = (tmp_path / "matrix.csv").read_text().splitlines()[0]
        assert first == f"# config_hash={manifest['config_hash']}"

    def test_born_jordan_route(self, tmp_path):
        rc = run(["matrix", "--out", str(tmp_path), "--route", "bj",
                  "--quad-nodes", "2"] + SMALL_MATRIX)
        assert rc == 0
        assert (tmp_path / "matrix.csv").exists()


class TestDeterminism:
    def test_rerun_and_parallel_byte_identical(self, tmp_path):
        args = ["matrix", "--route", "both"] + SMALL_MATRIX
        outs = []
        for i, par in enumerate(("1", "4", "1")):
            out = tmp_path / f"run{i}"
            rc = run(args + ["--out", str(out), "--parallel", par])
            assert rc == 0
            outs.append(out)
        for name in ("matrix.csv", "matrix_stft.csv", "route_check.json",
                     "manifest.json"):
            blobs = {(o / name).read_bytes() for o in outs}
            assert len(blobs) == 1, f"{name} differs across runs"

    def test_manifest_checksums_match_artifacts(self, tmp_path):
        import hashlib
        rc = run(["decay", "--out", str(tmp_path), "--n", "256", "--radius", "3",
                  "--symbol", "constant(1)", "--m", "0"])
        assert rc == 0
        manifest = read_json(tmp_path / "manifest.json")
        for name, digest in manifest["artifacts"].items():
            assert hashlib.sha256((tmp_path / name).read_bytes()).hexdigest() == digest


class TestConfigFile:
    def test_file_then_flag_override(self, tmp_path):
        cfg = tmp_path / "exp.cfg"
        cfg.write_text("# comment\nradius = 2\nalpha = 0.5\nbeta = 0.5\n"
                       "n = 256\ntau = 0.25\n")
        out1 = tmp_path / "o1"
        rc = run(["matrix", "--config", str(cfg), "--out", str(out1)])
        assert rc == 0
        assert read_json(out1 / "manifest.json")["config"]["tau"] == 0.25
        out2 = tmp_path / "o2"
        rc = run(["matrix", "--config", str(cfg), "--out", str(out2),
                  "--tau", "0.75"])
        assert rc == 0
        assert read_json(out2 / "manifest.json")["config"]["tau"] == 0.75

    def test_unknown_key_rejected(self, tmp_path):
        cfg = tmp_path / "exp.cfg"
        cfg.write_text("frobnicate = 1\n")
        rc = run(["matrix", "--config", str(cfg), "--out", str(tmp_path / "o")])
        assert rc == 2

    def test_bad_value_rejected(self, tmp_path):
        cfg = tmp_path / "exp.cfg"
        cfg.write_text("radius = soon\n")
        rc = run(["matrix", "--config", str(cfg), "--out", str(tmp_path / "o")])
        assert rc == 2


class TestOtherCommands:
    def test_stft_writes_csv_and_binary(self, tmp_path):
        rc = run(["stft", "--out", str(tmp_path), "--n", "64", "--dt", "0.25",
                  "--x-step", "4", "--binary"])
        assert rc == 0
        lines = (tmp_path / "stft.csv").read_text().splitlines()
        assert lines[1] == "x,omega,re,im"
        from gaborlab.serialize import read_phase_space_binary
        arr = read_phase_space_binary(tmp_path / "stft.tfq")
        assert arr.x_grid.n_samples == 16

    def test_wigner_bj(self, tmp_path):
        rc = run(["wigner", "--out", str(tmp_path), "--n", "64", "--dt", "0.25",
                  "--bj", "--quad-nodes", "2"])
        assert rc == 0
        assert (tmp_path / "wigner.csv").exists()

    def test_frames(self, tmp_path):
        rc = run(["frames", "--out", str(tmp_path), "--n", "128", "--dt", "0.125",
                  "--alpha", "1.0", "--beta", "0.5", "--radius", "8"])
        assert rc == 0
        rep = read_json(tmp_path / "frames.json")
        assert rep["lower_bound_estimate"] > 0

    def test_tausweep(self, tmp_path):
        rc = run(["tausweep", "--out", str(tmp_path), "--n", "256",
                  "--radius", "2", "--taus", "0,0.5,1"])
        assert rc == 0
        data = read_json(tmp_path / "tausweep.json")
        assert len(data["norms"]) == 3

    def test_norms(self, tmp_path):
        rc = run(["norms", "--out", str(tmp_path), "--n", "256",
                  "--signals", "gauss,hermite1", "--q-list", "1,inf",
                  "--s-list", "0"])
        assert rc == 0
        lines = (tmp_path / "norms.csv").read_text().splitlines()
        assert lines[1] == "signal_id,norm_name,parameters,value"
        assert len(lines) == 2 + 2 * 2 * 1 * 3

    def test_embed(self, tmp_path):
        rc = run(["embed", "--out", str(tmp_path), "--n", "256"])
        assert rc == 0
        rep = read_json(tmp_path / "embed.json")
        assert rep["all_as_predicted"]
        assert rep["checks"]["mod_reversed_control"]["violated"]

    def test_decay_rejects_chirp(self, tmp_path):
        rc = run(["decay", "--out", str(tmp_path), "--n", "256", "--radius", "3",
                  "--symbol", "chirp(1)", "--m", "0", "--n-order", "1"])
        assert rc == 2
