"""Command-line smoke tests."""

import json
from pathlib import Path

import pytest
from typer.testing import CliRunner

from locokernel.cli import app
from locokernel.terrain import read_heightfield

REPO_ROOT = Path(__file__).resolve().parents[1]

runner = CliRunner()


def invoke(*args):
    return runner.invoke(app, [str(a) for a in args])


def _tsv_rows(path: Path):
    return [line.split("\t") for line in path.read_text().splitlines()]


class TestKernelCommands:
    """terrain, obs, encode, stability, fk and config"""

    def test_terrain_writes_heightfield(self, tmp_path):
        out = tmp_path / "stones.hf"
        result = invoke("terrain", "--kind", "stones", "--level", "5", "--seed", "2", "--out", out)
        assert result.exit_code == 0, result.output
        hf = read_heightfield(out)
        assert hf.resolution == 0.05
        assert hf.void.any()

    def test_unknown_terrain_fails(self, tmp_path):
        result = invoke("terrain", "--kind", "lava", "--out", tmp_path / "x.hf")
        assert result.exit_code == 1
        assert not (tmp_path / "x.hf").exists()

    def test_obs_then_encode(self, tmp_path):
        field = tmp_path / "flat.hf"
        frame = tmp_path / "frame.json"
        latent = tmp_path / "z.json"
        assert invoke("terrain", "--kind", "smooth", "--out", field).exit_code == 0

        result = invoke("obs", "--field", field, "--pose", "0,0,0.28,0", "--command", "0.5,0,0", "--out", frame)
        assert result.exit_code == 0, result.output
        assert "-0.280" in result.output

        result = invoke("encode", "--frame", frame, "--seed", "4", "--dump-attention", "--out", latent)
        assert result.exit_code == 0, result.output
        assert "z_t = [" in result.output
        assert "Attention peaks" in result.output
        payload = json.loads(latent.read_text())
        assert len(payload["z"]) == 64
        assert len(payload["attention"]) == 4

    def test_encode_param_file_round_trip(self, tmp_path):
        field, frame, params = tmp_path / "flat.hf", tmp_path / "frame.json", tmp_path / "enc.lkep"
        invoke("terrain", "--kind", "smooth", "--out", field)
        invoke("obs", "--field", field, "--pose", "0,0,0.28,0", "--out", frame)
        saved = invoke("encode", "--frame", frame, "--seed", "1", "--save-params", params, "--out", tmp_path / "a.json")
        assert saved.exit_code == 0, saved.output
        loaded = invoke("encode", "--frame", frame, "--params", params, "--out", tmp_path / "b.json")
        assert loaded.exit_code == 0, loaded.output
        a = json.loads((tmp_path / "a.json").read_text())["z"]
        b = json.loads((tmp_path / "b.json").read_text())["z"]
        assert b == pytest.approx(a, abs=1e-4)

    def test_bad_param_file(self, tmp_path):
        field, frame, params = tmp_path / "flat.hf", tmp_path / "frame.json", tmp_path / "junk.lkep"
        invoke("terrain", "--kind", "smooth", "--out", field)
        invoke("obs", "--field", field, "--pose", "0,0,0.28,0", "--out", frame)
        params.write_bytes(b"not a parameter file")
        assert invoke("encode", "--frame", frame, "--params", params).exit_code == 1

    def test_stability_margins(self, tmp_path):
        contacts = tmp_path / "contacts.txt"
        contacts.write_text(
            "# x y z fx fy fz\n"
            "0.2 0.15 0 0 0 10\n"
            "0.2 0.85 0 0 0 10\n"
            "0.6 0.15 0 0 0 10\n"
            "0.6 0.85 0 0 0 10\n"
        )
        result = invoke("stability", "--contacts", contacts, "--kind", "com", "--point", "0.4,0.3")
        assert result.exit_code == 0, result.output
        assert "margin 0.150000000" in result.output

        result = invoke("stability", "--contacts", contacts, "--kind", "cop")
        assert "point 0.400000 0.500000" in result.output
        assert "margin 0.200000000" in result.output

        result = invoke("stability", "--contacts", contacts, "--kind", "com", "--point", "1.4,0.5")
        assert "margin -0.800000000" in result.output

    def test_stability_degenerate(self, tmp_path):
        contacts = tmp_path / "line.txt"
        contacts.write_text("0 0 0 0 0 10\n1 0 0 0 0 10\n")
        result = invoke("stability", "--contacts", contacts)
        assert result.exit_code == 0
        assert "margin undefined" in result.output

    def test_stability_bad_row(self, tmp_path):
        contacts = tmp_path / "bad.txt"
        contacts.write_text("0 0 0 0 0 10\n1 0 0\n")
        assert invoke("stability", "--contacts", contacts).exit_code == 1

    def test_fk_table(self):
        q = ",".join(["0", "0.8", "-1.6"] * 4)
        result = invoke("fk", "--q", q)
        assert result.exit_code == 0, result.output
        for leg in ("FR", "FL", "RR", "RL"):
            assert leg in result.output
        assert "0.183000" in result.output

    def test_fk_needs_twelve_angles(self):
        assert invoke("fk", "--q", "0,0.8,-1.6").exit_code != 0

    def test_config_list_and_show(self, monkeypatch):
        monkeypatch.chdir(REPO_ROOT)
        result = invoke("config", "list")
        assert result.exit_code == 0
        assert "default" in result.output
        result = invoke("config", "show")
        assert result.exit_code == 0
        assert "z_target: 0.35" in result.output

    def test_invalid_config_file(self, tmp_path):
        bad = tmp_path / "bad.yaml"
        bad.write_text("reward:\n  z_target: high\n")
        assert invoke("config", "show", "--config", bad).exit_code == 1


class TestEvalCommand:
    """eval: rollouts, results table, log ingestion and reward summaries"""

    def test_eval_ingest_and_reward(self, tmp_path):
        out = tmp_path / "results.tsv"
        traj = tmp_path / "traj"
        result = invoke(
            "eval",
            "--terrain", "smooth",
            "--levels", "0",
            "--n", "2",
            "--duration", "2",
            "--speed", "1.0",
            "--criteria", "half_expected",
            "--out", out,
            "--log-dir", traj,
            "--quiet",
        )  # fmt: skip
        assert result.exit_code == 0, result.output

        rows = _tsv_rows(out)
        assert rows[0][:5] == ["terrain", "level", "velocity", "n", "success_pct"]
        assert rows[1][:5] == ["smooth", "0", "1.00", "2", "100.0"]
        assert rows[-1][0] == "overall"
        metrics = json.loads((tmp_path / "metrics.json").read_text())
        assert metrics["rollouts"] == 2
        assert "run_id" in metrics

        logs = sorted(traj.glob("*.jsonl"))
        assert len(logs) == 2
        result = invoke("reward", "--log", logs[0], "--breakdown")
        assert result.exit_code == 0, result.output
        assert "100 steps, mean total reward" in result.output
        assert "lin_vel_track" in result.output

        ingested = tmp_path / "ingested.tsv"
        result = invoke("eval", "--ingest", traj, "--criteria", "half_expected", "--out", ingested, "--quiet")
        assert result.exit_code == 0, result.output
        assert _tsv_rows(ingested)[1][:5] == ["smooth", "0", "1.00", "2", "100.0"]

    def test_ingest_reports_malformed(self, tmp_path):
        traj = tmp_path / "traj"
        invoke("eval", "--levels", "0", "--n", "1", "--duration", "1", "--log-dir", traj, "--quiet")
        (traj / "broken.jsonl").write_text('{"schema": "locokernel.trajlog"\n')
        result = invoke("eval", "--ingest", traj, "--quiet")
        assert result.exit_code == 0, result.output
        assert "1 malformed logs skipped" in result.output

    def test_bad_levels(self, tmp_path):
        assert invoke("eval", "--levels", "3..12", "--out", tmp_path / "r.tsv").exit_code != 0

    def test_empty_ingest_directory(self, tmp_path):
        assert invoke("eval", "--ingest", tmp_path, "--quiet").exit_code == 1

    @pytest.mark.slow
    @pytest.mark.integration
    def test_terrain_level_grid(self, tmp_path):
        out = tmp_path / "grid.tsv"
        result = invoke(
            "eval",
            "--terrain", "smooth,stairs_up,stones",
            "--levels", "0,5,9",
            "--n", "20",
            "--duration", "5",
            "--out", out,
            "--quiet",
        )  # fmt: skip
        assert result.exit_code == 0, result.output
        rows = _tsv_rows(out)
        assert len(rows) == 1 + 9 + 1
        by_group = {(r[0], r[1]): float(r[4]) for r in rows[1:-1]}
        assert by_group[("smooth", "0")] == 100.0
        assert all(0.0 <= rate <= 100.0 for rate in by_group.values())
