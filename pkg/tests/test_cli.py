import json

import numpy as np
import pytest
import yaml

from socialgf.cli.main import EXIT_OK, EXIT_USAGE, EXIT_VERIFY_FAIL, main

TINY_NAV = {
    "scenario": {"scenario": "vanilla_nav", "n_agents": 2, "half_width": 8.0},
    "seed": 3,
    "variant": "socialgfs_plus",
    "collect": {"policy": "scripted_greedy", "n_target": 40, "max_episodes": 500},
    "gf": {"defaults": {"steps": 250, "batch_size": 64}},
    "representation": {
        "agent": {"slots": ["navigation"],
                  "shaping": {"lambda": 0.01, "enabled": True}}},
    "ppo": {"n_envs": 2, "horizon": 20, "total_steps": 160, "epochs": 2},
    "evaluation": {"episodes": 2},
}


@pytest.fixture
def workspace(tmp_path):
    cfg_path = tmp_path / "run.yaml"
    cfg_path.write_text(yaml.safe_dump(TINY_NAV))
    out = tmp_path / "artifacts"
    return cfg_path, out


def run(args):
    return main([str(a) for a in args])


class TestPipeline:
    def test_full_desk_pipeline(self, workspace, capsys):
        cfg, out = workspace
        assert run(["collect", "--config", cfg, "--out", out]) == EXIT_OK
        assert (out / "datasets" / "dataset.sgfd").exists()
        assert run(["train-gf", "--config", cfg, "--out", out,
                    "--category", "navigation"]) == EXIT_OK
        assert (out / "fields" / "navigation.sgff").exists()
        assert (out / "reports" / "gf_curve_navigation.jsonl").exists()
        assert run(["train-marl", "--config", cfg, "--out", out]) == EXIT_OK
        policy = out / "policies" / "socialgfs_plus.sgfp"
        assert policy.exists()
        assert (out / "policies" / "manifest_agent.json").exists()
        assert run(["evaluate", "--config", cfg, "--out", out,
                    "--policy", policy]) == EXIT_OK
        report = json.loads((out / "reports" / "evaluate_socialgfs_plus.json")
                            .read_text())
        assert {"success_rate", "occupation_rate", "config_hash"} <= set(report)
        assert run(["render", "--config", cfg, "--out", out,
                    "--policy", policy]) == EXIT_OK
        frames = out / "frames" / "episode_seed3.jsonl"
        assert len(frames.read_text().splitlines()) == 100

    def test_rerun_is_up_to_date_noop(self, workspace, capsys):
        cfg, out = workspace
        assert run(["collect", "--config", cfg, "--out", out]) == EXIT_OK
        first = (out / "datasets" / "dataset.sgfd").read_bytes()
        assert run(["collect", "--config", cfg, "--out", out]) == EXIT_OK
        assert "up to date" in capsys.readouterr().out
        assert (out / "datasets" / "dataset.sgfd").read_bytes() == first

    def test_changed_config_refuses_without_force(self, workspace, tmp_path, capsys):
        cfg, out = workspace
        assert run(["collect", "--config", cfg, "--out", out]) == EXIT_OK
        doc = dict(TINY_NAV)
        doc["collect"] = dict(doc["collect"], n_target=45)
        cfg2 = tmp_path / "run2.yaml"
        cfg2.write_text(yaml.safe_dump(doc))
        assert run(["collect", "--config", cfg2, "--out", out]) == EXIT_USAGE
        assert "config hash" in capsys.readouterr().err
        assert run(["collect", "--config", cfg2, "--out", out,
                    "--force"]) == EXIT_OK

    def test_train_gf_without_dataset_names_collect(self, workspace, capsys):
        cfg, out = workspace
        assert run(["train-gf", "--config", cfg, "--out", out,
                    "--category", "navigation"]) == EXIT_USAGE
        assert "socialgf collect" in capsys.readouterr().err

    def test_unknown_category_rejected(self, workspace, capsys):
        cfg, out = workspace
        run(["collect", "--config", cfg, "--out", out])
        assert run(["train-gf", "--config", cfg, "--out", out,
                    "--category", "bogus"]) == EXIT_USAGE

    def test_lock_collision_reports_error(self, workspace, capsys):
        cfg, out = workspace
        out.mkdir(parents=True)
        (out / ".sgf.lock").write_text("held")
        assert run(["collect", "--config", cfg, "--out", out]) == EXIT_USAGE
        assert "lock" in capsys.readouterr().err


class TestVerifyCommand:
    def test_exit_codes_follow_oracle_outcomes(self, monkeypatch, capsys):
        from socialgf.cli import verify as V

        monkeypatch.setattr(V, "CHECKS", (
            ("always_ok", lambda: 0.0, 1.0, "stub"),
        ))
        assert main(["verify"]) == EXIT_OK
        assert "PASS" in capsys.readouterr().out
        monkeypatch.setattr(V, "CHECKS", (
            ("always_bad", lambda: 2.0, 1.0, "stub"),
        ))
        assert main(["verify"]) == EXIT_VERIFY_FAIL
        assert "FAIL" in capsys.readouterr().out

    def test_sign_flip_mutation_breaks_the_point_mass_oracle(self, monkeypatch):
        # the oracle must notice a DSM target sign error
        from socialgf.cli import verify as V
        from socialgf.scorefield import field as field_mod

        baseline = V._check_point_mass()
        assert baseline <= 0.10
        real = field_mod.field_score

        def flipped(*args, **kwargs):
            return -real(*args, **kwargs)

        monkeypatch.setattr(V, "field_score", flipped)
        assert V._check_point_mass() > 0.10
