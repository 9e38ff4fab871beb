"""Run configuration: one YAML document pins an entire experiment.

Sections: scenario (world geometry), collect (behavior policy + targets),
gf (score-field training, with per-category overrides), representation
(per-role slot lists + shaping), ppo, variant, adaptation (for the
transferred variant), seed. The sha256 over the canonical JSON form is the
config hash embedded in every artifact the run produces.
"""

import hashlib
import json

import yaml

from socialgf.errors import ConfigurationError
from socialgf.marl.rollout import VARIANTS
from socialgf.scorefield import GFTrainConfig, NoiseSchedule
from socialgf.marl.ppo import PPOConfig
from socialgf.representation import ShapingConfig
from socialgf.world import ScenarioConfig


class RunConfig:
    def __init__(self, doc, path=None):
        if not isinstance(doc, dict):
            raise ConfigurationError("run config must be a mapping")
        self.doc = doc
        self.path = path
        if "scenario" not in doc:
            raise ConfigurationError("run config needs a scenario section")
        try:
            self.scenario = ScenarioConfig(**doc["scenario"])
        except TypeError as exc:
            raise ConfigurationError(f"bad scenario section: {exc}") from exc
        self.seed = int(doc.get("seed", 0))
        self.variant = doc.get("variant", "socialgfs_plus")
        if self.variant not in VARIANTS:
            raise ConfigurationError(
                f"variant {self.variant!r} not in {VARIANTS}")

    @property
    def config_hash(self):
        blob = json.dumps(self.doc, sort_keys=True, separators=(",", ":"),
                          default=str)
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]

    def collect_options(self):
        c = dict(self.doc.get("collect", {}))
        c.setdefault("policy", "scripted_greedy")
        c.setdefault("n_target", 1000)
        c.setdefault("max_episodes", 5000)
        c.setdefault("seed", self.seed)
        return c

    def gf_config(self, category):
        block = self.doc.get("gf", {})
        opts = dict(block.get("defaults", {}))
        opts.update(block.get("categories", {}).get(category, {}))
        sched = NoiseSchedule(
            sigma0=float(opts.pop("sigma0", 25.0)),
            t_min=float(opts.pop("t_min", 0.01)),
            t_max=float(opts.pop("t_max", 1.0)))
        known = {"lr", "betas", "batch_size", "steps", "hidden", "t_eval",
                 "log_every"}
        bad = set(opts) - known
        if bad:
            raise ConfigurationError(f"unknown gf options: {sorted(bad)}")
        if "betas" in opts:
            opts["betas"] = tuple(opts["betas"])
        return GFTrainConfig(schedule=sched, **opts)

    def representation_spec(self):
        """{role: {"slots": [category...], "shaping": ShapingConfig,
        "include_self_velocity": bool}}"""
        rep = self.doc.get("representation", {})
        out = {}
        for role, block in rep.items():
            slots = block.get("slots")
            if not slots:
                raise ConfigurationError(
                    f"representation for role {role!r} names no slots")
            sh = block.get("shaping", {})
            out[role] = {
                "slots": list(slots),
                "include_self_velocity": bool(block.get("include_self_velocity",
                                                        True)),
                "shaping": ShapingConfig(float(sh.get("lambda", 0.01)),
                                         bool(sh.get("enabled", False))),
            }
        return out

    def ppo_config(self, budget_override=None):
        opts = dict(self.doc.get("ppo", {}))
        if budget_override is not None:
            opts["total_steps"] = int(budget_override)
        try:
            return PPOConfig(**opts)
        except TypeError as exc:
            raise ConfigurationError(f"bad ppo section: {exc}") from exc

    def adaptation_spec(self):
        return self.doc.get("adaptation")

    def evaluation_options(self):
        e = dict(self.doc.get("evaluation", {}))
        e.setdefault("episodes", 1000)
        e.setdefault("seed", self.seed)
        return e


def load_run_config(path, overrides=None):
    try:
        with open(path, encoding="utf-8") as f:
            doc = yaml.safe_load(f)
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"config {path} is not valid YAML: {exc}") from exc
    if overrides:
        doc = dict(doc or {})
        doc.update(overrides)
    return RunConfig(doc, path=path)
