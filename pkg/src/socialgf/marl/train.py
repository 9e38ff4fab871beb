"""Variant-aware PPO training and policy checkpoints.

A bundle couples per-role policies with their observation providers so the
same rollout machinery serves baseline-observation and field-observation
methods. Adaptation rewires a trained bundle's representation slots without
touching network weights; the observation width is unchanged by
construction, so the policy keeps working on the new task.
"""

import copy
from dataclasses import dataclass, field

import numpy as np

from socialgf.container import read_container, write_container
from socialgf.errors import ArtifactError, ConfigurationError, UsageError
from socialgf.marl.buffer import compute_gae
from socialgf.marl.policy import RolePolicy, ValueNorm, init_role_policy
from socialgf.marl.ppo import PPOConfig, make_optimizers, ppo_update
from socialgf.marl.rollout import (
    GF_VARIANTS, SOCIALGFS_PLUS, SOCIALGFS_STAR, VARIANTS,
    BaselineObsProvider, EnvPool, GFObsProvider, collect_rollouts,
    make_reward_fn, role_members,
)
from socialgf.numerics.checkpoint import store_arrays, store_from, store_meta
from socialgf.representation import ShapingConfig, swap_slots
from socialgf.world import ScenarioConfig, scenario_from_dict


@dataclass
class PolicyBundle:
    variant: str
    config: ScenarioConfig
    policies: dict                 # role -> RolePolicy
    providers: dict                # role -> observation provider
    reps: dict = None              # role -> GFRepresentation (gf variants)
    shaping: dict = None           # role -> ShapingConfig
    metadata: dict = field(default_factory=dict)

    def copy(self):
        return PolicyBundle(self.variant, self.config,
                            {r: p.copy() for r, p in self.policies.items()},
                            dict(self.providers),
                            dict(self.reps) if self.reps else None,
                            dict(self.shaping) if self.shaping else None,
                            copy.deepcopy(self.metadata))


def build_bundle(variant, config, seed, reps=None, shaping=None):
    """Fresh bundle with initialized per-role policies sized to the variant's
    observation widths."""
    if variant not in VARIANTS:
        raise ConfigurationError(f"unknown method variant {variant!r}")
    roles = config.roles()
    uses_gf = variant in GF_VARIANTS
    if uses_gf:
        if not reps or any(r not in reps for r in roles):
            raise ConfigurationError(
                f"variant {variant} needs a representation for every role "
                f"{roles}")
        providers = {r: GFObsProvider(reps[r]) for r in roles}
    else:
        providers = {r: BaselineObsProvider(config) for r in roles}
    if variant == SOCIALGFS_PLUS:
        shaping = shaping or {r: ShapingConfig(enabled=True) for r in roles}
        for r in roles:
            if not shaping[r].enabled:
                raise ConfigurationError(
                    "socialgfs_plus requires shaping enabled for every role")
    elif shaping is None:
        shaping = {r: ShapingConfig(enabled=False) for r in roles}
    root = np.random.SeedSequence(seed)
    init_rngs = root.spawn(len(roles))
    policies = {}
    for r, ss in zip(roles, init_rngs):
        policies[r] = init_role_policy(providers[r].width,
                                       np.random.default_rng(ss))
    return PolicyBundle(variant, config, policies, providers,
                        reps if uses_gf else None, shaping,
                        metadata={"seed": int(seed), "steps_trained": 0})


def train(bundle, ppo_cfg, seed, curve=None):
    """PPO until the step budget is spent. Mutates the bundle's policies in
    place and returns (bundle, curves); zero budget returns it untouched."""
    roles = list(bundle.config.roles())
    updates = ppo_cfg.total_steps // (ppo_cfg.n_envs * ppo_cfg.horizon)
    curves = curve if curve is not None else []
    if updates == 0:
        return bundle, curves
    root = np.random.SeedSequence((seed, 1))
    env_seed, rollout_seed, update_seed = (int(s) for s in root.generate_state(3))
    pool = EnvPool(bundle.config, ppo_cfg.n_envs, env_seed)
    rollout_rng = np.random.default_rng(rollout_seed)
    update_rng = np.random.default_rng(update_seed)
    reward_fn = make_reward_fn(bundle.variant, bundle.reps, bundle.shaping)
    opts = {r: make_optimizers(bundle.policies[r], ppo_cfg) for r in roles}

    steps_done = 0
    for _ in range(updates):
        episodes = []
        buffers = collect_rollouts(pool, bundle.policies, bundle.providers,
                                   reward_fn, ppo_cfg.horizon, rollout_rng,
                                   episode_log=episodes)
        steps_done += ppo_cfg.n_envs * ppo_cfg.horizon
        row = {"steps": steps_done}
        for r in roles:
            compute_gae(buffers[r], ppo_cfg.gamma, ppo_cfg.gae_lambda)
            stats = ppo_update(bundle.policies[r], buffers[r], ppo_cfg, opts[r],
                               update_rng)
            row.update({f"{r}/{k}": v for k, v in stats.items()})
            rewards = [e[f"reward/{r}"] for e in episodes]
            row[f"{r}/episode_reward"] = float(np.mean(rewards)) if rewards else None
        if episodes:
            row["success_rate"] = float(np.mean([e["success"] for e in episodes]))
        curves.append(row)
    bundle.metadata["steps_trained"] = bundle.metadata.get("steps_trained", 0) \
        + steps_done
    return bundle, curves


def swap_representation(bundle, mappings, target_config=None,
                        variant=SOCIALGFS_STAR, source_role=None):
    """Adapt a trained gf bundle to new fields: route each role's old slots
    through its mapping ({slot index: field | "zero" | "keep"}), keep network
    weights, keep observation widths.

    When the target scenario renames roles (grassland sheep -> nav agent),
    source_role picks which trained policy carries over; it is required if
    the source has several roles and the target role names match none.
    """
    if bundle.reps is None:
        raise UsageError("only gf-representation bundles can be swapped")
    new = bundle.copy()
    new.variant = variant
    if target_config is not None:
        new.config = target_config
    roles_new = new.config.roles()
    reps = {}
    providers = {}
    policies = {}
    shaping = {}
    for role in roles_new:
        if role in bundle.reps:
            src = role
        elif source_role is not None:
            src = source_role
        elif len(bundle.reps) == 1:
            src = next(iter(bundle.reps))
        else:
            raise ConfigurationError(
                f"target role {role!r} matches no source role "
                f"{sorted(bundle.reps)}; pass source_role")
        mapping = mappings[src] if src in mappings else mappings
        rep = swap_slots(bundle.reps[src], mapping)
        if rep.width != bundle.policies[src].obs_width:
            raise ConfigurationError(
                f"swap changed the observation width for role {role}: "
                f"{rep.width} vs {bundle.policies[src].obs_width}")
        reps[role] = rep
        providers[role] = GFObsProvider(rep)
        policies[role] = bundle.policies[src].copy()
        shaping[role] = (bundle.shaping or {}).get(src,
                                                   ShapingConfig(enabled=False))
    new.reps = reps
    new.providers = providers
    new.policies = policies
    new.shaping = shaping
    new.metadata["adapted_from"] = bundle.variant
    return new


def save_policy(path, bundle, manifest_paths=None, config_hash=None):
    """Checkpoint: per-role parameters, value-norm state, variant, scenario,
    and (for gf bundles) the manifest path per role."""
    roles_meta = {}
    arrays = {}
    for role, pol in bundle.policies.items():
        roles_meta[role] = {
            "actor": store_meta(pol.actor),
            "critic": store_meta(pol.critic),
            "value_norm": {"mean": pol.value_norm.mean, "var": pol.value_norm.var,
                           "count": pol.value_norm.count},
            "obs_mode": bundle.providers[role].mode,
            "manifest": None if manifest_paths is None else
                        str(manifest_paths.get(role)),
        }
        arrays.update(store_arrays(pol.actor, f"{role}/actor/"))
        arrays.update(store_arrays(pol.critic, f"{role}/critic/"))
        arrays[f"{role}/log_std"] = pol.log_std
    meta = {
        "kind": "policy",
        "variant": bundle.variant,
        "scenario": bundle.config.to_dict(),
        "roles": roles_meta,
        "metadata": bundle.metadata,
        "config_hash": config_hash,
    }
    write_container(path, meta, arrays)


def load_policy(path):
    """Load a checkpoint. gf-variant bundles resolve their representations
    through the recorded manifest paths."""
    from socialgf.representation import load_manifest

    meta, arrays, _ = read_container(path)
    if meta.get("kind") != "policy":
        raise ArtifactError(f"{path} is not a policy checkpoint")
    config = scenario_from_dict(meta["scenario"])
    policies, providers, reps, shaping = {}, {}, {}, {}
    for role, rm in meta["roles"].items():
        vn = rm["value_norm"]
        policies[role] = RolePolicy(
            store_from(rm["actor"], arrays, f"{role}/actor/"),
            arrays[f"{role}/log_std"],
            store_from(rm["critic"], arrays, f"{role}/critic/"),
            ValueNorm(vn["mean"], vn["var"], vn["count"]))
        if rm["obs_mode"] == "gf":
            if not rm["manifest"]:
                raise ArtifactError(
                    f"{path}: role {role} was trained on gf observations but "
                    f"records no manifest path")
            rep, shap = load_manifest(rm["manifest"])
            reps[role] = rep
            shaping[role] = shap
            providers[role] = GFObsProvider(rep)
        else:
            providers[role] = BaselineObsProvider(config)
    bundle = PolicyBundle(meta["variant"], config, policies, providers,
                          reps or None, shaping or None,
                          metadata=dict(meta["metadata"]))
    return bundle, meta
