"""Command-line pipeline driver.

    socialgf collect     --config CFG --out DIR        harvest example sets
    socialgf train-gf    --config CFG --out DIR --category NAME
    socialgf train-marl  --config CFG --out DIR [--budget STEPS]
    socialgf evaluate    --config CFG --out DIR --policy PATH
    socialgf cross-match --config CFG --out DIR
    socialgf render      --config CFG --out DIR --policy PATH
    socialgf verify

Exit codes: 0 ok, 1 verification failure, 2 usage/configuration error.
SOCIALGF_WORKERS is accepted for compatibility with multi-worker setups;
results never depend on it (execution is deterministic either way).
"""

import argparse
import os
import sys

import numpy as np

import socialgf
from socialgf.cli.artifacts import (
    ArtifactDir, RunLock, check_target, write_json, write_jsonl,
)
from socialgf.cli.config import load_run_config
from socialgf.errors import (
    ArtifactError, CollectionError, ConfigurationError, SocialGFError,
    UsageError,
)

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_USAGE = 2


def _parser():
    p = argparse.ArgumentParser(prog="socialgf", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--version", action="version", version=socialgf.__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, needs_config=True):
        if needs_config:
            sp.add_argument("--config", required=True, help="run config YAML")
        sp.add_argument("--out", required=True, help="artifact directory")
        sp.add_argument("--seed", type=int, default=None,
                        help="override the config seed")
        sp.add_argument("--force", action="store_true",
                        help="overwrite artifacts from a different config")

    sp = sub.add_parser("collect", help="harvest event-triggered example sets")
    common(sp)
    sp = sub.add_parser("train-gf", help="fit one gradient field")
    common(sp)
    sp.add_argument("--category", required=True)
    sp = sub.add_parser("train-marl", help="train policies for the configured variant")
    common(sp)
    sp.add_argument("--budget", type=int, default=None,
                    help="override ppo total_steps")
    sp = sub.add_parser("evaluate", help="evaluate a policy checkpoint")
    common(sp)
    sp.add_argument("--policy", required=True)
    sp = sub.add_parser("cross-match", help="wolf x sheep tournament matrix")
    common(sp)
    sp = sub.add_parser("render", help="dump one deterministic episode as frames")
    common(sp)
    sp.add_argument("--policy", required=True)
    sp.add_argument("--png", action="store_true", help="also rasterize frames")
    sub.add_parser("verify", help="run the oracle suite")
    return p


def _load(args):
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    cfg = load_run_config(args.config, overrides)
    art = ArtifactDir(args.out).prepare()
    return cfg, art


def cmd_collect(args):
    from socialgf.examples import collect_examples, save_dataset
    from socialgf.world.scripted import make_behavior_policy

    cfg, art = _load(args)
    target = art.dataset()
    if check_target(target, cfg.config_hash, args.force) == "up_to_date":
        print(f"up to date: {target}")
        return EXIT_OK
    opts = cfg.collect_options()
    policy = make_behavior_policy(opts["policy"])
    sets = collect_examples(cfg.scenario, policy, n_target=opts["n_target"],
                            seed=opts["seed"], max_episodes=opts["max_episodes"],
                            categories=opts.get("categories"))
    for name, es in sets.items():
        es.provenance["config_hash"] = cfg.config_hash
    save_dataset(sets, target, config_hash=cfg.config_hash)
    meta_rows = [{"category": k, "records": v.n_records} for k, v in sets.items()]
    print(f"wrote {target} ({meta_rows})")
    return EXIT_OK


def cmd_train_gf(args):
    from socialgf.examples import load_dataset
    from socialgf.scorefield import save_field, train_gf

    cfg, art = _load(args)
    target = art.field(args.category)
    if check_target(target, cfg.config_hash, args.force) == "up_to_date":
        print(f"up to date: {target}")
        return EXIT_OK
    dataset_path = art.dataset()
    if not dataset_path.exists():
        raise ArtifactError(
            f"no dataset at {dataset_path}; run `socialgf collect` first")
    sets = load_dataset(dataset_path)
    if args.category not in sets:
        raise UsageError(
            f"dataset has categories {sorted(sets)}, not {args.category!r}")
    gf_cfg = cfg.gf_config(args.category)
    field, curve = train_gf(sets[args.category], gf_cfg, seed=cfg.seed)
    save_field(target, field, extra_meta={"config_hash": cfg.config_hash,
                                          "train": gf_cfg.to_dict()})
    write_jsonl(art.report(f"gf_curve_{args.category}.jsonl"),
                [{"step": s, "loss": l} for s, l in curve])
    print(f"wrote {target} (final smoothed loss {curve[-1][1]:.4f})")
    return EXIT_OK


def _build_representations(cfg, art):
    """Resolve the config's representation spec against trained fields."""
    from socialgf.representation import representation_from_fields, save_manifest
    from socialgf.scorefield import load_field

    spec = cfg.representation_spec()
    reps, shaping, manifests = {}, {}, {}
    for role, block in spec.items():
        fields = []
        paths = {}
        for idx, category in enumerate(block["slots"]):
            path = art.field(category)
            if not path.exists():
                raise ArtifactError(
                    f"role {role!r} slot {idx} needs field {path}; run "
                    f"`socialgf train-gf --category {category}` first")
            field, _ = load_field(path)
            fields.append(field)
            paths[idx] = path
        rep = representation_from_fields(role, fields,
                                         block["include_self_velocity"])
        reps[role] = rep
        shaping[role] = block["shaping"]
        mpath = art.policy(f"manifest_{role}.json")
        save_manifest(mpath, rep, block["shaping"], paths)
        manifests[role] = mpath
    return reps, shaping, manifests


def cmd_train_marl(args):
    from socialgf.marl import build_bundle, save_policy, train
    from socialgf.marl.rollout import GF_VARIANTS, SOCIALGFS_STAR
    from socialgf.marl.train import load_policy, swap_representation

    cfg, art = _load(args)
    target = art.policy(f"{cfg.variant}.sgfp")
    if check_target(target, cfg.config_hash, args.force) == "up_to_date":
        print(f"up to date: {target}")
        return EXIT_OK
    ppo = cfg.ppo_config(budget_override=args.budget)
    manifests = None
    if cfg.variant == SOCIALGFS_STAR:
        adapt = cfg.adaptation_spec()
        if not adapt:
            raise ConfigurationError(
                "variant socialgfs_star needs an adaptation section "
                "(source_checkpoint + mapping)")
        source, _ = load_policy(adapt["source_checkpoint"])
        reps, shaping, manifests = _build_representations(cfg, art) \
            if cfg.doc.get("representation") else ({}, {}, None)
        mapping = {}
        for role, slots in adapt["mapping"].items():
            mapping[role] = {}
            for slot_idx, directive in slots.items():
                if directive in ("zero", "keep"):
                    mapping[role][int(slot_idx)] = directive
                else:
                    from socialgf.scorefield import load_field
                    path = art.field(directive)
                    if not path.exists():
                        raise ArtifactError(
                            f"adaptation maps slot {slot_idx} to field "
                            f"{path}; run `socialgf train-gf --category "
                            f"{directive}` first")
                    mapping[role][int(slot_idx)], _ = load_field(path)
        bundle = swap_representation(source, mapping, target_config=cfg.scenario)
        if ppo.total_steps > 0:
            bundle, curves = train(bundle, ppo, seed=cfg.seed)
        else:
            curves = []
    else:
        reps = shaping = None
        if cfg.variant in GF_VARIANTS:
            reps, shaping, manifests = _build_representations(cfg, art)
        bundle = build_bundle(cfg.variant, cfg.scenario, seed=cfg.seed,
                              reps=reps, shaping=shaping)
        bundle, curves = train(bundle, ppo, seed=cfg.seed)
    save_policy(target, bundle, manifest_paths=manifests,
                config_hash=cfg.config_hash)
    write_jsonl(art.report(f"train_curve_{cfg.variant}.jsonl"), curves)
    print(f"wrote {target} ({bundle.metadata['steps_trained']} steps trained)")
    return EXIT_OK


def cmd_evaluate(args):
    from socialgf.evaluation import (
        grass_rate, mean_role_rewards, nav_metrics, role_actors, run_episodes,
    )
    from socialgf.marl.train import load_policy
    from socialgf.world.scenario import NAV_SCENARIOS

    cfg, art = _load(args)
    bundle, meta = load_policy(args.policy)
    if meta.get("config_hash") not in (None, cfg.config_hash) and not args.force:
        raise ArtifactError(
            f"policy {args.policy} carries config hash {meta.get('config_hash')}"
            f", current config hashes to {cfg.config_hash}; --force to evaluate "
            f"anyway")
    opts = cfg.evaluation_options()
    actors = role_actors(bundle)
    report = {"config_hash": cfg.config_hash, "policy": str(args.policy),
              "variant": bundle.variant, "episodes": opts["episodes"],
              "seed": opts["seed"],
              "units": "mean per-agent original reward per episode"}
    if cfg.scenario.scenario in NAV_SCENARIOS:
        success, occupation = nav_metrics(cfg.scenario, actors,
                                          opts["episodes"], opts["seed"])
        report.update({"success_rate": success, "occupation_rate": occupation})
    else:
        stats = run_episodes(cfg.scenario, actors, opts["episodes"], opts["seed"])
        report["mean_rewards"] = mean_role_rewards(stats)
        report["grass_per_100_steps_per_sheep"] = grass_rate(
            cfg.scenario, actors, opts["episodes"], opts["seed"])
    out = art.report(f"evaluate_{bundle.variant}.json")
    write_json(out, report)
    print(f"wrote {out}")
    for k, v in report.items():
        if isinstance(v, float):
            print(f"  {k}: {v:.4f}")
    return EXIT_OK


def cmd_cross_match(args):
    from socialgf.evaluation import (
        RoleActor, ScriptedRoleActor, cross_match, matrix_records,
        matrix_table, normalize_rewards,
    )
    from socialgf.marl.train import load_policy
    from socialgf.world.scripted import make_behavior_policy

    cfg, art = _load(args)
    block = cfg.doc.get("cross_match")
    if not block:
        raise ConfigurationError("config needs a cross_match section")
    episodes = int(block.get("episodes", 1000))

    def side_actors(side, role):
        actors = {}
        for method, ref in block[side].items():
            if ref in ("scripted_greedy", "random"):
                actors[method] = ScriptedRoleActor(make_behavior_policy(ref))
            else:
                bundle, _ = load_policy(ref)
                actors[method] = RoleActor(bundle.policies[role],
                                           bundle.providers[role])
        return actors

    wolves = side_actors("wolves", "wolf")
    sheep = side_actors("sheep", "sheep")
    matrix = cross_match(wolves, sheep, cfg.scenario, episodes, cfg.seed)
    wolf_scores = {w: float(np.mean([r.wolf_reward for (wm, sm), r
                                     in matrix.items() if wm == w]))
                   for w in wolves}
    sheep_scores = {s: float(np.mean([r.sheep_reward for (wm, sm), r
                                      in matrix.items() if sm == s]))
                    for s in sheep}
    payload = {
        "config_hash": cfg.config_hash,
        "episodes": episodes,
        "units": "mean per-agent original reward per episode",
        "matrix": matrix_records(matrix),
        "normalized_wolf": normalize_rewards(wolf_scores),
        "normalized_sheep": normalize_rewards(sheep_scores),
    }
    write_json(art.report("cross_match.json"), payload)
    table = matrix_table(matrix)
    with open(art.report("cross_match.txt"), "w", encoding="utf-8") as f:
        f.write(table + "\n")
    print(table)
    return EXIT_OK


def cmd_render(args):
    from socialgf.evaluation import render_frames, role_actors
    from socialgf.marl.train import load_policy

    cfg, art = _load(args)
    bundle, _ = load_policy(args.policy)
    out = art.path("frames", f"episode_seed{cfg.seed}.jsonl")
    png_dir = art.path("frames", f"episode_seed{cfg.seed}_png") if args.png else None
    n = render_frames(cfg.scenario, role_actors(bundle), cfg.seed, out,
                      png_dir=png_dir)
    print(f"wrote {out} ({n} frames)")
    return EXIT_OK


def cmd_verify(_args):
    from socialgf.cli.verify import run_verify

    ok = run_verify()
    return EXIT_OK if ok else EXIT_VERIFY_FAIL


def main(argv=None):
    args = _parser().parse_args(argv)
    workers = os.environ.get("SOCIALGF_WORKERS")
    if workers:
        print(f"SOCIALGF_WORKERS={workers} accepted (results are "
              f"worker-count independent)", file=sys.stderr)
    handlers = {
        "collect": cmd_collect,
        "train-gf": cmd_train_gf,
        "train-marl": cmd_train_marl,
        "evaluate": cmd_evaluate,
        "cross-match": cmd_cross_match,
        "render": cmd_render,
        "verify": cmd_verify,
    }
    try:
        if args.command == "verify":
            return handlers[args.command](args)
        with RunLock(args.out if os.path.isdir(args.out) else
                     ArtifactDir(args.out).prepare().root):
            return handlers[args.command](args)
    except (UsageError, ConfigurationError, ArtifactError, CollectionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SocialGFError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY_FAIL


if __name__ == "__main__":
    sys.exit(main())
