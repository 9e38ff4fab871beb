"""Cross-match tournaments and reward normalization for the report tables."""

from dataclasses import dataclass

import numpy as np

from socialgf.errors import UsageError
from socialgf.evaluation.metrics import mean_role_rewards, run_episodes


@dataclass
class MatchReport:
    wolf_method: str
    sheep_method: str
    wolf_reward: float
    sheep_reward: float
    episodes: int


def cross_match(wolf_actors_by_method, sheep_actors_by_method, config, episodes,
                seed):
    """Full wolf x sheep matrix of mean per-episode original rewards.

    Actor dicts map method name -> RoleActor (or ScriptedRoleActor). Returns
    {(wolf_method, sheep_method): MatchReport} with a fixed evaluation seed
    per cell, so reruns reproduce the matrix exactly.
    """
    if len(wolf_actors_by_method) < 2 or len(sheep_actors_by_method) < 2:
        raise UsageError("cross_match wants at least two methods per side")
    if config.scenario != "grassland":
        raise UsageError("cross_match runs on the grassland scenario")
    matrix = {}
    for wi, (wname, wolf) in enumerate(sorted(wolf_actors_by_method.items())):
        for si, (sname, sheep) in enumerate(sorted(sheep_actors_by_method.items())):
            cell_seed = int(np.random.SeedSequence((seed, wi, si)).generate_state(1)[0])
            stats = run_episodes(config, {"wolf": wolf, "sheep": sheep},
                                 episodes, cell_seed)
            rewards = mean_role_rewards(stats)
            matrix[(wname, sname)] = MatchReport(
                wname, sname, rewards["wolf"], rewards["sheep"], episodes)
    return matrix


def normalize_rewards(raw_by_method):
    """Affine map of raw scores onto [0.1, 1.0]: worst -> 0.1, best -> 1.0.
    All-equal input maps to 1.0 for every method by convention."""
    if not raw_by_method:
        return {}
    values = np.array(list(raw_by_method.values()), dtype=np.float64)
    lo, hi = float(values.min()), float(values.max())
    if hi - lo < 1e-12:
        return {k: 1.0 for k in raw_by_method}
    return {k: 0.1 + 0.9 * (float(v) - lo) / (hi - lo)
            for k, v in raw_by_method.items()}


def matrix_table(matrix):
    """Plain-text table in the cross-validation layout: rows are sheep
    methods, columns wolf methods, each cell 'wolf_reward / sheep_reward'."""
    wolf_methods = sorted({w for w, _ in matrix})
    sheep_methods = sorted({s for _, s in matrix})
    width = max(18, max(len(m) for m in wolf_methods + sheep_methods) + 2)
    lines = []
    header = "sheep \\ wolf".ljust(width) + "".join(m.ljust(width)
                                                    for m in wolf_methods)
    lines.append(header)
    for s in sheep_methods:
        row = [s.ljust(width)]
        for w in wolf_methods:
            cell = matrix[(w, s)]
            row.append(f"{cell.wolf_reward:+.3f} / {cell.sheep_reward:+.3f}".ljust(width))
        lines.append("".join(row))
    return "\n".join(lines)


def matrix_records(matrix):
    """Machine-readable rows for the report file."""
    return [
        {"wolf_method": r.wolf_method, "sheep_method": r.sheep_method,
         "wolf_reward": r.wolf_reward, "sheep_reward": r.sheep_reward,
         "episodes": r.episodes}
        for r in matrix.values()
    ]
