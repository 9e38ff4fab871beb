from socialgf.marl.buffer import RolloutBuffer, allocate_buffer, compute_gae, normalize_advantages
from socialgf.marl.policy import (
    RolePolicy,
    ValueNorm,
    gaussian_logp,
    init_role_policy,
    policy_entropy,
    sample_action,
)
from socialgf.marl.ppo import PPOConfig, clip_grad_norm, make_optimizers, ppo_update
from socialgf.marl.rollout import (
    GF_VARIANTS,
    ORIGINAL_REWARD,
    REWARD_ENGINEERING,
    SOCIALGFS,
    SOCIALGFS_PLUS,
    SOCIALGFS_STAR,
    VARIANTS,
    BaselineObsProvider,
    EnvPool,
    GFObsProvider,
    collect_rollouts,
    make_reward_fn,
    role_members,
    role_rows,
)
from socialgf.marl.train import (
    PolicyBundle,
    build_bundle,
    load_policy,
    save_policy,
    swap_representation,
    train,
)
