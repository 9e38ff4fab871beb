from socialgf.numerics.adam import AdamState, adam_init, adam_step, adam_step_store
from socialgf.numerics.fd import finite_diff_gradient
from socialgf.numerics.net import (
    HIDDEN_GAINS,
    MLPSpec,
    ParamStore,
    Tape,
    backprop,
    init_mlp,
    mean_pool_backward,
    mean_pool_forward,
    mlp_forward,
    orthogonal_init,
)
from socialgf.numerics.tensor import check_finite, dense

__all__ = [
    "AdamState", "adam_init", "adam_step", "adam_step_store",
    "finite_diff_gradient",
    "HIDDEN_GAINS", "MLPSpec", "ParamStore", "Tape", "backprop", "init_mlp",
    "mean_pool_backward", "mean_pool_forward", "mlp_forward", "orthogonal_init",
    "check_finite", "dense",
]
