from socialgf.scorefield.field import (
    GradientField,
    analytic_gaussian_score,
    eval_field,
    field_score,
    langevin_descend,
    load_field,
    save_field,
)
from socialgf.scorefield.network import (
    ScoreNetwork,
    init_score_network,
    kind_onehots,
    network_params,
    score_backward,
    score_forward,
    time_features,
)
from socialgf.scorefield.schedule import NoiseSchedule
from socialgf.scorefield.train import GFTrainConfig, dsm_loss, perturb, train_gf
