from socialgf.evaluation.metrics import (
    EpisodeStats,
    RoleActor,
    ScriptedRoleActor,
    grass_rate,
    mean_role_rewards,
    nav_metrics,
    role_actors,
    run_episode,
    run_episodes,
)
from socialgf.evaluation.tournament import (
    MatchReport,
    cross_match,
    matrix_records,
    matrix_table,
    normalize_rewards,
)
from socialgf.evaluation.visualize import (
    entity_color,
    field_quiver,
    quiver_to_tsv,
    render_frames,
)
