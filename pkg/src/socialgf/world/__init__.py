from socialgf.world.engine import (
    GRASS_EATEN,
    LANDMARK_OCCUPIED,
    SHEEP_EATEN,
    SUCCESS,
    Event,
    WorldState,
    apply_events,
    colliding_with_static,
    detect_events,
    integrate,
    reset,
    step,
)
from socialgf.world.observe import baseline_width, observe_baseline
from socialgf.world.rewards import reward_engineering, reward_original
from socialgf.world.scenario import (
    GRASS,
    GRASSLAND,
    GREEN,
    LANDMARK,
    NAV_AGENT,
    NAV_COLOR,
    NAV_SCENARIOS,
    NAV_TEAM,
    NAV_VANILLA,
    NO_COLOR,
    OBSTACLE,
    RED,
    SHEEP,
    WOLF,
    ScenarioConfig,
    scenario_from_dict,
)
