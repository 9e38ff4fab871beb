"""Scenario definitions for the four particle games.

Entity ordering within a state is canonical and load-bearing for
observation layouts:

  grassland:   wolves, sheep, grass, obstacles
  vanilla_nav: agents, landmarks
  color_nav:   red agents, green agents, red landmarks, green landmarks
  team_nav:    red agents, green agents, landmarks
"""

from dataclasses import dataclass, field

from socialgf.errors import ConfigurationError

GRASSLAND = "grassland"
NAV_VANILLA = "vanilla_nav"
NAV_COLOR = "color_nav"
NAV_TEAM = "team_nav"
SCENARIOS = (GRASSLAND, NAV_VANILLA, NAV_COLOR, NAV_TEAM)
NAV_SCENARIOS = (NAV_VANILLA, NAV_COLOR, NAV_TEAM)

# entity kinds
SHEEP = 0
WOLF = 1
NAV_AGENT = 2
LANDMARK = 3
GRASS = 4
OBSTACLE = 5
KIND_NAMES = {SHEEP: "sheep", WOLF: "wolf", NAV_AGENT: "nav_agent",
              LANDMARK: "landmark", GRASS: "grass", OBSTACLE: "obstacle"}

# team colors (nav variants only)
NO_COLOR = -1
RED = 0
GREEN = 1

GRASSLAND_SCALES = (2, 4, 8)
TEAM_NAV_SIZES = ((2, 3), (3, 5), (4, 6), (5, 7))


@dataclass(frozen=True)
class ScenarioConfig:
    """Game geometry and physics. The default world is 20 m across with
    1 m agents: noise-schedule floors near sigma = 1 then sit at a tenth of
    the world scale, fine enough to resolve landmark/contact structure."""

    scenario: str
    n_wolves: int = 0
    n_sheep: int = 0
    n_agents: int = 0       # vanilla nav
    team_size: int = 0      # per-team count for color/team nav
    n_landmarks: int = 0    # team nav; derived for the other nav games
    n_grass: int = 4
    obstacles: tuple = ()   # ((x, y, radius), ...)
    half_width: float = 10.0
    dt: float = 0.1
    damping: float = 0.25
    accel: float = 50.0
    max_speed_wolf: float = 10.0
    sheep_speed_factor: float = 1.3
    max_speed_nav: float = 13.0
    contact_stiffness: float = 1000.0
    agent_radius: float = 1.0
    landmark_radius: float = 1.0
    grass_radius: float = 0.8
    episode_length: int = 100

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigurationError(
                f"unknown scenario {self.scenario!r}; expected one of {SCENARIOS}")
        if self.scenario == GRASSLAND:
            if self.n_wolves not in GRASSLAND_SCALES or self.n_sheep not in GRASSLAND_SCALES:
                raise ConfigurationError(
                    f"grassland scale must come from {GRASSLAND_SCALES} x "
                    f"{GRASSLAND_SCALES}, got {self.n_wolves}-{self.n_sheep}")
            if self.n_grass < 1:
                raise ConfigurationError("grassland needs at least one grass pellet")
        elif self.scenario == NAV_VANILLA:
            if self.n_agents < 2:
                raise ConfigurationError("vanilla_nav needs at least 2 agents")
            object.__setattr__(self, "n_landmarks", self.n_agents)
        elif self.scenario == NAV_COLOR:
            if self.team_size < 1:
                raise ConfigurationError("color_nav needs team_size >= 1")
            object.__setattr__(self, "n_landmarks", 2 * self.team_size)
        elif self.scenario == NAV_TEAM:
            if (self.team_size, self.n_landmarks) not in TEAM_NAV_SIZES:
                raise ConfigurationError(
                    f"team_nav (team_size, n_landmarks) must come from "
                    f"{TEAM_NAV_SIZES}, got ({self.team_size}, {self.n_landmarks})")
        if self.scenario != GRASSLAND:
            object.__setattr__(self, "n_grass", 0)
        if self.half_width <= 0 or self.dt <= 0 or not (0 <= self.damping < 1):
            raise ConfigurationError("need half_width > 0, dt > 0, 0 <= damping < 1")
        if self.episode_length < 1:
            raise ConfigurationError("episode_length must be >= 1")
        object.__setattr__(
            self, "obstacles",
            tuple((float(x), float(y), float(r)) for x, y, r in self.obstacles))
        for x, y, r in self.obstacles:
            if r <= 0:
                raise ConfigurationError("obstacle radius must be positive")
            if abs(x) + r >= self.half_width or abs(y) + r >= self.half_width:
                raise ConfigurationError(
                    f"obstacle at ({x}, {y}) r={r} does not fit inside the world")

    @property
    def max_speed_sheep(self):
        return self.max_speed_wolf * self.sheep_speed_factor

    @property
    def n_movable(self):
        if self.scenario == GRASSLAND:
            return self.n_wolves + self.n_sheep
        if self.scenario == NAV_VANILLA:
            return self.n_agents
        return 2 * self.team_size

    def roles(self):
        """Policy roles present in this scenario, in canonical order."""
        if self.scenario == GRASSLAND:
            return ("wolf", "sheep")
        if self.scenario == NAV_VANILLA:
            return ("agent",)
        return ("red", "green")

    def to_dict(self):
        return {
            "scenario": self.scenario, "n_wolves": self.n_wolves,
            "n_sheep": self.n_sheep, "n_agents": self.n_agents,
            "team_size": self.team_size, "n_landmarks": self.n_landmarks,
            "n_grass": self.n_grass, "obstacles": [list(o) for o in self.obstacles],
            "half_width": self.half_width, "dt": self.dt, "damping": self.damping,
            "accel": self.accel, "max_speed_wolf": self.max_speed_wolf,
            "sheep_speed_factor": self.sheep_speed_factor,
            "max_speed_nav": self.max_speed_nav,
            "contact_stiffness": self.contact_stiffness,
            "agent_radius": self.agent_radius,
            "landmark_radius": self.landmark_radius,
            "grass_radius": self.grass_radius,
            "episode_length": self.episode_length,
        }


def scenario_from_dict(d):
    d = dict(d)
    d["obstacles"] = tuple(tuple(o) for o in d.get("obstacles", ()))
    return ScenarioConfig(**d)
