"""Geometric noise schedule sigma(t) = sigma0**t with weight lambda(t) = sigma(t)^2."""

from dataclasses import dataclass

import numpy as np

from socialgf.errors import ConfigurationError


@dataclass(frozen=True)
class NoiseSchedule:
    sigma0: float = 25.0
    t_min: float = 0.01
    t_max: float = 1.0

    def __post_init__(self):
        if self.sigma0 <= 1.0:
            raise ConfigurationError("sigma0 must exceed 1 so sigma(t) grows with t")
        if not (0.0 < self.t_min < self.t_max):
            raise ConfigurationError("need 0 < t_min < t_max")

    def sigma(self, t):
        return self.sigma0 ** np.asarray(t, dtype=np.float64)

    def weight(self, t):
        return self.sigma(t) ** 2

    def t_of_sigma(self, sigma):
        return float(np.log(sigma) / np.log(self.sigma0))

    def sample_t(self, rng, size=None):
        return rng.uniform(self.t_min, self.t_max, size=size)

    def to_dict(self):
        return {"sigma0": self.sigma0, "t_min": self.t_min, "t_max": self.t_max}
