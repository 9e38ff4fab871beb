"""The built-in oracle suite: fast independent checks of the numerics,
score-field, event, and advantage machinery. Each check prints one line
with its measured error and tolerance; any failure flips the exit code."""

import time

import numpy as np

from socialgf.examples import ExampleCategory, ExampleSet
from socialgf.numerics import (
    MLPSpec, backprop, finite_diff_gradient, init_mlp, mlp_forward,
)
from socialgf.oracles import brute_force_events, gae_reference
from socialgf.scorefield import (
    GFTrainConfig, NoiseSchedule, analytic_gaussian_score, field_score,
    train_gf,
)
from socialgf import backend
from socialgf.world import ScenarioConfig, reset
from socialgf.world.engine import detect_events


def _check_fd(n_nets=100, seed=0):
    """backprop vs central finite differences over random small nets."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_nets):
        widths = (int(rng.integers(1, 5)), int(rng.integers(2, 8)),
                  int(rng.integers(1, 4)))
        act = ["relu", "tanh"][int(rng.integers(2))]
        store = init_mlp(MLPSpec(widths, act), rng)
        x = rng.standard_normal(widths[0])
        c = rng.standard_normal(widths[-1])
        _, tape = mlp_forward(store, x)
        grads, gx = backprop(store, tape, c)

        def loss(xv):
            y, _ = mlp_forward(store, xv)
            return float(y @ c)

        fd = finite_diff_gradient(loss, x, 1e-5)
        scale = max(np.max(np.abs(fd)), 1e-8)
        worst = max(worst, float(np.max(np.abs(gx - fd)) / scale))
    return worst


def _check_point_mass(seed=0):
    cat = ExampleCategory("oracle_point", "attractive", "any", ("grass",))
    x0 = np.array([1.5, -2.0])
    es = ExampleSet(cat, ("grass",), np.tile(x0, (8, 1)), {})
    cfg = GFTrainConfig(steps=2500, batch_size=64)
    field, _ = train_gf(es, cfg, seed=seed)
    sched = cfg.schedule
    t = 0.2
    sigma = float(sched.sigma(t))
    rng = np.random.default_rng(seed + 1)
    probes = x0 + sigma * rng.standard_normal((64, 2))
    pred = field_score(field, probes[:, None, :], ("grass",), t=t).reshape(-1, 2)
    ref = (x0 - probes) / sigma ** 2
    return float(np.linalg.norm(pred - ref) / np.linalg.norm(ref))


def _check_gaussian(seed=0):
    cat = ExampleCategory("oracle_gauss", "attractive", "any", ("grass",))
    rng = np.random.default_rng(seed)
    mean = np.array([2.0, -1.0])
    s = 2.0
    es = ExampleSet(cat, ("grass",), mean + s * rng.standard_normal((10000, 2)), {})
    cfg = GFTrainConfig(steps=6000, batch_size=256)
    field, _ = train_gf(es, cfg, seed=seed)
    axis = np.linspace(-2 * s, 2 * s, 9)
    xs, ys = np.meshgrid(axis + mean[0], axis + mean[1])
    pts = np.stack([xs.ravel(), ys.ravel()], axis=1)
    t = field.t_eval
    pred = field_score(field, pts[:, None, :], ("grass",), t=t).reshape(-1, 2)
    ref = analytic_gaussian_score(mean, s ** 2, cfg.schedule, t, pts)
    return float(np.linalg.norm(pred - ref) / np.linalg.norm(ref))


def _check_events(seed=0, states_per_scenario=100):
    configs = [
        ScenarioConfig(scenario="grassland", n_wolves=2, n_sheep=4, n_grass=4,
                       obstacles=((2.0, 2.0, 1.0),)),
        ScenarioConfig(scenario="vanilla_nav", n_agents=3),
        ScenarioConfig(scenario="color_nav", team_size=2),
        ScenarioConfig(scenario="team_nav", team_size=2, n_landmarks=3),
    ]
    rng = np.random.default_rng(seed)
    mismatches = 0
    for config in configs:
        for k in range(states_per_scenario):
            state = reset(config, int(rng.integers(2 ** 31)))
            # crowd entities together so overlaps actually happen
            state.pos[:] = rng.uniform(-config.half_width / 3,
                                       config.half_width / 3,
                                       size=state.pos.shape)
            fast = {(e.kind, e.participants) for e in detect_events(state)}
            slow = {(e.kind, e.participants) for e in brute_force_events(state)}
            mismatches += fast != slow
    return mismatches


def _check_gae(seed=0, trials=20):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        T, B = 100, 4
        rewards = np.ascontiguousarray(rng.standard_normal((T, B)))
        values = np.ascontiguousarray(rng.standard_normal((T, B)))
        dones = np.ascontiguousarray(
            (rng.random((T, B)) < 0.05).astype(np.float64))
        last = rng.standard_normal(B)
        gamma, lam = 0.99, 0.95
        fast = backend.gae_scan(rewards, values, dones, last, gamma, lam)
        slow = gae_reference(rewards, values, dones, last, gamma, lam)
        worst = max(worst, float(np.max(np.abs(fast - slow))))
    return worst


CHECKS = (
    ("gradient_fd", _check_fd, 1e-6, "max relative error, backprop vs FD"),
    ("dsm_point_mass", _check_point_mass, 0.10,
     "relative L2, trained vs (x0-x~)/sigma^2"),
    ("dsm_gaussian", _check_gaussian, 0.15,
     "relative L2, trained vs analytic Gaussian score"),
    ("event_oracle", _check_events, 0, "state mismatches vs brute force"),
    ("gae_oracle", _check_gae, 1e-10, "max abs error vs discounted sums"),
)


def run_verify(out=print):
    """Run every oracle; returns True iff all pass."""
    all_ok = True
    for name, fn, tolerance, desc in CHECKS:
        t0 = time.perf_counter()
        measured = fn()
        ok = measured <= tolerance
        all_ok &= ok
        out(f"{'PASS' if ok else 'FAIL'}  {name:<16} measured={measured:.3g} "
            f"tolerance={tolerance:.3g} ({desc}) [{time.perf_counter()-t0:.1f}s]")
    return all_ok
