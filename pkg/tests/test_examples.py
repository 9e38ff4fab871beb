import hashlib

import numpy as np
import pytest

from socialgf.errors import ArtifactError, CollectionError
from socialgf.examples import (
    CATEGORIES, ExampleSet, collect_examples, load_dataset, make_record,
    save_dataset,
)
from socialgf.world import ScenarioConfig, reset
from socialgf.world.scripted import RandomPolicy, ScriptedGreedyPolicy


@pytest.fixture(scope="module")
def grassland_cfg():
    return ScenarioConfig(scenario="grassland", n_wolves=2, n_sheep=2,
                          n_grass=3, obstacles=((3.0, 3.0, 1.0),))


@pytest.fixture(scope="module")
def small_sets(grassland_cfg):
    return collect_examples(grassland_cfg, ScriptedGreedyPolicy(),
                            n_target=60, seed=5)


def test_all_grassland_categories_collected(small_sets):
    assert set(small_sets) == {"grass_eaten", "sheep_chasing", "wolf_avoid",
                               "boundary_avoid"}
    for es in small_sets.values():
        assert es.n_records == 60


def test_records_have_constant_layout(small_sets):
    for es in small_sets.values():
        assert es.records.shape[1] == 2 * len(es.slot_kinds)


def test_grass_eaten_record_has_grass_at_origin(small_sets, grassland_cfg):
    # eating requires overlap, so some grass slot sits within the contact radius
    contact = grassland_cfg.agent_radius + grassland_cfg.grass_radius
    rel = small_sets["grass_eaten"].records.reshape(60, -1, 2)
    nearest = np.linalg.norm(rel, axis=2).min(axis=1)
    assert np.all(nearest < contact)


def test_wolf_avoid_record_has_wolf_at_origin(small_sets, grassland_cfg):
    contact = 2 * grassland_cfg.agent_radius
    rel = small_sets["wolf_avoid"].records.reshape(60, -1, 2)
    nearest = np.linalg.norm(rel, axis=2).min(axis=1)
    assert np.all(nearest < contact)


def test_navigation_success_predicate_holds_on_records():
    cfg = ScenarioConfig(scenario="vanilla_nav", n_agents=2)
    sets = collect_examples(cfg, ScriptedGreedyPolicy(), n_target=40, seed=8)
    contact = cfg.agent_radius + cfg.landmark_radius
    rel = sets["navigation"].records.reshape(40, -1, 2)
    kinds = np.array(sets["navigation"].slot_kinds)
    lm = rel[:, kinds == "landmark_same", :]
    # the beneficiary sits on one landmark in every success frame
    assert np.all(np.linalg.norm(lm, axis=2).min(axis=1) < contact)


def test_records_within_world_span(small_sets, grassland_cfg):
    span = 2 * grassland_cfg.half_width
    for es in small_sets.values():
        assert np.all(np.abs(es.records) <= span)


def test_collection_is_deterministic(grassland_cfg):
    a = collect_examples(grassland_cfg, ScriptedGreedyPolicy(), n_target=30, seed=9)
    b = collect_examples(grassland_cfg, ScriptedGreedyPolicy(), n_target=30, seed=9)
    for k in a:
        assert np.array_equal(a[k].records, b[k].records)


def test_starvation_names_the_category():
    cfg = ScenarioConfig(scenario="vanilla_nav", n_agents=5)
    with pytest.raises(CollectionError, match="navigation"):
        collect_examples(cfg, RandomPolicy(), n_target=50, seed=1,
                         max_episodes=25)


def test_roundtrip_bit_exact(small_sets, tmp_path):
    p = tmp_path / "d.sgfd"
    save_dataset(small_sets, p)
    loaded = load_dataset(p)
    for k, es in small_sets.items():
        assert np.array_equal(loaded[k].records, es.records)
        assert loaded[k].slot_kinds == es.slot_kinds
        assert loaded[k].category == es.category
        assert loaded[k].provenance == es.provenance


def test_roundtrip_checksum_stable(small_sets, tmp_path):
    save_dataset(small_sets, tmp_path / "one")
    save_dataset(small_sets, tmp_path / "two")
    digest = lambda p: hashlib.sha256(p.read_bytes()).hexdigest()
    assert digest(tmp_path / "one") == digest(tmp_path / "two")


def test_empty_category_save_rejected(small_sets, tmp_path):
    es = small_sets["grass_eaten"]
    empty = ExampleSet(es.category, es.slot_kinds,
                       np.zeros((0, es.records.shape[1])), {})
    with pytest.raises(ArtifactError, match="empty"):
        save_dataset({"grass_eaten": empty}, tmp_path / "bad")


def test_record_extraction_is_agent_centric(grassland_cfg):
    state = reset(grassland_cfg, seed=3)
    sheep = int(state.indices_of(0)[0])
    row, tags = make_record(state, sheep, CATEGORIES["grass_eaten"])
    rel = row.reshape(-1, 2)
    grass_abs = state.pos[state.indices_of(4)]
    np.testing.assert_allclose(rel, grass_abs - state.pos[sheep])
    assert tags == ("grass",) * grassland_cfg.n_grass
