import math

import pytest

import softgait


def test_terrain_heights():
    spiky = softgait.Terrain("spiky")
    assert spiky.height_at(0.5) == 0.5
    assert spiky.period == 1.0
    assert softgait.Terrain("valley").height_at(10.0) == pytest.approx(2.0)
    with pytest.raises(softgait.ConfigError):
        softgait.Terrain("lava")


def test_decode():
    p = softgait.decode([0.5, 0.0, 0.0, 0.25, 1.0])
    assert p.amplitude == pytest.approx(0.125)
    assert p.frequency == pytest.approx(0.25)
    assert p.column_phase[1] == pytest.approx(math.pi / 2)
    with pytest.raises(softgait.ValidationError):
        softgait.decode([2.0, 0, 0, 0, 0])


def test_evaluate_is_deterministic():
    genes = [0.7, 0.4, 0.1, 0.5, 0.9]
    a = softgait.evaluate(genes, "flat", duration=2.0)
    b = softgait.evaluate(genes, "flat", duration=2.0)
    assert not a.failed
    assert a.fitness == b.fitness
    assert a.sample_count == 40
    still = softgait.evaluate([0.0, 0.5, 0.0, 0.0, 0.0], "flat", duration=2.0)
    assert still.squish < 1e-6 and still.wobble < 1e-6


def test_cma_sphere():
    es = softgait.CmaEs(seed=3)
    while es.evaluations < 3000:
        batch = es.ask()
        es.tell(batch, [-sum((g - 0.4) ** 2 for g in x) for x in batch])
    assert es.best_fitness > -1e-10
    with pytest.raises(softgait.ProtocolError):
        es.tell([], [])


def test_qda_fills_archive():
    q = softgait.Qda(seed=1, init_budget=20)
    batch = q.ask()
    results = [softgait.evaluate(g, "flat", duration=1.0) for g in batch]
    q.tell(batch, results)
    assert 1 <= q.archive.occupancy <= 20
    row, col, genes, result = q.archive.elites()[0]
    assert 0 <= row < 10 and 0 <= col < 10
    assert len(genes) == 5


def test_trial_seed():
    assert softgait.trial_seed(1, "flat", "cma", 0) == softgait.trial_seed(1, "flat", "cma", 0)
    assert softgait.trial_seed(1, "flat", "cma", 0) != softgait.trial_seed(1, "flat", "qda", 0)
