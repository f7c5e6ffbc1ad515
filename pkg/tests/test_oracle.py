import math

import numpy as np
import pytest

from paraboloid_billiard import (
    MaxStepsExceeded,
    MirrorConfig,
    OracleConfig,
    ParticleState,
    fly,
    impact_time,
    oracle_simulate,
    oracle_step,
    random_interior_states,
    simulate,
)


def test_axial_drop(mirror):
    hit = oracle_step(ParticleState([0, 0, 0], [0, 0, 0]), mirror)
    np.testing.assert_allclose(hit.point, [0, 0, -1], atol=1e-11)
    assert abs(hit.time - math.sqrt(2)) < 1e-12


def test_matches_closed_form_impact_time(mirror):
    s = ParticleState([2, 0, 0], [-1, 0, 1])
    assert abs(oracle_step(s, mirror).time - impact_time(s, mirror)) < 1e-9


def test_random_flights(rng, mirror):
    for s in random_interior_states(rng, 100, mirror):
        hit = oracle_step(s, mirror)
        p = fly(s, impact_time(s, mirror), mirror).pos
        assert np.linalg.norm(p - hit.point) < 1e-6


def test_converges_with_bisection_tolerance(mirror):
    s = ParticleState([0.4, -0.3, 0.2], [0.5, 0.2, -0.1])
    exact = impact_time(s, mirror)
    for tol in (1e-6, 1e-8, 1e-10):
        hit = oracle_step(s, mirror, OracleConfig(bisection_tol=tol))
        assert abs(hit.time - exact) <= tol


def test_energy_exact_over_one_flight(mirror):
    s = ParticleState([0.4, -0.3, 0.2], [0.5, 0.2, 1.1])
    hit = oracle_step(s, mirror)
    H0 = s.vel @ s.vel / 2 + s.pos[2]
    H1 = hit.velocity @ hit.velocity / 2 + hit.point[2]
    assert abs(H1 - H0) / abs(H0) < 1e-12


def test_multi_bounce_agrees(rng, mirror):
    s0 = random_interior_states(rng, 1, mirror)[0]
    hits = oracle_simulate(s0, 5, mirror)
    traj = simulate(s0, 5, mirror)
    for hit, p in zip(hits, traj.end_pos):
        assert np.linalg.norm(hit.point - p) < 1e-6


def test_step_budget(mirror):
    with pytest.raises(MaxStepsExceeded):
        oracle_step(ParticleState([0, 0, 0], [0, 0, 0]), mirror, OracleConfig(max_steps=10))


@pytest.mark.parametrize("cfg", [OracleConfig(dt=0.0), OracleConfig(dt=1e-3, bisection_tol=1e-2)])
def test_config_validation(mirror, cfg):
    with pytest.raises(ValueError):
        cfg.resolved(mirror)


def test_defaults_scale_with_mirror():
    cfg = OracleConfig().resolved(MirrorConfig(4.0, 1.0))
    assert cfg.dt == pytest.approx(2e-3)
    assert cfg.bisection_tol == pytest.approx(2e-12)
