import numpy as np
import pytest

from urllc_alloc import (
    SimConfig,
    TopologyRun,
    draw_interference,
    draw_pru_mask,
    fairness_by_distance,
    generate_topology,
    run_simulation,
)
from urllc_alloc.simulator import _cached_table


def quick_cfg(**kw):
    base = dict(N=30, C=3, n_cycles=10, n_topologies=2, rng_seed=11)
    base.update(kw)
    return SimConfig(**base)


def make_run(cfg, seed=0, **kw):
    rng = np.random.default_rng(seed)
    devices = generate_topology(cfg, rng)
    interference = draw_interference(cfg, rng)
    mask = draw_pru_mask(cfg, rng)
    table = _cached_table(cfg.gamma, cfg.rho, cfg.f_table_bins, cfg.f_table_z_max,
                          cfg.f_table_max_age)
    return TopologyRun(cfg, devices, interference, mask, rng, table, **kw)


# ----------------------------------------------------------------- topology


def test_topology_single_device():
    cfg = quick_cfg(N=1)
    devices = generate_topology(cfg, np.random.default_rng(0))
    assert len(devices) == 1
    assert 0 < devices[0].distance <= cfg.L
    assert 1 <= devices[0].issue_time <= cfg.T


def test_topology_disk_moment():
    cfg = quick_cfg(N=100_000)
    devices = generate_topology(cfg, np.random.default_rng(1))
    d2 = np.array([d.distance**2 for d in devices])
    assert abs(d2.mean() - cfg.L**2 / 2) < 0.01 * cfg.L**2 / 2


def test_topology_deterministic_given_seed():
    cfg = quick_cfg()
    a = generate_topology(cfg, np.random.default_rng(5))
    b = generate_topology(cfg, np.random.default_rng(5))
    assert a == b


def test_interference():
    cfg = quick_cfg(Y_M=0.0)
    lam = draw_interference(cfg, np.random.default_rng(0)).lambdas
    assert np.all(lam == 1.0)
    cfg = quick_cfg(Y_M=4.0, C=2000)
    lam = draw_interference(cfg, np.random.default_rng(0)).lambdas
    assert np.all(lam >= 1.0)
    assert abs(lam.mean() - 3.0) < 0.05


def test_pru_mask_density():
    cfg = quick_cfg(eta=0.4)
    mask = draw_pru_mask(cfg, np.random.default_rng(2))
    assert mask.shape == (cfg.C, cfg.T)
    assert np.all(mask.sum(axis=1) == int(0.4 * cfg.T))


# ------------------------------------------------------------------ config


def test_config_validation():
    for bad in [
        dict(eta=1.2),
        dict(eta=-0.1),
        dict(W=0),
        dict(delta=60),
        dict(delta=0),
        dict(n_cycles=3, W=2),
        dict(pilot_policy="mdp"),
        dict(allocator="ilp"),
        dict(gamma=1.0),
        dict(rho=1.0),
        dict(N=10, eta=0.9, T=50),  # 45 pilot devices > N
    ]:
        with pytest.raises(ValueError):
            quick_cfg(**bad).validate()
    quick_cfg().validate()
    quick_cfg(eta=1.0, N=60).validate()  # degenerate all-pilot config is allowed


# ----------------------------------------------------------- cycle pipeline


def test_pipeline_ages_match_rotation_pattern():
    # 6 devices, 2 pilots per cycle, W=2: the allocation live at cycle 6 was
    # planned at the end of cycle 4 from measurements at cycles 4, 3, 2,
    # giving ages 2, 3, 4 by rotation group.
    cfg = SimConfig(N=6, C=2, T=8, delta=8, eta=0.25, W=2, n_cycles=8,
                    n_topologies=1, rng_seed=1)
    run = make_run(cfg)
    for cycle in range(1, 7):
        run.run_cycle(cycle)
    ages = run.age_trace[6]
    assert ages == {0: 2, 1: 2, 2: 4, 3: 4, 4: 3, 5: 3}


def test_pipeline_depth_one_uses_age_one():
    # every device pilots every cycle (m = N), so the W=1 pipeline always
    # plans with measurements exactly one cycle old
    cfg = SimConfig(N=4, C=2, T=8, delta=8, eta=0.5, W=1, n_cycles=6,
                    n_topologies=1, rng_seed=2)
    run = make_run(cfg)
    for cycle in range(1, 5):
        run.run_cycle(cycle)
    assert run.age_trace
    for ages in run.age_trace.values():
        assert ages and all(age == 1 for age in ages.values())


def test_conservation_every_cycle():
    cfg = quick_cfg(N=25, C=2, eta=0.2, n_cycles=8)
    run = make_run(cfg, seed=3)
    for cycle in range(1, cfg.n_cycles + 1):
        out = run.run_cycle(cycle)  # internal assert checks served+excluded == N
        assert len(out.served) <= cfg.N


def test_capacity_slack_serves_everyone():
    cfg = SimConfig(N=10, C=5, T=50, delta=50, eta=0.2, W=1, gamma=0.99,
                    n_cycles=10, n_topologies=2, rng_seed=4)
    metrics = run_simulation(cfg, validate=True)
    assert metrics.fraction_served_mean == 1.0
    assert metrics.validation_violations == 0


def test_all_pilot_slots_serve_nothing():
    cfg = SimConfig(N=60, C=2, eta=1.0, W=2, n_cycles=6, n_topologies=1, rng_seed=5)
    metrics = run_simulation(cfg)
    assert metrics.fraction_served_mean == 0.0


def test_no_pilots_is_positive_but_weaker_than_csi():
    base = dict(N=60, C=4, n_cycles=14, n_topologies=2, rng_seed=6)
    none = run_simulation(SimConfig(eta=0.0, **base))
    some = run_simulation(SimConfig(eta=0.4, **base))
    assert 0.0 < none.fraction_served_mean < some.fraction_served_mean


def test_run_is_deterministic():
    cfg = quick_cfg(pilot_policy="dynamic", allocator="gba")
    a = run_simulation(cfg, validate=True)
    b = run_simulation(cfg, validate=True)
    assert a == b  # timing field excluded from comparison
    c = run_simulation(quick_cfg(pilot_policy="dynamic", rng_seed=12))
    assert c != a


def test_bca_runs_and_validates():
    cfg = quick_cfg(allocator="bca", n_cycles=8)
    metrics = run_simulation(cfg, validate=True)
    assert metrics.validation_violations == 0
    assert 0.0 <= metrics.fraction_served_mean <= 1.0


def test_decode_failures_are_rare():
    cfg = quick_cfg(N=50, C=4, n_cycles=16, n_topologies=3, rng_seed=8)
    metrics = run_simulation(cfg)
    assert metrics.served_transmissions > 0
    # rho = 0.99999: a failure in this sample size would signal a wiring bug
    assert metrics.decode_failures / metrics.served_transmissions < 1e-3


def test_redraw_interference_stays_valid():
    cfg = quick_cfg(redraw_interference=True, n_cycles=8)
    metrics = run_simulation(cfg, validate=True)
    assert metrics.validation_violations == 0


# ---------------------------------------------------------------- fairness


def test_fairness_all_served_gives_unit_bins():
    cfg = SimConfig(N=12, C=5, T=50, delta=50, eta=0.2, W=1, gamma=0.99,
                    n_cycles=10, n_topologies=1, rng_seed=9)
    metrics = run_simulation(cfg, fairness_bins=4)
    observed = [f for f in metrics.fairness_fractions if f is not None]
    assert observed and all(f == 1.0 for f in observed)


def test_fairness_single_bin_equals_overall_mean():
    cfg = quick_cfg(N=40, n_cycles=12, n_topologies=2)
    metrics = run_simulation(cfg, fairness_bins=1)
    assert metrics.fairness_fractions[0] == pytest.approx(
        metrics.fraction_served_mean, abs=1e-12
    )


def test_fairness_by_distance_unit():
    distances = np.array([5.0, 15.0, 25.0, 55.0])
    served = np.array([10, 5, 0, 2])
    chances = np.array([10, 10, 10, 10])
    centers, fractions = fairness_by_distance(distances, served, chances, 3, 60.0)
    assert centers == [10.0, 30.0, 50.0]
    assert fractions[0] == pytest.approx(0.75)  # 5m and 15m pooled
    assert fractions[1] == pytest.approx(0.0)
    assert fractions[2] == pytest.approx(0.2)
    with pytest.raises(ValueError):
        fairness_by_distance(distances, served, chances, 0, 60.0)
