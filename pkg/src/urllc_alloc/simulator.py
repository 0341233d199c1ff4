# The cycle loop: fading evolves, the allocation computed W cycles ago goes
# live and its transmissions are decoded against the true channel, pilots
# measure, the pilot policy picks next cycle's senders, and a fresh allocation
# is scheduled W cycles ahead from the records available now.

from __future__ import annotations

import time
from dataclasses import dataclass, field, fields
from functools import lru_cache

import numpy as np

from .allocators import CycleSchedule, Device, bca_allocate, gba_allocate, validate_schedule
from .channel_model import (
    FTable,
    build_f_table,
    conditional_mean,
    draw_fading,
    evolve_fading,
    gm_params,
)
from .link_budget import (
    ChannelInterference,
    LinkParams,
    count_from_gain,
    decode_success,
    path_gain,
)
from .pilot_scheduler import CsiRecord, make_policy

__all__ = [
    "SimConfig",
    "Metrics",
    "RequirementModel",
    "TopologyRun",
    "generate_topology",
    "draw_interference",
    "draw_pru_mask",
    "run_simulation",
    "fairness_by_distance",
]

PILOT_POLICIES = ("round-robin", "distance-threshold", "dynamic")
ALLOCATORS = ("gba", "bca")


@dataclass(frozen=True)
class SimConfig:
    """Full experiment parameterization; defaults are the reference scenario."""

    N: int = 100  # devices
    C: int = 5  # frequency channels
    T: int = 50  # slots per cycle
    delta: int = 25  # per-packet deadline, slots
    eta: float = 0.4  # fraction of slots reserved for pilots
    W: int = 2  # cycles between CSI collection and the allocation using it
    gamma: float = 0.95  # fading correlation across cycles
    rho: float = 0.99999  # target decode reliability
    L: float = 60.0  # deployment radius, m
    alpha: float = 3.0  # path-loss exponent
    gamma_t_db: float = 100.0  # transmit SNR, dB
    ell: int = 100  # packet size, bits
    tau: float = 0.144e-3  # slot duration, s
    B: float = 180e3  # channel bandwidth, Hz
    Y_M: float = 4.0  # max extra interference factor
    n_cycles: int = 30
    n_topologies: int = 10
    rng_seed: int = 1
    pilot_policy: str = "round-robin"
    allocator: str = "gba"
    n_c: int = 12  # subcarriers per channel (informational)
    n_t: int = 2  # OFDM symbols per slot (informational)
    distance_threshold: float = 30.0  # used by the distance-threshold policy
    f_table_bins: int = 64
    f_table_z_max: float = 8.0
    f_table_max_age: int = 50
    redraw_interference: bool = False  # fresh interference draw every cycle

    def validate(self) -> None:
        checks = [
            (self.N >= 1, "N must be >= 1"),
            (self.C >= 1, "C must be >= 1"),
            (self.T >= 1, "T must be >= 1"),
            (1 <= self.delta <= self.T, "delta must be in 1..T"),
            (0.0 <= self.eta <= 1.0, "eta must be in [0, 1]"),
            (self.W >= 1, "W must be >= 1"),
            (0.0 <= self.gamma < 1.0, "gamma must be in [0, 1)"),
            (0.0 < self.rho < 1.0, "rho must be in (0, 1)"),
            (self.L > 0, "L must be > 0"),
            (self.alpha > 0, "alpha must be > 0"),
            (self.ell >= 1, "ell must be >= 1"),
            (self.tau > 0, "tau must be > 0"),
            (self.B > 0, "B must be > 0"),
            (self.Y_M >= 0, "Y_M must be >= 0"),
            (self.n_cycles >= 2 * self.W, "n_cycles must be >= 2*W"),
            (self.n_topologies >= 1, "n_topologies must be >= 1"),
            (self.pilot_policy in PILOT_POLICIES,
             f"pilot_policy must be one of {PILOT_POLICIES}"),
            (self.allocator in ALLOCATORS, f"allocator must be one of {ALLOCATORS}"),
            (self.pilots_per_cycle() <= self.N,
             f"floor(eta*T) = {self.pilots_per_cycle()} pilot devices exceed N = {self.N}"),
            (self.distance_threshold >= 0, "distance_threshold must be >= 0"),
            (self.f_table_bins >= 2, "f_table_bins must be >= 2"),
            (self.f_table_z_max > 0, "f_table_z_max must be > 0"),
            (self.f_table_max_age >= 1, "f_table_max_age must be >= 1"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ValueError(msg)

    def pilots_per_cycle(self) -> int:
        return int(self.eta * self.T)

    def link_params(self) -> LinkParams:
        return LinkParams.from_db(self.gamma_t_db, self.alpha, self.ell, self.B, self.tau)


@dataclass(frozen=True)
class Metrics:
    """Aggregate outputs of one simulation (timing excluded from equality)."""

    fraction_served_mean: float
    fraction_served_std: float
    per_topology_fraction: tuple
    served_transmissions: int
    decode_failures: int
    rus_per_served_mean: float
    validation_violations: int
    fairness_bin_centers: tuple = None
    fairness_fractions: tuple = None
    alloc_ms_per_cycle: float = field(default=0.0, compare=False)


@lru_cache(maxsize=8)
def _cached_table(gamma, rho, n_bins, z_max, max_age) -> FTable:
    return build_f_table(gamma, rho, n_bins=n_bins, z_max=z_max, max_age=max_age)


class RequirementModel:
    """Requirement counts for one topology: distances, interference and the
    quantile table bound into (device, channel, age, z) -> RUs.

    Path gains are memoized per (device, channel), so counts match
    required_rus_with_csi / required_rus_no_csi bit for bit at a fraction of
    the per-call cost (these run millions of times per sweep).
    """

    def __init__(self, interference: ChannelInterference, lp: LinkParams,
                 rho: float, gamma: float, quantiles):
        self.lambdas = interference.lambdas
        self.n_channels = len(interference.lambdas)
        self.lp = lp
        self.rho = rho
        self.gamma = gamma
        self.quantiles = quantiles
        self._neg_log_rho = -np.log(rho).item()
        self._gain_cache: dict = {}
        self._gm_cache: dict = {}

    def _gain(self, device: Device, channel: int) -> float:
        key = (device.distance, channel)
        gain = self._gain_cache.get(key)
        if gain is None:
            gain = path_gain(device.distance, float(self.lambdas[channel]), self.lp)
            self._gain_cache[key] = gain
        return gain

    def refresh_interference(self) -> None:
        """Call after mutating the interference coefficients in place."""
        self._gain_cache.clear()

    def count(self, device: Device, channel: int, age_t: int, z: float) -> int:
        return count_from_gain(self._gain(device, channel),
                               self.quantiles.lookup(z, age_t), self.lp)

    def count_no_csi(self, device: Device, channel: int) -> int:
        return count_from_gain(self._gain(device, channel), self._neg_log_rho, self.lp)

    def expected_z(self, z: float, age_u: int) -> float:
        if age_u == 0:
            return z
        params = self._gm_cache.get(age_u)
        if params is None:
            params = gm_params(self.gamma, age_u)
            self._gm_cache[age_u] = params
        return conditional_mean(z, params)

    def provider(self, records, meas_cycle, compute_cycle: int, use_cycle: int,
                 age_trace=None):
        """Requirement callable for the allocation computed now (end of
        ``compute_cycle``) that goes live at ``use_cycle``."""

        def req(device: Device, channel: int) -> int:
            rec = records[device.id]
            if not rec.valid:
                return self.count_no_csi(device, channel)
            age = use_cycle - meas_cycle[device.id]
            # same age through the other bookkeeping path: record age at
            # computation time plus the pipeline depth
            assert age == rec.age_u + (use_cycle - compute_cycle), (
                f"CSI age mismatch for device {device.id}: "
                f"{age} != {rec.age_u} + {use_cycle - compute_cycle}"
            )
            if age_trace is not None:
                age_trace[device.id] = age
            return self.count(device, channel, age, float(rec.z[channel]))

        return req


def generate_topology(cfg: SimConfig, rng: np.random.Generator):
    """Uniform positions on the disk (radius via sqrt) and uniform issue slots."""
    radii = np.maximum(cfg.L * np.sqrt(rng.random(cfg.N)), 1e-9)
    issue = rng.integers(1, cfg.T + 1, cfg.N)
    return [Device(id=i, distance=float(radii[i]), issue_time=int(issue[i]))
            for i in range(cfg.N)]


def draw_interference(cfg: SimConfig, rng: np.random.Generator) -> ChannelInterference:
    return ChannelInterference(1.0 + rng.uniform(0.0, cfg.Y_M, cfg.C))


def draw_pru_mask(cfg: SimConfig, rng: np.random.Generator) -> np.ndarray:
    """Pilot slots drawn independently per channel, fixed for the topology."""
    m = cfg.pilots_per_cycle()
    mask = np.zeros((cfg.C, cfg.T), dtype=bool)
    for c in range(cfg.C):
        mask[c, rng.choice(cfg.T, size=m, replace=False)] = True
    return mask


@dataclass(frozen=True)
class CycleOutcome:
    cycle: int
    served: tuple  # device ids that transmitted
    failed: tuple  # served ids whose decode missed the capacity condition
    total_rus: int


class TopologyRun:
    """Simulation state of one topology, advanced cycle by cycle."""

    def __init__(self, cfg: SimConfig, devices, interference, pru_mask,
                 rng: np.random.Generator, quantiles, validate: bool = False):
        self.cfg = cfg
        self.devices = devices
        self.interference = interference
        self.pru_mask = pru_mask
        self.rng = rng
        self.validate = validate
        self.lp = cfg.link_params()
        self.req_model = RequirementModel(interference, self.lp, cfg.rho, cfg.gamma, quantiles)
        self.policy = make_policy(
            cfg.pilot_policy,
            threshold=cfg.distance_threshold,
            w_delay=cfg.W,
            req=self.req_model,
        )
        self.m_pilots = cfg.pilots_per_cycle()
        self.records = {
            d.id: CsiRecord(device_id=d.id, z=np.zeros(cfg.C), age_u=0, valid=False)
            for d in devices
        }
        self.meas_cycle = {d.id: None for d in devices}
        self.fading = draw_fading((cfg.N, cfg.C), rng)  # state entering cycle 1
        self.alloc_times: list = []
        self.violations: list = []
        self.age_trace: dict = {}  # use_cycle -> {device_id: age}
        # until the pipeline fills, allocations can only rely on the prior
        warm = self._allocate(lambda dev, c: self.req_model.count_no_csi(dev, c))
        self.pipeline = {u: warm for u in range(1, min(cfg.W, cfg.n_cycles) + 1)}
        self.plan = self.policy.select(
            list(self.records.values()), devices, self.m_pilots, pru_mask
        )

    def _allocate(self, req_fn) -> CycleSchedule:
        empty = CycleSchedule.empty(self.cfg.T, self.cfg.C, self.cfg.delta, self.pru_mask)
        allocate = gba_allocate if self.cfg.allocator == "gba" else bca_allocate
        t0 = time.perf_counter()
        sched = allocate(self.devices, empty, req_fn)
        self.alloc_times.append(time.perf_counter() - t0)
        if self.validate:
            self.violations.extend(validate_schedule(sched, self.devices, req_fn))
        return sched

    def run_cycle(self, cycle: int) -> CycleOutcome:
        cfg = self.cfg
        # 1. channel moves on
        self.fading = evolve_fading(self.fading, cfg.gamma, self.rng)
        h2 = np.abs(self.fading) ** 2
        if cfg.redraw_interference:
            self.interference.lambdas[:] = 1.0 + self.rng.uniform(0.0, cfg.Y_M, cfg.C)
            self.req_model.refresh_interference()
        # 2. the allocation prepared W cycles ago goes live
        sched = self.pipeline.pop(cycle)
        served, failed, total_rus = [], [], 0
        for dev in self.devices:
            if dev.id not in sched.assignments:
                continue
            c, slots = sched.assignments[dev.id]
            served.append(dev.id)
            total_rus += len(slots)
            ok = decode_success(
                dev.distance, float(self.interference.lambdas[c]),
                float(h2[dev.id, c]), len(slots), self.lp,
            )
            if not ok:
                failed.append(dev.id)
        assert len(served) + len(sched.excluded) == cfg.N, "served/excluded must partition"
        # 3. this cycle's pilot devices measure the true channel
        for dev_id in self.plan.selected:
            rec = self.records[dev_id]
            rec.z = h2[dev_id, :].copy()
            rec.valid = True
            self.meas_cycle[dev_id] = cycle
        for dev_id, rec in self.records.items():
            if rec.valid:
                rec.age_u = cycle - self.meas_cycle[dev_id]
        # 4. choose who pilots next cycle
        self.plan = self.policy.select(
            list(self.records.values()), self.devices, self.m_pilots, self.pru_mask
        )
        # 5. schedule the allocation that this cycle's knowledge can feed
        use = cycle + cfg.W
        if use <= cfg.n_cycles:
            trace: dict = {}
            req_fn = self.req_model.provider(
                self.records, self.meas_cycle, cycle, use, age_trace=trace
            )
            self.pipeline[use] = self._allocate(req_fn)
            self.age_trace[use] = trace
        return CycleOutcome(
            cycle=cycle, served=tuple(served), failed=tuple(failed), total_rus=total_rus
        )


def run_simulation(cfg: SimConfig, validate: bool = False, fairness_bins: int = None) -> Metrics:
    """Simulate ``n_topologies`` independent deployments of ``n_cycles`` each.

    The served fraction is averaged over the second half of each run (the
    steady state), then across topologies.  Decode bookkeeping spans whole
    runs.  Deterministic for a given config and seed.
    """
    cfg.validate()
    quantiles = _cached_table(
        cfg.gamma, cfg.rho, cfg.f_table_bins, cfg.f_table_z_max, cfg.f_table_max_age
    )
    seeds = np.random.SeedSequence(cfg.rng_seed).spawn(cfg.n_topologies)
    window_start = cfg.n_cycles // 2 + 1
    per_topology = []
    served_tx = fails = 0
    window_rus = window_served = 0
    violations = 0
    alloc_times = []
    fair_distance, fair_events, fair_chances = [], [], []
    for seed in seeds:
        rng = np.random.default_rng(seed)
        devices = generate_topology(cfg, rng)
        interference = draw_interference(cfg, rng)
        pru_mask = draw_pru_mask(cfg, rng)
        run = TopologyRun(cfg, devices, interference, pru_mask, rng, quantiles, validate)
        window_fracs = []
        events = {d.id: 0 for d in devices}
        n_window = 0
        for cycle in range(1, cfg.n_cycles + 1):
            out = run.run_cycle(cycle)
            served_tx += len(out.served)
            fails += len(out.failed)
            if cycle >= window_start:
                n_window += 1
                window_fracs.append(len(out.served) / cfg.N)
                window_rus += out.total_rus
                window_served += len(out.served)
                for dev_id in out.served:
                    events[dev_id] += 1
        per_topology.append(float(np.mean(window_fracs)))
        violations += len(run.violations)
        alloc_times.extend(run.alloc_times)
        if fairness_bins is not None:
            for d in devices:
                fair_distance.append(d.distance)
                fair_events.append(events[d.id])
                fair_chances.append(n_window)
    centers = fractions = None
    if fairness_bins is not None:
        centers, fractions = fairness_by_distance(
            np.array(fair_distance), np.array(fair_events), np.array(fair_chances),
            fairness_bins, cfg.L,
        )
        centers, fractions = tuple(centers), tuple(fractions)
    return Metrics(
        fraction_served_mean=float(np.mean(per_topology)),
        fraction_served_std=float(np.std(per_topology, ddof=1)) if len(per_topology) > 1 else 0.0,
        per_topology_fraction=tuple(per_topology),
        served_transmissions=served_tx,
        decode_failures=fails,
        rus_per_served_mean=window_rus / window_served if window_served else 0.0,
        validation_violations=violations,
        fairness_bin_centers=centers,
        fairness_fractions=fractions,
        alloc_ms_per_cycle=1000.0 * float(np.mean(alloc_times)) if alloc_times else 0.0,
    )


def fairness_by_distance(distances, served_events, opportunities, n_bins: int, radius: float):
    """Served fraction per distance bin (uniform bins on [0, radius]).

    ``served_events[i]`` of ``opportunities[i]`` transmissions succeeded in
    being scheduled for the device at ``distances[i]``; devices of several
    topologies can be pooled.  Bins with no devices yield None.
    """
    if n_bins < 1:
        raise ValueError("n_bins must be >= 1")
    edges = np.linspace(0.0, radius, n_bins + 1)
    idx = np.minimum(np.digitize(distances, edges) - 1, n_bins - 1)
    centers = 0.5 * (edges[:-1] + edges[1:])
    fractions = []
    for b in range(n_bins):
        sel = idx == b
        total = opportunities[sel].sum()
        fractions.append(float(served_events[sel].sum() / total) if total else None)
    return list(centers), fractions
