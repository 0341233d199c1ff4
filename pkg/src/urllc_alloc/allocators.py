# Per-cycle uplink allocation: the graph-based allocator (iterated
# maximum-weight matching between channels and pending devices) and the greedy
# earliest-completion baseline, over a slot grid where some slots are reserved
# for pilots and must be jumped.

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .matching import BipartiteGraph, max_weight_matching

__all__ = [
    "Device",
    "PilotLayout",
    "CycleSchedule",
    "compute_zeta",
    "edge_feasible",
    "edge_weight",
    "gba_allocate",
    "bca_allocate",
    "validate_schedule",
    "dump_schedule",
]


@dataclass(frozen=True)
class Device:
    id: int
    distance: float  # meters from the access point
    issue_time: int  # slot (1-based) where its packet appears each cycle

    def __post_init__(self):
        if self.distance <= 0:
            raise ValueError(f"device {self.id}: distance must be > 0")
        if self.issue_time < 1:
            raise ValueError(f"device {self.id}: issue_time must be >= 1")


class PilotLayout:
    """Pilot-slot geometry of one channel, with O(1) window queries.

    Slots are 1-based; ``pru_row[s-1]`` flags slot s as reserved for pilots.
    """

    def __init__(self, pru_row):
        row = np.asarray(pru_row, dtype=bool)
        data = ~row
        self.n_slots = len(row)
        self.pru_row = row
        # cum[s] = number of data slots among slots 1..s
        self.cum = np.concatenate(([0], np.cumsum(data)))
        # slot index of the k-th data slot, k = 1..total
        self.rank_pos = np.flatnonzero(data) + 1
        self.total_data = len(self.rank_pos)

    def zeta(self, start: int, needed: int):
        """Length of the smallest window start+1 .. start+zeta holding
        exactly ``needed`` data slots, or None if the cycle runs out."""
        if needed < 1:
            raise ValueError(f"needed must be >= 1, got {needed}")
        if start >= self.n_slots:
            return None
        target = self.cum[start] + needed
        if target > self.total_data:
            return None
        return int(self.rank_pos[target - 1]) - start

    def slots(self, start: int, needed: int):
        """The ``needed`` data slots of that window, in increasing order."""
        first = int(self.cum[start])
        picked = self.rank_pos[first:first + needed]
        if len(picked) < needed:
            raise ValueError("window exceeds the cycle")
        return [int(s) for s in picked]


def compute_zeta(beta_c: int, t_i: int, pru_row, needed: int):
    """Minimum window length from the first free slot max(beta_c, t_i - 1) + 1
    that gathers ``needed`` data slots while jumping pilot slots; None when the
    demand does not fit in the cycle."""
    return PilotLayout(pru_row).zeta(max(beta_c, t_i - 1), needed)


def edge_feasible(beta_c: int, t_i: int, zeta: int, delta: int) -> bool:
    """Deadline check: the window must end strictly before t_i + delta."""
    return max(beta_c, t_i - 1) + zeta < t_i + delta


def edge_weight(beta_c: int, t_i: int, zeta: int, n_slots: int, delta: int) -> int:
    """Free slots left on the channel after this placement, plus delta."""
    return n_slots + delta - (max(beta_c, t_i - 1) + zeta)


@dataclass
class CycleSchedule:
    """One cycle's allocation state on the T x C grid.

    ``beta[c]`` is the latest slot already allocated on channel c (0 if none);
    ``assignments`` maps device id -> (channel, data-slot list).
    """

    n_slots: int
    n_channels: int
    delta: int
    pru_mask: np.ndarray  # (C, T) bool, True = pilot slot
    beta: list = field(default_factory=list)
    assignments: dict = field(default_factory=dict)
    served: list = field(default_factory=list)
    excluded: list = field(default_factory=list)

    @classmethod
    def empty(cls, n_slots: int, n_channels: int, delta: int, pru_mask) -> "CycleSchedule":
        mask = np.asarray(pru_mask, dtype=bool)
        if mask.shape != (n_channels, n_slots):
            raise ValueError(f"pru_mask shape {mask.shape} != ({n_channels}, {n_slots})")
        if not 1 <= delta <= n_slots:
            raise ValueError(f"delta must be in 1..{n_slots}, got {delta}")
        return cls(
            n_slots=n_slots,
            n_channels=n_channels,
            delta=delta,
            pru_mask=mask,
            beta=[0] * n_channels,
        )

    def layouts(self):
        return [PilotLayout(self.pru_mask[c]) for c in range(self.n_channels)]


def _check_virgin(schedule: CycleSchedule) -> None:
    if schedule.assignments or any(schedule.beta) or schedule.served or schedule.excluded:
        raise ValueError("allocation needs an empty schedule (no prior assignments)")


def _requirements(devices, req, n_channels):
    table = {}
    for dev in devices:
        for c in range(n_channels):
            k = req(dev, c)
            if k < 1:
                raise ValueError(f"requirement for device {dev.id} on channel {c} is {k}")
            table[dev.id, c] = int(k)
    return table


def _commit(schedule, layouts, dev, c, needed):
    start = max(schedule.beta[c], dev.issue_time - 1)
    slots = layouts[c].slots(start, needed)
    schedule.beta[c] = slots[-1]  # minimal window always ends on a data slot
    schedule.assignments[dev.id] = (c, slots)
    schedule.served.append(dev.id)


def gba_allocate(devices, schedule: CycleSchedule, req, on_iteration=None) -> CycleSchedule:
    """Graph-based allocation: repeat {build channel/device bipartite graph,
    drop isolated devices as excluded, commit a maximum-weight matching} until
    no device is pending.

    ``req`` maps (device, channel) -> RU count and must be stable for the
    whole run.  ``on_iteration(graph, matching)``, when given, observes every
    matching round (used by tests to audit per-iteration optimality).
    """
    _check_virgin(schedule)
    n_ch, n_slots, delta = schedule.n_channels, schedule.n_slots, schedule.delta
    layouts = schedule.layouts()
    need = _requirements(devices, req, n_ch)
    pending = sorted(devices, key=lambda d: d.id)
    while pending:
        per_dev_edges = []
        for dev in pending:
            lst = []
            for c in range(n_ch):
                start = max(schedule.beta[c], dev.issue_time - 1)
                zeta = layouts[c].zeta(start, need[dev.id, c])
                if zeta is not None and start + zeta < dev.issue_time + delta:
                    lst.append((c, n_slots + delta - (start + zeta)))
            per_dev_edges.append(lst)
        # devices with no feasible channel can never be served this cycle
        active, edges = [], []
        for dev, lst in zip(pending, per_dev_edges):
            if lst:
                j = len(active)
                active.append(dev)
                edges.extend((c, j, w) for c, w in lst)
            else:
                schedule.excluded.append(dev.id)
        if not active:
            break
        matching = max_weight_matching(BipartiteGraph(n_ch, len(active), edges))
        if on_iteration is not None:
            on_iteration(BipartiteGraph(n_ch, len(active), edges), matching)
        matched = set()
        for c, j in matching.pairs:
            _commit(schedule, layouts, active[j], c, need[active[j].id, c])
            matched.add(j)
        pending = [dev for j, dev in enumerate(active) if j not in matched]
    return schedule


def bca_allocate(devices, schedule: CycleSchedule, req) -> CycleSchedule:
    """Greedy baseline: devices in issue-time order (ties by id) each take the
    channel with the earliest completion slot (ties by channel index), or are
    excluded when even that channel misses the deadline."""
    _check_virgin(schedule)
    n_ch, delta = schedule.n_channels, schedule.delta
    layouts = schedule.layouts()
    need = _requirements(devices, req, n_ch)
    for dev in sorted(devices, key=lambda d: (d.issue_time, d.id)):
        best_completion, best_c = None, None
        for c in range(n_ch):
            start = max(schedule.beta[c], dev.issue_time - 1)
            zeta = layouts[c].zeta(start, need[dev.id, c])
            if zeta is None:
                continue
            completion = start + zeta
            if best_completion is None or completion < best_completion:
                best_completion, best_c = completion, c
        if best_completion is not None and best_completion < dev.issue_time + delta:
            _commit(schedule, layouts, dev, best_c, need[dev.id, best_c])
        else:
            schedule.excluded.append(dev.id)
    return schedule


def validate_schedule(schedule: CycleSchedule, devices, req) -> list:
    """Machine check of every schedule invariant; returns violation strings."""
    problems = []
    by_id = {dev.id: dev for dev in devices}
    served = set(schedule.served)
    excluded = set(schedule.excluded)
    if served & excluded:
        problems.append(f"devices both served and excluded: {sorted(served & excluded)}")
    if served | excluded != set(by_id):
        problems.append("served/excluded do not partition the device set")
    if served != set(schedule.assignments):
        problems.append("served set does not match assignment keys")

    per_channel = {c: [] for c in range(schedule.n_channels)}
    for dev_id, (c, slots) in schedule.assignments.items():
        dev = by_id.get(dev_id)
        if dev is None:
            problems.append(f"assignment for unknown device {dev_id}")
            continue
        if not 0 <= c < schedule.n_channels:
            problems.append(f"device {dev_id}: channel {c} out of range")
            continue
        if len(set(slots)) != len(slots):
            problems.append(f"device {dev_id}: repeated slots")
        if any(not 1 <= s <= schedule.n_slots for s in slots):
            problems.append(f"device {dev_id}: slot outside the cycle")
            continue
        if any(schedule.pru_mask[c, s - 1] for s in slots):
            problems.append(f"device {dev_id}: pilot slot assigned on channel {c}")
        if len(slots) != req(dev, c):
            problems.append(
                f"device {dev_id}: {len(slots)} RUs assigned, needs {req(dev, c)}"
            )
        if slots[0] < dev.issue_time:
            problems.append(f"device {dev_id}: starts before its packet exists")
        if slots[-1] >= dev.issue_time + schedule.delta:
            problems.append(f"device {dev_id}: misses the deadline window")
        span_data = [
            s for s in range(slots[0], slots[-1] + 1) if not schedule.pru_mask[c, s - 1]
        ]
        if span_data != sorted(slots):
            problems.append(f"device {dev_id}: window skips data slots on channel {c}")
        per_channel[c].extend(slots)
    for c, slots in per_channel.items():
        if len(set(slots)) != len(slots):
            problems.append(f"channel {c}: overlapping assignments")
        expect_beta = max(slots) if slots else 0
        if schedule.beta[c] != expect_beta:
            problems.append(f"channel {c}: beta {schedule.beta[c]} != {expect_beta}")
    return problems


def dump_schedule(schedule: CycleSchedule, devices) -> str:
    """One line per device: id, channel, comma-joined slots, served/excluded."""
    lines = []
    for dev in sorted(devices, key=lambda d: d.id):
        if dev.id in schedule.assignments:
            c, slots = schedule.assignments[dev.id]
            lines.append(f"{dev.id} {c} {','.join(str(s) for s in slots)} served")
        else:
            lines.append(f"{dev.id} - - excluded")
    return "\n".join(lines) + "\n"
