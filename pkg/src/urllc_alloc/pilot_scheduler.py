# Which devices get to refresh their channel measurements each cycle:
# plain rotation, rotation restricted to far devices, or the dynamic policy
# that ranks devices by the resource savings a refresh would buy.

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "CsiRecord",
    "PilotPlan",
    "round_robin_select",
    "distance_threshold_select",
    "pilot_gain",
    "dynamic_select",
    "RoundRobinPolicy",
    "DistanceThresholdPolicy",
    "DynamicPolicy",
    "make_policy",
]


@dataclass
class CsiRecord:
    """Last measured squared fading per channel for one device, plus its age.

    ``age_u`` counts cycles since the measurement (0 = measured in the cycle
    that just ended).  ``valid`` is False until the first pilot.
    """

    device_id: int
    z: np.ndarray
    age_u: int = 0
    valid: bool = False


@dataclass(frozen=True)
class PilotPlan:
    """The devices that transmit pilots next cycle, and on which slots.

    ``pru_positions[c]`` lists the pilot slots (1-based) of channel c; the
    k-th selected device uses the k-th pilot slot of every channel.
    """

    selected: list
    pru_positions: list


def _positions_from_mask(pru_mask, m: int) -> list:
    positions = []
    for row in np.asarray(pru_mask, dtype=bool):
        slots = [int(s) for s in np.flatnonzero(row) + 1]
        if len(slots) != m:
            raise ValueError(f"pilot mask has {len(slots)} slots on a channel, expected {m}")
        positions.append(slots)
    return positions


def _rotate(ids, cursor: int, m: int):
    n = len(ids)
    picked = [ids[(cursor + k) % n] for k in range(m)]
    return picked, (cursor + m) % n if n else 0


def round_robin_select(cursor: int, devices, m: int, pru_mask):
    """Next m devices in cyclic id order; returns (plan, advanced cursor).

    Every device pilots exactly once per ceil(N/m) cycles.
    """
    ids = sorted(d.id for d in devices)
    if m > len(ids):
        raise ValueError(f"cannot select {m} of {len(ids)} devices")
    picked, cursor = _rotate(ids, cursor, m)
    return PilotPlan(selected=picked, pru_positions=_positions_from_mask(pru_mask, m)), cursor


def distance_threshold_select(devices, threshold: float, m: int, cursor: int, pru_mask):
    """Round robin restricted to devices farther than ``threshold``.

    With fewer than m far devices the selection is padded with the devices
    closest to the threshold from below; with no far devices at all it
    degenerates to the plain rotation over everyone.
    """
    if m > len(devices):
        raise ValueError(f"cannot select {m} of {len(devices)} devices")
    far = sorted(d.id for d in devices if d.distance > threshold)
    if len(far) >= m:
        picked, cursor = _rotate(far, cursor, m)
    elif not far:
        picked, cursor = _rotate(sorted(d.id for d in devices), cursor, m)
    else:
        near = sorted(
            (d for d in devices if d.distance <= threshold),
            key=lambda d: (-d.distance, d.id),
        )
        picked = far + [d.id for d in near[: m - len(far)]]
    return PilotPlan(selected=picked, pru_positions=_positions_from_mask(pru_mask, m)), cursor


def pilot_gain(record: CsiRecord, device, w_delay: int, req) -> float:
    """Resource units a pilot refresh is expected to save for this device.

    Difference of two best-channel requirements: keeping the stored
    measurement one more cycle, versus a fresh measurement (whose value is
    taken at its conditional mean) that will be ``w_delay`` cycles old by the
    time the allocation built on it goes live.  Devices that never piloted
    get +inf so the cold start drains them first.
    """
    if not record.valid:
        return math.inf
    u = record.age_u
    channels = range(req.n_channels)
    keep = min(req.count(device, c, u + 1, float(record.z[c])) for c in channels)
    refresh = min(
        req.count(device, c, w_delay, req.expected_z(float(record.z[c]), u))
        for c in channels
    )
    return float(keep - refresh)


def dynamic_select(records, devices, m: int, w_delay: int, req, pru_mask) -> PilotPlan:
    """Pick the m devices with the largest refresh gain.

    Ties prefer the stalest record, then the lower id.  Gains cost O(N*C)
    plus the O(N log N) sort.
    """
    if m > len(devices):
        raise ValueError(f"cannot select {m} of {len(devices)} devices")
    by_id = {r.device_id: r for r in records}
    ranked = sorted(
        devices,
        key=lambda d: (-pilot_gain(by_id[d.id], d, w_delay, req), -by_id[d.id].age_u, d.id),
    )
    picked = [d.id for d in ranked[:m]]
    return PilotPlan(selected=picked, pru_positions=_positions_from_mask(pru_mask, m))


class RoundRobinPolicy:
    name = "round-robin"

    def __init__(self):
        self.cursor = 0

    def select(self, records, devices, m, pru_mask):
        plan, self.cursor = round_robin_select(self.cursor, devices, m, pru_mask)
        return plan


class DistanceThresholdPolicy:
    name = "distance-threshold"

    def __init__(self, threshold: float):
        self.threshold = threshold
        self.cursor = 0

    def select(self, records, devices, m, pru_mask):
        plan, self.cursor = distance_threshold_select(
            devices, self.threshold, m, self.cursor, pru_mask
        )
        return plan


class DynamicPolicy:
    name = "dynamic"

    def __init__(self, w_delay: int, req):
        self.w_delay = w_delay
        self.req = req

    def select(self, records, devices, m, pru_mask):
        return dynamic_select(records, devices, m, self.w_delay, self.req, pru_mask)


def make_policy(name: str, *, threshold: float = None, w_delay: int = None, req=None):
    if name == "round-robin":
        return RoundRobinPolicy()
    if name == "distance-threshold":
        if threshold is None:
            raise ValueError("distance-threshold policy needs a threshold")
        return DistanceThresholdPolicy(threshold)
    if name == "dynamic":
        if w_delay is None or req is None:
            raise ValueError("dynamic policy needs w_delay and a requirement context")
        return DynamicPolicy(w_delay, req)
    raise ValueError(f"unknown pilot policy {name!r}")
