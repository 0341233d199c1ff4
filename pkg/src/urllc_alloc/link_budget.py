# SINR, the Shannon decode condition, and the resource-unit requirement
# functions (memoryless and conditioned on aged channel knowledge).

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "LinkParams",
    "count_from_gain",
    "ChannelInterference",
    "path_gain",
    "sinr",
    "decode_success",
    "required_rus_no_csi",
    "required_rus_with_csi",
]


@dataclass(frozen=True)
class LinkParams:
    """Radio constants shared by every link in a deployment.

    gamma_t is the *linear* transmit SNR; q = B * tau is the bits-per-RU
    capacity factor (25.92 for 180 kHz x 0.144 ms).
    """

    gamma_t: float  # linear transmit SNR
    alpha: float  # path-loss exponent
    ell: int  # packet size, bits
    b_hz: float  # channel bandwidth, Hz
    tau_s: float  # slot duration, s

    def __post_init__(self):
        if self.gamma_t <= 0 or self.alpha <= 0 or self.ell <= 0:
            raise ValueError("gamma_t, alpha and ell must be positive")

    @property
    def q(self) -> float:
        return self.b_hz * self.tau_s

    @classmethod
    def from_db(cls, gamma_t_db: float, alpha: float, ell: int, b_hz: float, tau_s: float):
        return cls(gamma_t=10.0 ** (gamma_t_db / 10.0), alpha=alpha, ell=ell,
                   b_hz=b_hz, tau_s=tau_s)


@dataclass(frozen=True)
class ChannelInterference:
    """Per-channel equivalent interference coefficients, each 1 + Y_c >= 1."""

    lambdas: np.ndarray

    def __post_init__(self):
        lam = np.asarray(self.lambdas, dtype=float)
        if np.any(lam < 1.0):
            raise ValueError("interference coefficients must be >= 1")
        object.__setattr__(self, "lambdas", lam)

    def __len__(self) -> int:
        return len(self.lambdas)


def path_gain(distance: float, lambda_c: float, lp: LinkParams) -> float:
    """gamma_t / (lambda_c * d^alpha): the SINR per unit fading power.

    Shared by sinr() and the requirement functions so that a fading power
    exactly at the planning quantile decodes exactly at the boundary.
    """
    if distance <= 0:
        raise ValueError(f"distance must be > 0, got {distance}")
    if lambda_c < 1.0:
        raise ValueError(f"lambda_c must be >= 1, got {lambda_c}")
    return lp.gamma_t / (lambda_c * distance**lp.alpha)


def sinr(distance: float, lambda_c: float, h2: float, lp: LinkParams) -> float:
    """Received SINR for squared fading coefficient h2 at the given distance."""
    if h2 < 0:
        raise ValueError("h2 must be >= 0")
    return path_gain(distance, lambda_c, lp) * h2


def decode_success(distance: float, lambda_c: float, h2: float, k: int, lp: LinkParams) -> bool:
    """True iff k RUs carry ell bits within the instantaneous capacity.

    Success condition: log2(1 + SINR) >= ell / (k * q).
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return math.log2(1.0 + sinr(distance, lambda_c, h2, lp)) >= lp.ell / (k * lp.q)


def count_from_gain(gain: float, quantile: float, lp: LinkParams) -> int:
    """RU count from a precomputed path gain and a fading-power quantile."""
    rate_per_ru = math.log2(1.0 + gain * quantile)
    return max(1, math.ceil(lp.ell / lp.q / rate_per_ru))


def required_rus_no_csi(distance: float, lambda_c: float, rho: float, lp: LinkParams) -> int:
    """RUs needed for reliability rho with only the exponential fading prior.

    ceil( (ell/q) / log2(1 - gamma_t ln(rho) / (lambda_c d^alpha)) ); the
    argument of the log is 1 + path_gain * (-ln rho), the memoryless
    (1-rho)-quantile of the fading power scaled into SINR.
    """
    if not 0.0 < rho < 1.0:
        raise ValueError(f"rho must be in (0, 1), got {rho}")
    return count_from_gain(path_gain(distance, lambda_c, lp), -math.log(rho), lp)


def required_rus_with_csi(
    distance: float,
    lambda_c: float,
    rho: float,
    age_t: int,
    z: float,
    lp: LinkParams,
    quantiles,
) -> int:
    """RUs needed given a fading-power measurement z that is age_t cycles old.

    ``quantiles`` supplies the conditional (1-rho)-quantile (an FTable or
    DirectQuantiles).  Ages beyond the table range fall back to the
    memoryless count: the table returns -ln(rho) there, which makes this
    expression identical to required_rus_no_csi.
    """
    if age_t < 1:
        raise ValueError(f"age_t must be >= 1, got {age_t}")
    if z < 0:
        raise ValueError("z must be >= 0")
    if not 0.0 < rho < 1.0:
        raise ValueError(f"rho must be in (0, 1), got {rho}")
    return count_from_gain(path_gain(distance, lambda_c, lp), quantiles.lookup(z, age_t), lp)
