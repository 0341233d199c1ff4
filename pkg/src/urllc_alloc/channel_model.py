# Time-correlated Rayleigh fading: first-order Gauss-Markov evolution of the
# complex coefficient, and the exact conditional law of the squared magnitude
# after t cycles given an old measurement.
#
# Conditioned on |h_m|^2 = z, the variable 2|h_{m+t}|^2 / b is noncentral
# chi-square with 2 degrees of freedom and noncentrality 2 a^2 z / b, where
# a = gamma^t and b = 1 - gamma^(2t).  All conditional quantities (pdf, CDF,
# inverse CDF, mean) follow from that identity.

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import chndtr, i0e

__all__ = [
    "GmParams",
    "FTable",
    "DirectQuantiles",
    "draw_fading",
    "evolve_fading",
    "gm_params",
    "conditional_pdf",
    "conditional_cdf",
    "inverse_conditional_cdf",
    "conditional_mean",
    "build_f_table",
]

# Below this noncentrality the conditional law is exponential to ~1e-13; also
# guards the chndtr backend against degenerate nc = 0.
_NC_TINY = 1e-12

_INV_TOL = 1e-9  # |cdf(x) - p| guaranteed by inverse_conditional_cdf
_MAX_BISECT = 200


def draw_fading(shape, rng: np.random.Generator):
    """Fresh CN(0,1) coefficients: re and im are N(0, 1/2), so |h|^2 ~ Exp(1)."""
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return (re + 1j * im) / np.sqrt(2.0)


def evolve_fading(h, gamma: float, rng: np.random.Generator):
    """One-cycle autoregressive update h' = gamma*h + sqrt(1-gamma^2)*xi.

    ``h`` may be a complex scalar or array; xi is drawn CN(0,1) elementwise,
    so the unit-variance stationary law is preserved.  Bit-reproducible for a
    given generator state.
    """
    if not 0.0 <= gamma < 1.0:
        raise ValueError(f"gamma must be in [0, 1), got {gamma}")
    xi = draw_fading(np.shape(h), rng)
    return gamma * h + math.sqrt(1.0 - gamma * gamma) * xi


@dataclass(frozen=True)
class GmParams:
    """Parameters (a, b) of the conditional fading-power law at age ``age_t``.

    a = gamma^t and b = 1 - gamma^(2t); b equals the geometric sum
    (1-gamma^2) * sum_{j<t} gamma^(2j) in closed form, and a^2 + b = 1.
    """

    a: float
    b: float
    age_t: int
    gamma: float


def gm_params(gamma: float, age_t: int) -> GmParams:
    if not 0.0 <= gamma < 1.0:
        raise ValueError(f"gamma must be in [0, 1), got {gamma}")
    if age_t < 1:
        raise ValueError(f"age_t must be >= 1, got {age_t}")
    a = gamma**age_t
    b = 1.0 - a * a  # closed form keeps a^2 + b = 1 exact in floats
    return GmParams(a=a, b=b, age_t=age_t, gamma=gamma)


def _check_nonnegative(name: str, value) -> None:
    if np.any(np.asarray(value) < 0):
        raise ValueError(f"{name} must be >= 0")


def conditional_pdf(x, z, params: GmParams):
    """Density of the fading power after ``age_t`` cycles given old value z.

    (1/b) exp(-x/b) exp(-a^2 z/b) I0( (2a/b) sqrt(xz) ), evaluated through the
    exponentially scaled Bessel function so large arguments cannot overflow:
    the combined exponent is -(sqrt(x) - a sqrt(z))^2 / b <= 0.
    """
    _check_nonnegative("x", x)
    _check_nonnegative("z", z)
    a, b = params.a, params.b
    x = np.asarray(x, dtype=float)
    y = (2.0 * a / b) * np.sqrt(x * z)
    # i0e(y) = exp(-y) I0(y); fold the +y back into the exponent.
    out = (1.0 / b) * np.exp(-x / b - a * a * z / b + y) * i0e(y)
    return out if out.ndim else float(out)


def conditional_cdf(x, z, params: GmParams):
    """P[|h|^2 <= x after age_t cycles | old fading power z].

    Noncentral chi-square CDF (2 dof, noncentrality 2 a^2 z / b) of 2x/b;
    degenerates to the exponential CDF 1 - exp(-x/b) when the noncentrality
    is negligible (no usable memory of z).
    """
    _check_nonnegative("x", x)
    _check_nonnegative("z", z)
    a, b = params.a, params.b
    x = np.asarray(x, dtype=float)
    nc = 2.0 * a * a * np.asarray(z, dtype=float) / b
    if np.all(nc < _NC_TINY):
        out = -np.expm1(-x / b)
    else:
        out = chndtr(2.0 * x / b, 2.0, nc)
    return out if out.ndim else float(out)


def inverse_conditional_cdf(p: float, z: float, params: GmParams) -> float:
    """Solve conditional_cdf(x, z, params) = p for x by bisection.

    Returns x with |cdf(x) - p| <= 1e-9.  The initial bracket
    [0, max(8, a^2 z + b + 40 b)] covers quantiles up to ~1 - 1e-17 and is
    doubled if ever insufficient.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must be in (0, 1), got {p}")
    _check_nonnegative("z", z)
    a, b = params.a, params.b
    lo = 0.0
    hi = max(8.0, a * a * z + b + 40.0 * b)
    for _ in range(80):
        if conditional_cdf(hi, z, params) >= p:
            break
        hi *= 2.0
    else:
        raise RuntimeError("could not bracket the conditional quantile")
    for _ in range(_MAX_BISECT):
        mid = 0.5 * (lo + hi)
        if conditional_cdf(mid, z, params) < p:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-13 * max(1.0, lo):
            break
    x = 0.5 * (lo + hi)
    if abs(conditional_cdf(x, z, params) - p) > _INV_TOL:
        raise RuntimeError(
            f"quantile bisection did not converge for p={p}, z={z}, t={params.age_t}"
        )
    return x


def conditional_mean(z: float, params: GmParams) -> float:
    """E[|h|^2 after age_t cycles | old value z] = a^2 z + b (scaled ncx2 mean)."""
    _check_nonnegative("z", z)
    return params.a * params.a * z + params.b


@dataclass(frozen=True)
class FTable:
    """Precomputed (1-rho)-quantiles of the conditional fading power.

    ``entries[t-1][r]`` holds the quantile for age t and the z value at the
    midpoint of quantization bin r.  Bins are uniform on [0, z_max]; one extra
    overflow bin represents every z >= z_max by z_max itself (understating z
    there lowers the quantile, i.e. errs toward extra resource units).
    Lookups at ages beyond ``max_age`` return the memoryless quantile -ln(rho).
    """

    gamma: float
    rho: float
    n_bins: int
    z_max: float
    max_age: int
    z_bins: np.ndarray = field(repr=False)  # (n_bins+1,) bin representatives
    entries: np.ndarray = field(repr=False)  # (max_age, n_bins+1)

    def __post_init__(self):
        # plain-list mirror: lookup sits on the per-cycle hot path
        object.__setattr__(self, "_rows", self.entries.tolist())
        object.__setattr__(self, "_scale", self.n_bins / self.z_max)
        object.__setattr__(self, "_stale_quantile", -math.log(self.rho))

    def bin_index(self, z: float) -> int:
        if z < 0:
            raise ValueError("z must be >= 0")
        if z >= self.z_max:
            return self.n_bins
        return min(int(z * self._scale), self.n_bins - 1)

    def lookup(self, z: float, age_t: int) -> float:
        if age_t < 1:
            raise ValueError(f"age_t must be >= 1, got {age_t}")
        if age_t > self.max_age:
            return self._stale_quantile
        return self._rows[age_t - 1][self.bin_index(z)]

    def save(self, path) -> None:
        """Columnar text dump: one header line, then one row per (t, bin, value)."""
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("gamma rho n_bins z_max max_age\n")
            fh.write(
                f"{float(self.gamma)!r} {float(self.rho)!r} {self.n_bins} "
                f"{float(self.z_max)!r} {self.max_age}\n"
            )
            fh.write("t bin value\n")
            for t in range(1, self.max_age + 1):
                for r in range(self.n_bins + 1):
                    fh.write(f"{t} {r} {float(self.entries[t - 1, r])!r}\n")

    @classmethod
    def load(cls, path) -> "FTable":
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
        if len(lines) < 3 or lines[0].split() != ["gamma", "rho", "n_bins", "z_max", "max_age"]:
            raise ValueError(f"{path}: not a fading quantile table")
        g, rho, n_bins, z_max, max_age = lines[1].split()
        n_bins, max_age = int(n_bins), int(max_age)
        entries = np.zeros((max_age, n_bins + 1))
        rows = lines[3:]
        if len(rows) != max_age * (n_bins + 1):
            raise ValueError(f"{path}: expected {max_age * (n_bins + 1)} rows, got {len(rows)}")
        for row in rows:
            t_s, r_s, v_s = row.split()
            entries[int(t_s) - 1, int(r_s)] = float(v_s)
        return cls(
            gamma=float(g),
            rho=float(rho),
            n_bins=n_bins,
            z_max=float(z_max),
            max_age=max_age,
            z_bins=_bin_representatives(n_bins, float(z_max)),
            entries=entries,
        )


def _bin_representatives(n_bins: int, z_max: float) -> np.ndarray:
    mids = (np.arange(n_bins) + 0.5) * (z_max / n_bins)
    return np.append(mids, z_max)


def build_f_table(
    gamma: float,
    rho: float,
    n_bins: int = 64,
    z_max: float = 8.0,
    max_age: int = 50,
) -> FTable:
    """Tabulate inverse_conditional_cdf(1-rho | z, t) over ages and z bins."""
    if n_bins < 2:
        raise ValueError(f"n_bins must be >= 2, got {n_bins}")
    if max_age < 1:
        raise ValueError(f"max_age must be >= 1, got {max_age}")
    if not 0.0 < rho < 1.0:
        raise ValueError(f"rho must be in (0, 1), got {rho}")
    reps = _bin_representatives(n_bins, z_max)
    entries = np.zeros((max_age, n_bins + 1))
    for t in range(1, max_age + 1):
        params = gm_params(gamma, t)
        for r, z in enumerate(reps):
            entries[t - 1, r] = inverse_conditional_cdf(1.0 - rho, float(z), params)
    return FTable(
        gamma=gamma,
        rho=rho,
        n_bins=n_bins,
        z_max=z_max,
        max_age=max_age,
        z_bins=reps,
        entries=entries,
    )


class DirectQuantiles:
    """Quantile source evaluating the conditional inverse CDF on demand.

    Same ``lookup`` interface as FTable, without quantization error; too slow
    for per-cycle use but the reference the table is validated against.
    """

    def __init__(self, gamma: float, rho: float):
        if not 0.0 < rho < 1.0:
            raise ValueError(f"rho must be in (0, 1), got {rho}")
        self.gamma = gamma
        self.rho = rho

    def lookup(self, z: float, age_t: int) -> float:
        if age_t < 1:
            raise ValueError(f"age_t must be >= 1, got {age_t}")
        return inverse_conditional_cdf(1.0 - self.rho, z, gm_params(self.gamma, age_t))
