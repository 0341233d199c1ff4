# Experiment front-end: key=value config files with command-line overrides,
# single runs, parameter sweeps and fairness histograms emitted as CSV.

from __future__ import annotations

import argparse
import csv
import dataclasses
import sys
from dataclasses import dataclass, field
from typing import get_type_hints

from .simulator import ALLOCATORS, PILOT_POLICIES, SimConfig, run_simulation

__all__ = [
    "SweepSpec",
    "parse_config",
    "write_config",
    "run_sweep",
    "emit_fairness",
    "main",
]

SWEEPABLE = ("eta", "W", "gamma", "N")
SWEEP_COLUMNS = (
    "param", "value", "allocator", "pilot_policy", "W",
    "frac_served_mean", "frac_served_std", "rus_per_served_mean",
    "alloc_ms_per_cycle",
)
RUN_COLUMNS = (
    "allocator", "pilot_policy", "frac_served_mean", "frac_served_std",
    "rus_per_served_mean", "alloc_ms_per_cycle", "served_transmissions",
    "decode_failures", "validation_violations",
)
FAIRNESS_COLUMNS = ("policy", "bin_center_m", "frac_served")

_FIELD_TYPES = get_type_hints(SimConfig)


def _coerce(key: str, raw: str):
    kind = _FIELD_TYPES[key]
    try:
        if kind is bool:
            low = raw.strip().lower()
            if low in ("true", "1", "yes"):
                return True
            if low in ("false", "0", "no"):
                return False
            raise ValueError
        return kind(raw)
    except ValueError:
        raise ValueError(f"config key {key!r}: cannot parse {raw!r} as {kind.__name__}")


def parse_config(path=None, overrides=None) -> SimConfig:
    """Config from defaults, then a key=value file, then explicit overrides.

    Unknown keys and invariant violations raise ValueError naming the field.
    """
    values = {}
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
                key, raw = (part.strip() for part in line.split("=", 1))
                if key not in _FIELD_TYPES:
                    raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
                values[key] = _coerce(key, raw)
    for key, val in (overrides or {}).items():
        if key not in _FIELD_TYPES:
            raise ValueError(f"unknown config key {key!r}")
        values[key] = val if not isinstance(val, str) else _coerce(key, val)
    cfg = SimConfig(**values)
    cfg.validate()
    return cfg


def write_config(cfg: SimConfig, path) -> None:
    """Emit a config file that parse_config reads back to an equal config."""
    with open(path, "w", encoding="utf-8") as fh:
        for f in dataclasses.fields(cfg):
            value = getattr(cfg, f.name)
            if isinstance(value, bool):
                value = "true" if value else "false"
            elif isinstance(value, float):
                value = repr(value)
            fh.write(f"{f.name}={value}\n")


@dataclass(frozen=True)
class SweepSpec:
    """One parameter sweep: every value crossed with every allocator/policy."""

    base: SimConfig
    param: str  # one of SWEEPABLE
    values: tuple
    output_path: str
    allocators: tuple = None  # default: just the base allocator
    policies: tuple = None  # default: just the base policy
    w_overrides: dict = field(default=None)  # swept value -> W (e.g. per-N delay)
    validate: bool = False

    def __post_init__(self):
        if self.param not in SWEEPABLE:
            raise ValueError(f"swept parameter must be one of {SWEEPABLE}")
        if not self.values:
            raise ValueError("sweep needs at least one value")
        object.__setattr__(self, "values", tuple(self.values))
        object.__setattr__(
            self, "allocators", tuple(self.allocators or (self.base.allocator,))
        )
        object.__setattr__(
            self, "policies", tuple(self.policies or (self.base.pilot_policy,))
        )

    def configs(self):
        """(config, value, allocator, policy) for every sweep point; every
        combination shares the base seed so comparisons are paired."""
        out = []
        for value in self.values:
            for allocator in self.allocators:
                for policy in self.policies:
                    fields_ = {self.param: value, "allocator": allocator,
                               "pilot_policy": policy}
                    if self.w_overrides and value in self.w_overrides:
                        fields_["W"] = self.w_overrides[value]
                    cfg = dataclasses.replace(self.base, **fields_)
                    cfg.validate()
                    out.append((cfg, value, allocator, policy))
        return out


def run_sweep(spec: SweepSpec):
    """Run every sweep point and write one CSV row each; returns the rows."""
    rows = []
    for cfg, value, allocator, policy in spec.configs():
        metrics = run_simulation(cfg, validate=spec.validate)
        rows.append({
            "param": spec.param,
            "value": value,
            "allocator": allocator,
            "pilot_policy": policy,
            "W": cfg.W,
            "frac_served_mean": metrics.fraction_served_mean,
            "frac_served_std": metrics.fraction_served_std,
            "rus_per_served_mean": metrics.rus_per_served_mean,
            "alloc_ms_per_cycle": metrics.alloc_ms_per_cycle,
        })
    _write_csv(spec.output_path, SWEEP_COLUMNS, rows)
    return rows


def emit_fairness(results, path) -> None:
    """results: iterable of (policy_name, bin_centers, fractions) triples."""
    rows = []
    for policy, centers, fractions in results:
        for center, frac in zip(centers, fractions):
            rows.append({
                "policy": policy,
                "bin_center_m": center,
                "frac_served": "nan" if frac is None else frac,
            })
    _write_csv(path, FAIRNESS_COLUMNS, rows)


def _write_csv(path, columns, rows) -> None:
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(columns))
            writer.writeheader()
            writer.writerows(rows)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


# ------------------------------------------------------------ command line


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="FILE", help="key=value config file")
    for f in dataclasses.fields(SimConfig):
        flag = "--" + f.name.replace("_", "-")
        kind = _FIELD_TYPES[f.name]
        kwargs = dict(dest=f.name, default=None, metavar=f.name.upper())
        if kind is bool:
            kwargs["type"] = lambda raw, k=f.name: _coerce(k, raw)
        else:
            kwargs["type"] = kind
        if f.name == "pilot_policy":
            kwargs["choices"] = PILOT_POLICIES
        if f.name == "allocator":
            kwargs["choices"] = ALLOCATORS
        parser.add_argument(flag, **kwargs)
    parser.add_argument("--seed", dest="rng_seed", type=int, default=None,
                        help="alias for --rng-seed")


def _config_from_args(args) -> SimConfig:
    overrides = {
        f.name: getattr(args, f.name)
        for f in dataclasses.fields(SimConfig)
        if getattr(args, f.name) is not None
    }
    return parse_config(args.config, overrides)


def _cmd_run(args) -> int:
    cfg = _config_from_args(args)
    fairness = args.fairness_bins
    metrics = run_simulation(cfg, validate=args.validate, fairness_bins=fairness)
    print(f"fraction served: {metrics.fraction_served_mean:.4f} "
          f"+/- {metrics.fraction_served_std:.4f}")
    print(f"RUs per served device: {metrics.rus_per_served_mean:.3f}")
    print(f"allocator time per cycle: {metrics.alloc_ms_per_cycle:.3f} ms")
    print(f"decode failures: {metrics.decode_failures}/{metrics.served_transmissions}")
    if args.validate:
        print(f"schedule violations: {metrics.validation_violations}")
    if args.out:
        _write_csv(args.out, RUN_COLUMNS, [{
            "allocator": cfg.allocator,
            "pilot_policy": cfg.pilot_policy,
            "frac_served_mean": metrics.fraction_served_mean,
            "frac_served_std": metrics.fraction_served_std,
            "rus_per_served_mean": metrics.rus_per_served_mean,
            "alloc_ms_per_cycle": metrics.alloc_ms_per_cycle,
            "served_transmissions": metrics.served_transmissions,
            "decode_failures": metrics.decode_failures,
            "validation_violations": metrics.validation_violations,
        }])
    if args.fairness_out:
        if fairness is None:
            raise ValueError("--fairness-out needs --fairness-bins")
        emit_fairness(
            [(cfg.pilot_policy, metrics.fairness_bin_centers, metrics.fairness_fractions)],
            args.fairness_out,
        )
    return 0


def _parse_values(param: str, raw: str):
    kind = int if param in ("W", "N") else float
    try:
        return tuple(kind(tok) for tok in raw.split(",") if tok.strip())
    except ValueError:
        raise ValueError(f"cannot parse sweep values {raw!r} as {kind.__name__}s")


def _cmd_sweep(args) -> int:
    base = _config_from_args(args)
    w_overrides = None
    if args.w_for:
        w_overrides = {}
        kind = int if args.param in ("W", "N") else float
        for tok in args.w_for:
            try:
                value, w = tok.split("=", 1)
                w_overrides[kind(value)] = int(w)
            except ValueError:
                raise ValueError(f"--w-for expects VALUE=W, got {tok!r}")
    spec = SweepSpec(
        base=base,
        param=args.param,
        values=_parse_values(args.param, args.values),
        output_path=args.out,
        allocators=tuple(args.allocators.split(",")) if args.allocators else None,
        policies=tuple(args.policies.split(",")) if args.policies else None,
        w_overrides=w_overrides,
        validate=args.validate,
    )
    rows = run_sweep(spec)
    print(f"wrote {len(rows)} rows to {spec.output_path}")
    return 0


def _cmd_fairness(args) -> int:
    base = _config_from_args(args)
    policies = args.policies.split(",") if args.policies else [base.pilot_policy]
    results = []
    for policy in policies:
        cfg = dataclasses.replace(base, pilot_policy=policy)
        cfg.validate()
        metrics = run_simulation(cfg, validate=args.validate, fairness_bins=args.bins)
        results.append((policy, metrics.fairness_bin_centers, metrics.fairness_fractions))
    emit_fairness(results, args.out)
    print(f"wrote fairness histogram ({args.bins} bins, {len(policies)} policies) to {args.out}")
    return 0


def _cmd_init_config(args) -> int:
    cfg = _config_from_args(args)
    write_config(cfg, args.out)
    print(f"wrote config to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="urllc-alloc",
        description="Uplink URLLC resource-allocation simulator: single runs, "
                    "parameter sweeps and fairness histograms.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one simulation and print a summary")
    _add_config_flags(p_run)
    p_run.add_argument("--out", metavar="CSV", help="write the summary row here")
    p_run.add_argument("--validate", action="store_true",
                       help="run the schedule validator every cycle (slow)")
    p_run.add_argument("--fairness-bins", type=int, default=None, metavar="N")
    p_run.add_argument("--fairness-out", metavar="CSV")
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="sweep one parameter, one CSV row per point")
    _add_config_flags(p_sweep)
    p_sweep.add_argument("--param", required=True, choices=SWEEPABLE)
    p_sweep.add_argument("--values", required=True, metavar="V1,V2,...")
    p_sweep.add_argument("--allocators", metavar="gba,bca")
    p_sweep.add_argument("--policies", metavar="P1,P2")
    p_sweep.add_argument("--w-for", action="append", metavar="VALUE=W",
                         help="override W at a swept value (repeatable)")
    p_sweep.add_argument("--out", required=True, metavar="CSV")
    p_sweep.add_argument("--validate", action="store_true")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_fair = sub.add_parser("fairness", help="served fraction vs distance histogram")
    _add_config_flags(p_fair)
    p_fair.add_argument("--bins", type=int, required=True)
    p_fair.add_argument("--policies", metavar="P1,P2")
    p_fair.add_argument("--out", required=True, metavar="CSV")
    p_fair.add_argument("--validate", action="store_true")
    p_fair.set_defaults(func=_cmd_fairness)

    p_init = sub.add_parser("init-config", help="write a config file with current values")
    _add_config_flags(p_init)
    p_init.add_argument("--out", required=True, metavar="FILE")
    p_init.set_defaults(func=_cmd_init_config)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
