"""Command-line entry point: named experiment presets plus a brute-force
oracle self-check.

Exit codes: 0 success, 1 oracle-check bound violated, 2 bad configuration,
3 trace parse failure, 4 exact-search cap exceeded.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .coverage import (
    CapExceededError,
    GREEDY_BOUND,
    random_instance,
    solve_cga,
    solve_exact,
)
from .engine import (
    POLICIES,
    SimConfig,
    compare_policies,
    log_to_csv,
    summary_to_json,
    sweep,
    sweep_to_csv,
)
from .traffic import TraceParseError, write_synthetic_trace

__all__ = ["main", "build_parser", "PRESETS"]

USER_SWEEP = (5, 10, 20, 40)
RADIUS_SWEEP = (250.0, 500.0, 750.0, 1000.0)

# Each preset bundles default overrides; explicit flags still win.
PRESETS: dict[str, dict] = {
    "fig4_dist_vs_central": {
        "kind": "compare",
        "policies": ("cga", "dga"),
        "overrides": {"radius_m": 500.0, "horizon": 1000, "num_drops": 5},
    },
    "fig5_packets_sweep": {
        "kind": "sweep",
        "policies": ("cga", "sc"),
        "overrides": {"radius_m": 1000.0, "horizon": 500, "num_drops": 3},
    },
    "fig6_unserved_sweep": {
        "kind": "sweep",
        "policies": ("cga", "sc"),
        "overrides": {"radius_m": 1000.0, "horizon": 500, "num_drops": 3},
    },
    "fig7_trace_mc_vs_sc": {
        "kind": "compare",
        "policies": ("cga", "sc"),
        "overrides": {"radius_m": 1000.0, "horizon": 1000, "num_drops": 3},
        "synthetic_trace": True,
    },
    "fig8_mbsfn_vs_mc": {
        "kind": "compare",
        "policies": ("cga", "mbsfn"),
        "overrides": {"radius_m": 1000.0, "horizon": 1000, "num_drops": 3},
    },
    "custom": {"kind": "run", "overrides": {}},
}

# flag/config-file key -> (SimConfig field, parser)
_FIELDS: dict[str, tuple[str, type]] = {
    "policy": ("policy", str),
    "seed": ("seed", int),
    "ues": ("ues_per_cell", int),
    "radius": ("radius_m", float),
    "subframes": ("horizon", int),
    "trace": ("trace_path", str),
    "fps": ("fps", float),
    "rate": ("rate_bits", float),
    "edge_threshold": ("edge_threshold", float),
    "dga_count": ("dga_count", str),
    "drops": ("num_drops", int),
    "prbs": ("num_prbs", int),
    "burst": ("burst", bool),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mcmcast",
        description="Multi-connectivity multicast allocation experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment preset")
    run.add_argument("--preset", default="custom", choices=sorted(PRESETS))
    run.add_argument("--policy", choices=POLICIES)
    run.add_argument("--seed", type=int)
    run.add_argument("--ues", type=int, help="UEs per cell")
    run.add_argument("--radius", type=float, help="cell radius in meters")
    run.add_argument("--subframes", type=int, help="horizon in sub-frames")
    run.add_argument("--trace", help="video trace file path")
    run.add_argument("--fps", type=float)
    run.add_argument("--rate", type=float, help="constant bits per sub-frame")
    run.add_argument("--edge-threshold", type=float, dest="edge_threshold")
    run.add_argument("--dga-count", choices=("connected", "primary"),
                     dest="dga_count")
    run.add_argument("--out", default="out", help="output directory")
    run.add_argument("--drops", type=int, help="independent UE placements")
    run.add_argument("--prbs", type=int, help="PRBs per cell")
    run.add_argument("--burst", action="store_true", default=None,
                     help="deliver each video frame in its first sub-frame")
    run.add_argument("--config", help="flat key=value config file")

    oracle = sub.add_parser("oracle-check",
                            help="greedy-vs-exact bound self-check")
    oracle.add_argument("--instances", type=int, default=200)
    oracle.add_argument("--max-users", type=int, default=12)
    oracle.add_argument("--max-cells", type=int, default=4)
    oracle.add_argument("--max-prbs", type=int, default=4)
    oracle.add_argument("--seed", type=int, default=1)
    return parser


def _parse_config_file(path: str) -> dict[str, str]:
    pairs: dict[str, str] = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
        pairs[key.strip().replace("-", "_")] = value.strip()
    return pairs


def _coerce(key: str, value: str):
    field, typ = _FIELDS[key]
    if typ is bool:
        if value.lower() in ("1", "true", "yes", "on"):
            return field, True
        if value.lower() in ("0", "false", "no", "off"):
            return field, False
        raise ValueError(f"bad boolean for {key}: {value!r}")
    return field, typ(value)


def _build_config(args: argparse.Namespace) -> tuple[SimConfig, dict]:
    preset = PRESETS[args.preset]
    overrides: dict = dict(preset.get("overrides", {}))
    if args.config:
        for key, value in _parse_config_file(args.config).items():
            if key not in _FIELDS:
                raise ValueError(f"unknown config key {key!r}")
            field, parsed = _coerce(key, value)
            overrides[field] = parsed
    for key, (field, _) in _FIELDS.items():
        value = getattr(args, key, None)
        if value is not None:
            overrides[field] = value
    return replace(SimConfig(), **overrides), preset


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _cmd_run(args: argparse.Namespace) -> int:
    config, preset = _build_config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    if preset.get("synthetic_trace") and config.trace_path is None:
        trace = write_synthetic_trace(str(out / "trace.txt"), seed=config.seed)
        config = replace(config, trace_path=trace)

    policies = preset.get("policies", (config.policy,))
    if args.policy is not None:
        policies = (args.policy,)

    if preset["kind"] == "sweep":
        users_table = sweep(config, "users_per_cell", list(USER_SWEEP), policies)
        radius_table = sweep(config, "radius", list(RADIUS_SWEEP), policies)
        _write(out / "sweep_users.csv",
               sweep_to_csv("users_per_cell", users_table))
        _write(out / "sweep_radius.csv", sweep_to_csv("radius", radius_table))
        _write(out / "summary.json", summary_to_json(users_table[-1][1]))
        print(f"{args.preset}: policies={','.join(policies)} "
              f"users={list(USER_SWEEP)} radius={[int(r) for r in RADIUS_SWEEP]} "
              f"-> {out}/sweep_users.csv, {out}/sweep_radius.csv")
        return 0

    output = compare_policies(config, policies)
    for policy in policies:
        rows = [r for r in output.log_rows if r[2] == policy]
        text = log_to_csv(replace(output, log_rows=tuple(rows)))
        _write(out / f"log_{policy}.csv", text)
    _write(out / "summary.json", summary_to_json(output))
    means = " ".join(
        f"{p}={output.metrics[p].avg_packets_delivered:.2f}" for p in policies
    )
    print(f"{args.preset}: seed={config.seed} drops={config.num_drops} "
          f"T={config.horizon} mean_served {means} -> {out}/")
    return 0


def _cmd_oracle_check(args: argparse.Namespace) -> int:
    rng = np.random.default_rng(args.seed)
    worst = np.inf
    for _ in range(args.instances):
        inst = random_instance(
            rng, max_users=args.max_users, max_cells=args.max_cells,
            max_prbs=args.max_prbs,
        )
        opt = solve_exact(inst).served_count
        greedy = solve_cga(inst).served_count
        if opt:
            worst = min(worst, greedy / opt)
    ok = worst >= GREEDY_BOUND
    print(f"oracle-check: instances={args.instances} "
          f"min_ratio={worst:.4f} bound={GREEDY_BOUND:.4f} "
          f"{'PASS' if ok else 'FAIL'}")
    return 0 if ok else 1


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_oracle_check(args)
    except TraceParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except CapExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
