"""Sub-frame simulation loop and experiment drivers.

Each drop places UEs afresh and draws its own shadowing; within a drop
the loop per sub-frame is: sample per-PRB rates → build the coverage
instance → run the allocation policy → record who was served.  When
several policies are compared they see the *same* rate draws (common
random numbers), so observed differences are policy-only.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field, replace

import numpy as np
from scipy import stats

from .channel import ChannelModel, ChannelParams
from .coverage import (
    EXACT_DEFAULT_CAP,
    CapExceededError,
    CoverageResult,
    build_instance,
    solve_cga,
    solve_dga,
    solve_exact,
    solve_mbsfn,
    solve_sc,
)
from .topology import MC, SC, build_hex7, connectivity_mode
from .traffic import (
    TraceSchedule,
    parse_trace,
    schedule_constant,
    schedule_from_trace,
)

__all__ = [
    "POLICIES", "SimConfig", "Metrics", "RunOutput",
    "run", "compare_policies", "sweep",
    "paired_one_sided_pvalue", "log_to_csv", "metrics_from_log",
    "sweep_to_csv", "summary_dict",
]

POLICIES = ("cga", "dga", "sc", "mbsfn", "exact")


@dataclass(frozen=True)
class SimConfig:
    """Everything one experiment needs; immutable so runs are replayable."""

    ues_per_cell: int = 10
    radius_m: float = 250.0
    edge_threshold: float = 0.8
    num_prbs: int = 10
    policy: str = "cga"
    rate_bits: float = 400.0
    horizon: int = 1000
    trace_path: str | None = None
    fps: float = 30.0
    burst: bool = False
    seed: int = 1
    num_drops: int = 10
    dga_count: str = "connected"
    channel: ChannelParams = field(default_factory=ChannelParams)
    exact_cap: int = EXACT_DEFAULT_CAP
    log_served_ids: bool = False


def _validate(config: SimConfig, policies: tuple[str, ...]) -> None:
    if config.horizon < 1:
        raise ValueError("horizon must be >= 1")
    if config.num_drops < 1:
        raise ValueError("num_drops must be >= 1")
    if config.ues_per_cell < 1:
        raise ValueError("ues_per_cell must be >= 1")
    if config.num_prbs < 1:
        raise ValueError("num_prbs must be >= 1")
    if config.dga_count not in ("connected", "primary"):
        raise ValueError(f"unknown dga_count {config.dga_count!r}")
    for policy in policies:
        if policy not in POLICIES:
            raise ValueError(f"unknown policy {policy!r}")
    if "exact" in policies and config.num_prbs ** 7 > config.exact_cap:
        raise CapExceededError(
            f"exact search space {config.num_prbs}^7 exceeds cap {config.exact_cap}"
        )


@dataclass(frozen=True)
class Metrics:
    """Aggregates over a (num_drops, T) grid of per-sub-frame served counts."""

    policy: str
    served_counts: np.ndarray     # (num_drops, T) int
    num_users: int
    num_cells: int

    @property
    def avg_packets_delivered(self) -> float:
        return float(self.served_counts.mean())

    @property
    def per_ue_service_ratio(self) -> float:
        return self.avg_packets_delivered / self.num_users

    @property
    def avg_unserved_per_cell(self) -> float:
        return (self.num_users - self.avg_packets_delivered) / self.num_cells

    @property
    def drop_means(self) -> np.ndarray:
        return self.served_counts.mean(axis=1)

    @property
    def ci95_halfwidth(self) -> float:
        d = len(self.drop_means)
        if d < 2:
            return 0.0
        sem = self.drop_means.std(ddof=1) / np.sqrt(d)
        return float(stats.t.ppf(0.975, d - 1) * sem)

    def to_dict(self) -> dict:
        return {
            "policy": self.policy,
            "num_users": self.num_users,
            "num_cells": self.num_cells,
            "avg_packets_delivered": round(self.avg_packets_delivered, 6),
            "per_ue_service_ratio": round(self.per_ue_service_ratio, 6),
            "avg_unserved_per_cell": round(self.avg_unserved_per_cell, 6),
            "ci95_halfwidth": round(self.ci95_halfwidth, 6),
            "num_drops": int(self.served_counts.shape[0]),
            "horizon": int(self.served_counts.shape[1]),
        }


@dataclass(frozen=True)
class RunOutput:
    config: SimConfig
    metrics: dict[str, Metrics]
    # rows: (drop, t, policy, served_count, served_ids or "")
    log_rows: tuple[tuple[int, int, str, int, str], ...]


def _build_schedule(config: SimConfig) -> TraceSchedule:
    if config.trace_path:
        frames = parse_trace(config.trace_path)
        return schedule_from_trace(
            frames, config.fps, config.channel.subframe_s, config.burst
        )
    return schedule_constant(
        config.rate_bits, config.horizon, config.channel.subframe_s
    )


def _solve(policy, inst, config, scenario) -> CoverageResult:
    if policy == "cga":
        return solve_cga(inst)
    if policy == "dga":
        return solve_dga(
            inst, count=config.dga_count, primary_cell=scenario.primary_cell
        )
    if policy == "sc":
        return solve_sc(inst)
    if policy == "mbsfn":
        return solve_mbsfn(inst)
    if policy == "exact":
        return solve_exact(inst, cap=config.exact_cap)
    raise ValueError(f"unknown policy {policy!r}")


def compare_policies(
    config: SimConfig, policies: tuple[str, ...] | list[str]
) -> RunOutput:
    """Evaluate every policy on the same channel realizations."""
    policies = tuple(policies)
    _validate(config, policies)
    schedule = _build_schedule(config)
    horizon = config.horizon
    required = [schedule.rates[t % len(schedule.rates)] for t in range(horizon)]

    seeds = np.random.SeedSequence(config.seed).spawn(config.num_drops)
    counts = {p: np.zeros((config.num_drops, horizon), dtype=int) for p in policies}
    log_rows: list[tuple[int, int, str, int, str]] = []

    for d, seed in enumerate(seeds):
        rng = np.random.default_rng(seed)
        scenario = build_hex7(
            config.radius_m, config.ues_per_cell, config.edge_threshold, rng
        )
        scen_sc = connectivity_mode(scenario, SC)
        model = ChannelModel(config.channel, scenario, config.num_prbs)
        shadow = model.draw_shadowing(rng)
        for t in range(horizon):
            rates = model.sample_subframe(shadow, rng)
            for policy in policies:
                conn = (scen_sc if policy == "sc" else scenario).connectivity
                inst = build_instance(rates, required[t], conn)
                result = _solve(policy, inst, config, scenario)
                counts[policy][d, t] = result.served_count
                ids = ""
                if config.log_served_ids:
                    ids = ";".join(str(u) for u in sorted(result.served))
                log_rows.append((d, t, policy, result.served_count, ids))

    num_users = 7 * config.ues_per_cell
    metrics = {
        p: Metrics(
            policy=p, served_counts=_frozen(counts[p]),
            num_users=num_users, num_cells=7,
        )
        for p in policies
    }
    return RunOutput(config=config, metrics=metrics, log_rows=tuple(log_rows))


def run(config: SimConfig) -> RunOutput:
    return compare_policies(config, (config.policy,))


def sweep(
    config: SimConfig,
    axis: str,
    values: list[float] | list[int],
    policies: tuple[str, ...] | None = None,
) -> list[tuple[float, RunOutput]]:
    """Independent runs per value.  The base seed is reused so sweep points
    share underlying draws where shapes allow, smoothing the trend."""
    if axis not in ("users_per_cell", "radius"):
        raise ValueError(f"unknown sweep axis {axis!r}")
    if not values:
        raise ValueError("sweep needs at least one value")
    policies = policies or (config.policy,)
    table = []
    for value in values:
        if axis == "users_per_cell":
            cfg = replace(config, ues_per_cell=int(value))
        else:
            cfg = replace(config, radius_m=float(value))
        table.append((float(value), compare_policies(cfg, policies)))
    return table


def paired_one_sided_pvalue(a: Metrics, b: Metrics) -> float:
    """P-value for mean(a) > mean(b) with (drop, sub-frame) cells paired."""
    x = a.served_counts.ravel().astype(float)
    y = b.served_counts.ravel().astype(float)
    if np.allclose(x, y):
        return 1.0
    return float(stats.ttest_rel(x, y, alternative="greater").pvalue)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


# ---------------------------------------------------------------- artifacts

def log_to_csv(output: RunOutput) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["drop", "t", "policy", "served_count", "served_ids"])
    for row in output.log_rows:
        writer.writerow(row)
    return buf.getvalue()


def metrics_from_log(
    text: str, num_users: int, num_cells: int = 7
) -> dict[str, Metrics]:
    """Rebuild Metrics from a raw log CSV; must match the originals exactly."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if header[:4] != ["drop", "t", "policy", "served_count"]:
        raise ValueError(f"bad log header: {header!r}")
    cells: dict[str, dict[tuple[int, int], int]] = {}
    for row in reader:
        if not row:
            continue
        d, t, policy, count = int(row[0]), int(row[1]), row[2], int(row[3])
        cells.setdefault(policy, {})[(d, t)] = count
    out = {}
    for policy, grid in cells.items():
        drops = 1 + max(d for d, _ in grid)
        horizon = 1 + max(t for _, t in grid)
        arr = np.zeros((drops, horizon), dtype=int)
        for (d, t), count in grid.items():
            arr[d, t] = count
        out[policy] = Metrics(
            policy=policy, served_counts=_frozen(arr),
            num_users=num_users, num_cells=num_cells,
        )
    return out


def sweep_to_csv(axis: str, table: list[tuple[float, RunOutput]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([
        axis, "policy", "avg_packets_delivered", "per_ue_service_ratio",
        "avg_unserved_per_cell", "ci95_halfwidth",
    ])
    for value, output in table:
        for policy in sorted(output.metrics):
            m = output.metrics[policy]
            writer.writerow([
                f"{value:.6f}", policy,
                f"{m.avg_packets_delivered:.6f}",
                f"{m.per_ue_service_ratio:.6f}",
                f"{m.avg_unserved_per_cell:.6f}",
                f"{m.ci95_halfwidth:.6f}",
            ])
    return buf.getvalue()


def summary_dict(output: RunOutput) -> dict:
    config = asdict(output.config)
    summary = {
        "config": config,
        "metrics": {p: m.to_dict() for p, m in sorted(output.metrics.items())},
    }
    policies = sorted(output.metrics)
    if len(policies) >= 2:
        pvals = {}
        for i, a in enumerate(policies):
            for b in policies[i + 1:]:
                key = f"{a}_gt_{b}"
                pvals[key] = round(
                    paired_one_sided_pvalue(
                        output.metrics[a], output.metrics[b]
                    ), 6,
                )
        summary["paired_pvalues"] = pvals
    return summary


def summary_to_json(output: RunOutput) -> str:
    return json.dumps(summary_dict(output), sort_keys=True, indent=2) + "\n"
