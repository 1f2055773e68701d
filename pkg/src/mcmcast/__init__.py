"""Multi-connectivity multicast PRB allocation: solvers, channel model,
seven-cell scenario builder, trace-driven traffic, and simulation engine."""

from .channel import (
    DEFAULT_RATE_TABLE,
    ChannelModel,
    ChannelParams,
    load_rate_table,
    path_loss,
    rate_from_snr,
    save_rate_table,
    snr,
)
from .coverage import (
    EXACT_DEFAULT_CAP,
    GREEDY_BOUND,
    Allocation,
    CapExceededError,
    CoverageInstance,
    CoverageResult,
    McpInstance,
    build_instance,
    evaluate,
    instance_from_text,
    instance_to_text,
    map_solution,
    random_instance,
    reduce_mcp,
    solve_cga,
    solve_cga_trace,
    solve_dga,
    solve_exact,
    solve_mbsfn,
    solve_sc,
)
from .engine import (
    POLICIES,
    Metrics,
    RunOutput,
    SimConfig,
    compare_policies,
    log_to_csv,
    metrics_from_log,
    paired_one_sided_pvalue,
    run,
    summary_dict,
    sweep,
    sweep_to_csv,
)
from .topology import (
    NetworkScenario,
    build_hex7,
    connectivity_mode,
    scenario_from_text,
    scenario_to_text,
)
from .traffic import (
    TraceParseError,
    TraceSchedule,
    parse_trace,
    schedule_constant,
    schedule_from_csv,
    schedule_from_trace,
    schedule_to_csv,
    write_synthetic_trace,
)

__version__ = "0.1.0"

__all__ = [
    "Allocation",
    "CapExceededError",
    "ChannelModel",
    "ChannelParams",
    "CoverageInstance",
    "CoverageResult",
    "DEFAULT_RATE_TABLE",
    "EXACT_DEFAULT_CAP",
    "GREEDY_BOUND",
    "McpInstance",
    "Metrics",
    "NetworkScenario",
    "POLICIES",
    "RunOutput",
    "SimConfig",
    "TraceParseError",
    "TraceSchedule",
    "build_hex7",
    "build_instance",
    "compare_policies",
    "connectivity_mode",
    "evaluate",
    "instance_from_text",
    "instance_to_text",
    "load_rate_table",
    "log_to_csv",
    "map_solution",
    "metrics_from_log",
    "paired_one_sided_pvalue",
    "parse_trace",
    "path_loss",
    "random_instance",
    "rate_from_snr",
    "reduce_mcp",
    "run",
    "save_rate_table",
    "scenario_from_text",
    "scenario_to_text",
    "schedule_constant",
    "schedule_from_csv",
    "schedule_from_trace",
    "schedule_to_csv",
    "snr",
    "solve_cga",
    "solve_cga_trace",
    "solve_dga",
    "solve_exact",
    "solve_mbsfn",
    "solve_sc",
    "summary_dict",
    "sweep",
    "sweep_to_csv",
    "write_synthetic_trace",
]
