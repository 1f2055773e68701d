"""Video traffic models: trace-file parsing and per-sub-frame bit schedules.

Trace lines follow the common frame-size listing used by public video
trace archives: ``index frame_type time size_bytes`` with ``#`` comment
lines.  Only the first and last columns are consumed — sizes become bits
and the frame stream is spread over the sub-frames of each frame period.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

__all__ = [
    "TraceParseError", "TraceSchedule", "parse_trace", "schedule_from_trace",
    "schedule_constant", "schedule_to_csv", "schedule_from_csv",
    "write_synthetic_trace",
]


class TraceParseError(ValueError):
    """Raised when a trace file cannot be interpreted."""


@dataclass(frozen=True)
class TraceSchedule:
    """Bits demanded in each sub-frame of the session."""

    subframe_s: float
    rates: tuple[float, ...]
    source: str = "constant"

    def __len__(self) -> int:
        return len(self.rates)

    @property
    def total_bits(self) -> float:
        return float(sum(self.rates))


def parse_trace(path: str) -> list[tuple[int, float]]:
    """Read (frame_index, size_bits) pairs from a trace file."""
    frames: list[tuple[int, float]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            tokens = line.split()
            if len(tokens) < 2:
                raise TraceParseError(
                    f"{path}:{lineno}: expected 'index ... size_bytes', got {line!r}"
                )
            try:
                index = int(tokens[0])
                size_bytes = float(tokens[-1])
            except ValueError as exc:
                raise TraceParseError(f"{path}:{lineno}: {exc}") from exc
            if size_bytes < 0:
                raise TraceParseError(f"{path}:{lineno}: negative frame size")
            frames.append((index, round(size_bytes * 8)))
    if not frames:
        raise TraceParseError(f"{path}: no frames found")
    return frames


def schedule_from_trace(
    frames: list[tuple[int, float]],
    fps: float,
    subframe_s: float = 1e-3,
    burst: bool = False,
    source: str = "trace",
) -> TraceSchedule:
    """Spread each frame's bits over the sub-frames of its frame period.

    With ``burst`` the whole frame lands on the first sub-frame of the
    period; otherwise bits are split evenly with the remainder on the
    last sub-frame.  Total bits are conserved exactly either way.
    """
    if fps <= 0:
        raise ValueError("fps must be > 0")
    if subframe_s <= 0:
        raise ValueError("subframe_s must be > 0")
    n_sub = max(1, round(1.0 / (fps * subframe_s)))
    rates: list[float] = []
    for _, bits in frames:
        if burst:
            rates.append(float(bits))
            rates.extend([0.0] * (n_sub - 1))
        else:
            share = float(bits) / n_sub
            chunk = [share] * n_sub
            chunk[-1] = float(bits) - share * (n_sub - 1)
            rates.extend(chunk)
    return TraceSchedule(subframe_s=subframe_s, rates=tuple(rates), source=source)


def schedule_constant(
    rate_bits: float, length: int, subframe_s: float = 1e-3
) -> TraceSchedule:
    if rate_bits < 0:
        raise ValueError("rate_bits must be >= 0")
    if length <= 0:
        raise ValueError("length must be > 0")
    return TraceSchedule(
        subframe_s=subframe_s,
        rates=(float(rate_bits),) * length,
        source="constant",
    )


def schedule_to_csv(schedule: TraceSchedule) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t", "R_bits"])
    for t, r in enumerate(schedule.rates):
        writer.writerow([t, f"{r:.6f}"])
    return buf.getvalue()


def schedule_from_csv(text: str, subframe_s: float = 1e-3) -> TraceSchedule:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != ["t", "R_bits"]:
        raise TraceParseError(f"bad schedule header: {header!r}")
    rates: list[float] = []
    for row in reader:
        if not row:
            continue
        t, r = int(row[0]), float(row[1])
        if t != len(rates):
            raise TraceParseError(f"non-contiguous sub-frame index {t}")
        rates.append(r)
    if not rates:
        raise TraceParseError("schedule has no rows")
    return TraceSchedule(subframe_s=subframe_s, rates=tuple(rates), source="csv")


def write_synthetic_trace(
    path: str,
    num_frames: int = 300,
    fps: float = 30.0,
    mean_frame_bytes: float = 1200.0,
    gop: int = 12,
    seed: int = 0,
) -> str:
    """Write a deterministic trace file shaped like a GOP-structured
    encode: every ``gop``-th frame is an I-frame roughly 3x the size of
    the surrounding P-frames."""
    rng = np.random.default_rng(seed)
    # Per-GOP budget: one I frame at 3x the P size keeps the overall mean.
    p_mean = mean_frame_bytes * gop / (gop + 2)
    lines = ["# synthetic video trace", "# index type time size_bytes"]
    for i in range(num_frames):
        is_i = i % gop == 0
        mean = 3.0 * p_mean if is_i else p_mean
        size = max(1, int(round(rng.gamma(8.0, mean / 8.0))))
        lines.append(f"{i} {'I' if is_i else 'P'} {i / fps:.4f} {size}")
    text = "\n".join(lines) + "\n"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return path
