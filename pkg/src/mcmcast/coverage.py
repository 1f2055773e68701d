"""Partitioned maximum-coverage model and PRB allocation policies.

The allocation problem: each of C cells must stream a common multicast
service on exactly one of N PRBs per sub-frame.  U[c][j] is the set of
users that would decode the stream if cell c transmits on PRB j; a user
is served when at least one chosen (cell, PRB) pair covers it.  The goal
is to pick one PRB per cell maximizing the number of distinct served
users.  This is NP-hard (it embeds maximum coverage), so the module
provides:

  * solve_cga   -- centralized greedy over (cell, PRB) pairs; on random
                   workloads the oracle suite observes coverage within
                   (1 - 1/e) of optimal, though the one-PRB-per-cell
                   constraint admits rare adversarial instances where a
                   greedy pick spends a cell the optimum needs (worst
                   case 1/2, like any greedy under a partition constraint)
  * solve_dga   -- uncoordinated per-cell argmax
  * solve_sc    -- per-cell argmax on a single-connectivity instance
  * solve_mbsfn -- one common PRB index for every cell
  * solve_exact -- exhaustive search over all N^C allocations (oracle)

plus the reduction pair (reduce_mcp / map_solution) between plain
maximum coverage and the partitioned problem.

All solvers are pure functions of immutable instances and break argmax
ties toward the lowest (cell, prb) index, so outputs are deterministic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "CoverageInstance",
    "Allocation",
    "CoverageResult",
    "McpInstance",
    "CapExceededError",
    "EXACT_DEFAULT_CAP",
    "GREEDY_BOUND",
    "build_instance",
    "evaluate",
    "solve_cga",
    "solve_cga_trace",
    "solve_dga",
    "solve_sc",
    "solve_mbsfn",
    "solve_exact",
    "reduce_mcp",
    "map_solution",
    "random_instance",
    "instance_to_text",
    "instance_from_text",
]

EXACT_DEFAULT_CAP = 10_000_000

# Greedy-to-optimal ratio the oracle suite checks for: 1 - 1/e.  This is
# the classic cardinality-constrained greedy figure; under the
# one-PRB-per-cell constraint it holds empirically on random workloads
# while the universal guarantee is 1/2 (see the module docstring).
GREEDY_BOUND = 1.0 - 1.0 / np.e


class CapExceededError(RuntimeError):
    """Exhaustive search would enumerate more allocations than allowed."""


@dataclass(frozen=True)
class CoverageInstance:
    """One sub-frame's coverage structure.

    sets[c][j] is the frozenset of user ids (0..num_users-1) decodable if
    cell c streams on PRB j.  Empty sets are legal; the shape is always
    num_cells x num_prbs.
    """

    num_users: int
    num_cells: int
    num_prbs: int
    sets: tuple[tuple[frozenset[int], ...], ...]

    def __post_init__(self):
        if self.num_users < 0 or self.num_cells < 1 or self.num_prbs < 1:
            raise ValueError("need num_users >= 0, num_cells >= 1, num_prbs >= 1")
        if len(self.sets) != self.num_cells:
            raise ValueError(f"expected {self.num_cells} cell rows, got {len(self.sets)}")
        for c, row in enumerate(self.sets):
            if len(row) != self.num_prbs:
                raise ValueError(f"cell {c}: expected {self.num_prbs} PRB sets, got {len(row)}")
            for j, users in enumerate(row):
                if users and (min(users) < 0 or max(users) >= self.num_users):
                    raise ValueError(f"U[{c}][{j}] contains out-of-range user ids")


@dataclass(frozen=True)
class Allocation:
    """Chosen PRB index per cell; chosen[c] is the PRB for cell c."""

    chosen: tuple[int, ...]


@dataclass(frozen=True)
class CoverageResult:
    allocation: Allocation
    served: frozenset[int]

    @property
    def served_count(self) -> int:
        return len(self.served)


@dataclass(frozen=True)
class McpInstance:
    """Plain maximum coverage: pick at most k of the sets to cover the universe."""

    universe_size: int
    k: int
    sets: tuple[frozenset[int], ...]

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        for j, t in enumerate(self.sets):
            if t and (min(t) < 0 or max(t) >= self.universe_size):
                raise ValueError(f"set {j} contains out-of-range elements")


def build_instance(rates, required_rate, connectivity) -> CoverageInstance:
    """Turn a per-sub-frame rate matrix into a coverage instance.

    rates: array of shape (C, N, M) with the maximum decodable rate per
    (cell, prb, user).  connectivity: per-user eligible-cell sets, either
    a length-M sequence of cell-id collections or a boolean (M, C) mask.
    User k lands in U[c][j] iff cell c is in k's connectivity set and
    rates[c, j, k] >= required_rate (service at the boundary counts).
    """
    rates = np.asarray(rates)
    if rates.ndim != 3:
        raise ValueError(f"rates must have shape (C, N, M), got {rates.shape}")
    num_cells, num_prbs, num_users = rates.shape
    if required_rate < 0:
        raise ValueError("required_rate must be >= 0")

    elig = _eligibility_mask(connectivity, num_users, num_cells)
    ok = (rates >= required_rate) & elig.T[:, None, :]  # (C, N, M)
    sets = tuple(
        tuple(frozenset(np.flatnonzero(ok[c, j]).tolist()) for j in range(num_prbs))
        for c in range(num_cells)
    )
    return CoverageInstance(num_users, num_cells, num_prbs, sets)


def _eligibility_mask(connectivity, num_users: int, num_cells: int) -> np.ndarray:
    """Normalize connectivity input to a boolean (M, C) array."""
    if isinstance(connectivity, np.ndarray) and connectivity.dtype == bool:
        if connectivity.shape != (num_users, num_cells):
            raise ValueError(
                f"connectivity mask shape {connectivity.shape} does not match "
                f"(M={num_users}, C={num_cells}) from rates"
            )
        return connectivity
    if len(connectivity) != num_users:
        raise ValueError(
            f"connectivity covers {len(connectivity)} users, rates cover {num_users}"
        )
    elig = np.zeros((num_users, num_cells), dtype=bool)
    for k, cells in enumerate(connectivity):
        for c in cells:
            if not 0 <= c < num_cells:
                raise ValueError(f"user {k} lists unknown cell {c}")
            elig[k, c] = True
    return elig


def evaluate(inst: CoverageInstance, allocation: Allocation) -> CoverageResult:
    """Served set of an allocation, computed directly from the union."""
    if len(allocation.chosen) != inst.num_cells:
        raise ValueError("allocation does not assign exactly one PRB per cell")
    served: set[int] = set()
    for c, j in enumerate(allocation.chosen):
        if not 0 <= j < inst.num_prbs:
            raise ValueError(f"cell {c} chose PRB {j} out of range")
        served |= inst.sets[c][j]
    return CoverageResult(allocation, frozenset(served))


def solve_cga(inst: CoverageInstance) -> CoverageResult:
    """Centralized greedy: repeatedly commit the (cell, PRB) pair covering
    the most not-yet-served users, then retire that cell.

    Runs exactly num_cells iterations so the allocation is total even when
    the marginal gain drops to zero.  Ties go to the lowest (cell, prb).
    """
    result, _ = solve_cga_trace(inst)
    return result


def solve_cga_trace(inst: CoverageInstance) -> tuple[CoverageResult, tuple[int, ...]]:
    """Like solve_cga, also returning the cumulative covered count after
    each iteration (used to check the greedy's per-step guarantees)."""
    covered: set[int] = set()
    chosen: dict[int, int] = {}
    remaining = list(range(inst.num_cells))
    history = []
    for _ in range(inst.num_cells):
        best_gain = -1
        best_c = best_j = -1
        for c in remaining:
            for j in range(inst.num_prbs):
                gain = len(inst.sets[c][j] - covered)
                if gain > best_gain:
                    best_gain, best_c, best_j = gain, c, j
        chosen[best_c] = best_j
        covered |= inst.sets[best_c][best_j]
        remaining.remove(best_c)
        history.append(len(covered))
    allocation = Allocation(tuple(chosen[c] for c in range(inst.num_cells)))
    return CoverageResult(allocation, frozenset(covered)), tuple(history)


def solve_dga(
    inst: CoverageInstance,
    count: str = "connected",
    primary_cell: Sequence[int] | None = None,
) -> CoverageResult:
    """Distributed allocation: every cell independently picks the PRB whose
    set covers the most of "its" users; service is still credited globally.

    count="connected" scores each cell on all users appearing in its sets
    (a multi-connected user counts at every cell that can decode it).
    count="primary" scores a user only at its home cell, which requires
    the per-user primary_cell map.
    """
    if count not in ("connected", "primary"):
        raise ValueError(f"unknown count mode {count!r}")
    if count == "primary" and primary_cell is None:
        raise ValueError("count='primary' requires primary_cell")

    chosen = []
    for c in range(inst.num_cells):
        if count == "connected":
            scores = [len(inst.sets[c][j]) for j in range(inst.num_prbs)]
        else:
            own = {k for k in range(inst.num_users) if primary_cell[k] == c}
            scores = [len(inst.sets[c][j] & own) for j in range(inst.num_prbs)]
        chosen.append(int(np.argmax(scores)))  # argmax keeps the lowest index on ties
    return evaluate(inst, Allocation(tuple(chosen)))


def solve_sc(inst: CoverageInstance) -> CoverageResult:
    """Single-connectivity baseline: per-cell argmax on an instance whose
    sets were built with each user eligible only at its primary cell."""
    return solve_dga(inst, count="connected")


def solve_mbsfn(inst: CoverageInstance) -> CoverageResult:
    """Single-frequency baseline: all cells transmit on the one PRB index
    whose system-wide union covers the most users."""
    best_j, best_cov = 0, -1
    for j in range(inst.num_prbs):
        union: set[int] = set()
        for c in range(inst.num_cells):
            union |= inst.sets[c][j]
        if len(union) > best_cov:
            best_j, best_cov = j, len(union)
    return evaluate(inst, Allocation((best_j,) * inst.num_cells))


def solve_exact(inst: CoverageInstance, cap: int = EXACT_DEFAULT_CAP) -> CoverageResult:
    """Exhaustive oracle over all num_prbs ** num_cells allocations.

    Refuses instances above `cap` candidate allocations.  The first
    maximizer in lexicographic allocation order wins, which is the
    lowest-(cell, prb) tie-break.
    """
    candidates = inst.num_prbs ** inst.num_cells
    if candidates > cap:
        raise CapExceededError(
            f"{inst.num_prbs}^{inst.num_cells} = {candidates} allocations exceeds cap {cap}"
        )
    masks = [
        [_to_mask(inst.sets[c][j]) for j in range(inst.num_prbs)]
        for c in range(inst.num_cells)
    ]
    best_count = -1
    best_choice: tuple[int, ...] = ()
    for choice in itertools.product(range(inst.num_prbs), repeat=inst.num_cells):
        union = 0
        for c, j in enumerate(choice):
            union |= masks[c][j]
        count = union.bit_count()
        if count > best_count:
            best_count, best_choice = count, choice
    return evaluate(inst, Allocation(best_choice))


def _to_mask(users: frozenset[int]) -> int:
    mask = 0
    for u in users:
        mask |= 1 << u
    return mask


def reduce_mcp(mcp: McpInstance) -> CoverageInstance:
    """Embed a plain maximum-coverage instance: k cells, one PRB per input
    set, and every cell sees the identical sub-collection."""
    row = tuple(mcp.sets)
    return CoverageInstance(
        num_users=mcp.universe_size,
        num_cells=mcp.k,
        num_prbs=len(mcp.sets),
        sets=tuple(row for _ in range(mcp.k)),
    )


def map_solution(allocation: Allocation) -> list[int]:
    """Map an allocation on a reduced instance back to a maximum-coverage
    solution: the deduplicated PRB indices are the chosen set indices."""
    return sorted(set(allocation.chosen))


def random_instance(
    rng: np.random.Generator,
    max_users: int = 12,
    max_cells: int = 4,
    max_prbs: int = 4,
) -> CoverageInstance:
    """Random instance for oracle checks; membership density varies per draw."""
    m = int(rng.integers(1, max_users + 1))
    c = int(rng.integers(1, max_cells + 1))
    n = int(rng.integers(1, max_prbs + 1))
    density = rng.uniform(0.1, 0.9)
    member = rng.random((c, n, m)) < density
    sets = tuple(
        tuple(frozenset(np.flatnonzero(member[ci, ji]).tolist()) for ji in range(n))
        for ci in range(c)
    )
    return CoverageInstance(m, c, n, sets)


def instance_to_text(inst: CoverageInstance) -> str:
    """Line-oriented dump: header "M C N", then one "c j : u1 u2 ..." line
    per (cell, prb) with users ascending."""
    lines = [f"{inst.num_users} {inst.num_cells} {inst.num_prbs}"]
    for c in range(inst.num_cells):
        for j in range(inst.num_prbs):
            users = " ".join(str(u) for u in sorted(inst.sets[c][j]))
            lines.append(f"{c} {j} : {users}".rstrip())
    return "\n".join(lines) + "\n"


def instance_from_text(text: str) -> CoverageInstance:
    """Parse the instance_to_text format; missing (c, j) lines mean empty sets."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise ValueError("empty instance text")
    try:
        m, c, n = (int(tok) for tok in lines[0].split())
    except ValueError as exc:
        raise ValueError(f"bad header line {lines[0]!r}") from exc
    table: dict[tuple[int, int], frozenset[int]] = {}
    for ln in lines[1:]:
        head, _, tail = ln.partition(":")
        try:
            ci, ji = (int(tok) for tok in head.split())
            users = frozenset(int(tok) for tok in tail.split())
        except ValueError as exc:
            raise ValueError(f"bad set line {ln!r}") from exc
        if not (0 <= ci < c and 0 <= ji < n):
            raise ValueError(f"set line {ln!r} out of range for C={c}, N={n}")
        table[ci, ji] = users
    sets = tuple(
        tuple(table.get((ci, ji), frozenset()) for ji in range(n)) for ci in range(c)
    )
    return CoverageInstance(m, c, n, sets)
