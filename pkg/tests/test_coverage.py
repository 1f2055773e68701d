"""Solver correctness: golden two-cell fixture, greedy bound vs. the
exhaustive oracle, reduction round-trips, and structural properties."""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mcmcast.coverage import (
    GREEDY_BOUND,
    Allocation,
    CapExceededError,
    CoverageInstance,
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

# Two cells, two PRBs, six users.  Cell 0 can reach users {0,1} on PRB 0
# and {1,2,3} on PRB 1; cell 1 reaches nobody on PRB 0 and {2,3,4,5} on
# PRB 1.  A local per-cell argmax strands user 0; coordination does not.
FIXTURE_SETS = (
    (frozenset({0, 1}), frozenset({1, 2, 3})),
    (frozenset(), frozenset({2, 3, 4, 5})),
)
FIXTURE = CoverageInstance(num_users=6, num_cells=2, num_prbs=2, sets=FIXTURE_SETS)


def fixture_rates() -> np.ndarray:
    """A (C, N, M) rate matrix whose >=2.0 entries realize FIXTURE_SETS."""
    r = np.full((2, 2, 6), 0.5)
    for c, j, users in [(0, 0, {0, 1}), (0, 1, {1, 2, 3}), (1, 1, {2, 3, 4, 5})]:
        for k in users:
            r[c, j, k] = 2.0 + 0.1 * k
    return r


FIXTURE_CONN = [{0, 1}, {0}, {0, 1}, {0, 1}, {1}, {1}]


class TestGoldenFixture:
    def test_cga_serves_everyone(self):
        result = solve_cga(FIXTURE)
        assert result.allocation.chosen == (0, 1)
        assert result.served == frozenset(range(6))

    def test_dga_strands_the_overlap_user(self):
        result = solve_dga(FIXTURE)
        assert result.allocation.chosen == (1, 1)
        assert result.served == frozenset({1, 2, 3, 4, 5})
        assert 0 not in result.served

    def test_mbsfn_single_common_prb(self):
        result = solve_mbsfn(FIXTURE)
        assert result.allocation.chosen == (1, 1)
        assert result.served_count == 5

    def test_exact_matches_cga_here(self):
        assert solve_exact(FIXTURE).served_count == 6

    def test_single_connectivity_variant_serves_five(self):
        # Restrict each user to its nearest cell (0 for users 0-3, 1 for 4-5).
        conn = [{0}, {0}, {0}, {0}, {1}, {1}]
        inst = build_instance(fixture_rates(), 2.0, conn)
        assert solve_sc(inst).served_count == 5

    def test_build_instance_reproduces_fixture(self):
        inst = build_instance(fixture_rates(), 2.0, FIXTURE_CONN)
        assert inst == FIXTURE


class TestBuildInstance:
    def test_threshold_is_inclusive(self):
        rates = np.array([[[1.0, 2.0]]])
        inst = build_instance(rates, 2.0, [{0}, {0}])
        assert inst.sets == ((frozenset({1}),),)

    def test_connectivity_mask_filters_users(self):
        rates = np.full((2, 1, 2), 9.0)
        inst = build_instance(rates, 1.0, [{0}, {1}])
        assert inst.sets == ((frozenset({0}),), (frozenset({1}),))

    def test_boolean_mask_accepted(self):
        rates = np.full((2, 1, 2), 9.0)
        mask = np.array([[True, False], [False, True]])  # (M, C)
        inst = build_instance(rates, 1.0, mask)
        assert inst.sets == ((frozenset({0}),), (frozenset({1}),))

    def test_zero_required_rate_serves_all_connected(self):
        rates = np.zeros((1, 1, 3))
        inst = build_instance(rates, 0.0, [{0}, {0}, {0}])
        assert inst.sets[0][0] == frozenset({0, 1, 2})

    def test_negative_required_rate_rejected(self):
        with pytest.raises(ValueError):
            build_instance(np.zeros((1, 1, 1)), -1.0, [{0}])

    def test_bad_shape_rejected(self):
        with pytest.raises(ValueError):
            build_instance(np.zeros((2, 2)), 1.0, [{0}])


class TestValidation:
    def test_instance_shape_checked(self):
        with pytest.raises(ValueError):
            CoverageInstance(num_users=2, num_cells=2, num_prbs=1,
                             sets=((frozenset(),),))

    def test_user_ids_in_range(self):
        with pytest.raises(ValueError):
            CoverageInstance(num_users=2, num_cells=1, num_prbs=1,
                             sets=((frozenset({5}),),))

    def test_allocation_length_checked(self):
        with pytest.raises(ValueError):
            evaluate(FIXTURE, Allocation(chosen=(0,)))

    def test_allocation_prb_range_checked(self):
        with pytest.raises(ValueError):
            evaluate(FIXTURE, Allocation(chosen=(0, 7)))


class TestGreedyVersusExact:
    def test_bound_holds_on_random_instances(self):
        rng = np.random.default_rng(42)
        for _ in range(30):
            inst = random_instance(rng)
            opt = solve_exact(inst).served_count
            greedy = solve_cga(inst).served_count
            assert greedy <= opt
            if opt:
                assert greedy / opt >= GREEDY_BOUND

    def test_first_iteration_gain_dominates_opt_over_cells(self):
        # With every cell still available, the first greedy pick must gain
        # at least OPT/C users; checked in integers on every instance.
        rng = np.random.default_rng(7)
        for _ in range(40):
            inst = random_instance(rng)
            opt = solve_exact(inst).served_count
            _, history = solve_cga_trace(inst)
            assert history[0] * inst.num_cells >= opt

    def test_partition_constraint_worst_case_is_one_half(self):
        # A greedy pick can spend a cell the optimum needs for a different
        # user: here greedy ties onto (cell 0, PRB 0) covering user 0,
        # after which cell 1 duplicates it.  Optimal splits the cells and
        # covers both users, so the ratio is exactly 1/2.
        sets = (
            (frozenset({0}), frozenset({1})),
            (frozenset({0}), frozenset()),
        )
        inst = CoverageInstance(num_users=2, num_cells=2, num_prbs=2, sets=sets)
        assert solve_cga(inst).served_count == 1
        assert solve_exact(inst).served_count == 2

    def test_per_iteration_bound_has_counterexamples(self):
        # The uniform per-iteration bound gain_n * C >= OPT - m_n fails
        # once greedy has consumed the cells the optimum relies on; this
        # frozen instance ends with one coverable user left but only a
        # zero-gain cell remaining.
        text = (
            "11 4 4\n"
            "0 0 : 1 4 7\n0 1 : 2 4\n0 3 : 0\n"
            "1 0 : 1 2 3 6\n1 1 : 5 6\n1 2 : 0 6 7 8\n1 3 : 0 2 4 6\n"
            "2 0 : 2 4 8\n2 1 : 0 6 9\n2 2 : 2\n2 3 : 0 1 3 10\n"
            "3 0 : 1 7\n3 1 : 0 4 6 7 8 9\n3 2 : 4 9\n3 3 : 4 7\n"
        )
        inst = instance_from_text(text)
        opt = solve_exact(inst).served_count
        _, history = solve_cga_trace(inst)
        m = (0,) + history
        assert opt == 11
        assert m == (0, 6, 9, 10, 10)
        # Last iteration: zero gain, yet one optimal user is uncovered.
        assert (m[4] - m[3]) * inst.num_cells < opt - m[3]

    def test_exact_is_lexicographically_first_maximizer(self):
        sets = ((frozenset({0}), frozenset({0})),)
        inst = CoverageInstance(num_users=1, num_cells=1, num_prbs=2, sets=sets)
        assert solve_exact(inst).allocation.chosen == (0,)
        assert solve_cga(inst).allocation.chosen == (0,)

    def test_exact_cap_enforced(self):
        with pytest.raises(CapExceededError):
            solve_exact(FIXTURE, cap=3)


class TestDga:
    def test_single_cell_dga_equals_cga(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            inst = random_instance(rng, max_cells=1)
            assert solve_dga(inst).served_count == solve_cga(inst).served_count

    def test_primary_count_mode_uses_primary_only(self):
        # Both users connected everywhere, but primaries split 50/50; with
        # "primary" counting, cell 0 sees only user 0 on each PRB.
        rates = np.array([
            [[5.0, 0.0], [5.0, 5.0]],
            [[0.0, 5.0], [0.0, 0.0]],
        ])
        conn = [{0, 1}, {0, 1}]
        inst = build_instance(rates, 1.0, conn)
        primary = np.array([0, 1])
        connected = solve_dga(inst, count="connected")
        primaried = solve_dga(inst, count="primary", primary_cell=primary)
        assert connected.allocation.chosen == (1, 0)
        assert primaried.allocation.chosen == (0, 0)

    def test_primary_mode_requires_primary_cells(self):
        with pytest.raises(ValueError):
            solve_dga(FIXTURE, count="primary")

    def test_unknown_count_mode_rejected(self):
        with pytest.raises(ValueError):
            solve_dga(FIXTURE, count="nope")


def brute_force_mcp(mcp: McpInstance) -> int:
    """Best coverage using at most k of the m candidate sets."""
    best = 0
    indices = range(len(mcp.sets))
    for size in range(1, mcp.k + 1):
        for combo in itertools.combinations(indices, size):
            covered = frozenset().union(*(mcp.sets[i] for i in combo))
            best = max(best, len(covered))
    return best


class TestMcpReduction:
    def test_round_trip_matches_brute_force(self):
        rng = np.random.default_rng(11)
        for _ in range(40):
            m = int(rng.integers(1, 5))
            k = int(rng.integers(1, min(m, 3) + 1))
            universe = int(rng.integers(1, 11))
            sets = tuple(
                frozenset(int(u) for u in rng.choice(
                    universe, size=rng.integers(0, universe + 1), replace=False))
                for _ in range(m)
            )
            mcp = McpInstance(universe_size=universe, k=k, sets=sets)
            inst = reduce_mcp(mcp)
            assert inst.num_cells == k and inst.num_prbs == m
            result = solve_exact(inst)
            chosen_sets = map_solution(result.allocation)
            assert len(chosen_sets) <= k
            covered = frozenset().union(
                frozenset(), *(mcp.sets[i] for i in chosen_sets))
            assert len(covered) == result.served_count
            assert result.served_count == brute_force_mcp(mcp)

    def test_map_solution_deduplicates(self):
        assert map_solution(Allocation(chosen=(2, 0, 2, 1))) == [0, 1, 2]


class TestTextFormat:
    GOLDEN = "6 2 2\n0 0 : 0 1\n0 1 : 1 2 3\n1 0 :\n1 1 : 2 3 4 5\n"

    def test_render(self):
        assert instance_to_text(FIXTURE) == self.GOLDEN

    def test_parse(self):
        assert instance_from_text(self.GOLDEN) == FIXTURE

    def test_comments_and_blanks_ignored(self):
        text = "# header\n\n1 1 1\n0 0 : 0\n"
        inst = instance_from_text(text)
        assert inst.sets == ((frozenset({0}),),)

    def test_missing_lines_mean_empty_sets(self):
        inst = instance_from_text("3 2 2\n0 0 : 1 2\n")
        assert inst.sets[1] == (frozenset(), frozenset())


@st.composite
def coverage_instances(draw):
    num_users = draw(st.integers(1, 8))
    num_cells = draw(st.integers(1, 3))
    num_prbs = draw(st.integers(1, 3))
    user = st.integers(0, num_users - 1)
    sets = tuple(
        tuple(draw(st.frozensets(user, max_size=num_users))
              for _ in range(num_prbs))
        for _ in range(num_cells)
    )
    return CoverageInstance(num_users=num_users, num_cells=num_cells,
                            num_prbs=num_prbs, sets=sets)


class TestProperties:
    @given(coverage_instances())
    @settings(max_examples=60, deadline=None)
    def test_solutions_are_feasible_and_consistent(self, inst):
        for solver in (solve_cga, solve_dga, solve_sc, solve_mbsfn, solve_exact):
            result = solver(inst)
            assert len(result.allocation.chosen) == inst.num_cells
            assert all(0 <= j < inst.num_prbs for j in result.allocation.chosen)
            assert evaluate(inst, result.allocation).served == result.served

    @given(coverage_instances())
    @settings(max_examples=60, deadline=None)
    def test_greedy_gains_never_increase(self, inst):
        _, history = solve_cga_trace(inst)
        gains = np.diff((0,) + history)
        assert all(a >= b for a, b in zip(gains, gains[1:]))

    @given(coverage_instances())
    @settings(max_examples=60, deadline=None)
    def test_exact_dominates_every_policy(self, inst):
        opt = solve_exact(inst).served_count
        for solver in (solve_cga, solve_dga, solve_sc, solve_mbsfn):
            assert solver(inst).served_count <= opt

    @given(coverage_instances(), st.integers(0, 7), st.integers(0, 2),
           st.integers(0, 2))
    @settings(max_examples=60, deadline=None)
    def test_adding_a_member_cannot_hurt_exact(self, inst, user, cell, prb):
        c, j = cell % inst.num_cells, prb % inst.num_prbs
        k = user % inst.num_users
        grown = [list(row) for row in inst.sets]
        grown[c][j] = grown[c][j] | {k}
        bigger = CoverageInstance(
            num_users=inst.num_users, num_cells=inst.num_cells,
            num_prbs=inst.num_prbs,
            sets=tuple(tuple(row) for row in grown),
        )
        assert solve_exact(bigger).served_count >= solve_exact(inst).served_count

    @given(coverage_instances())
    @settings(max_examples=60, deadline=None)
    def test_text_round_trip(self, inst):
        assert instance_from_text(instance_to_text(inst)) == inst

    @given(coverage_instances())
    @settings(max_examples=60, deadline=None)
    def test_greedy_always_within_half_of_exact(self, inst):
        # The guaranteed worst case under the one-PRB-per-cell constraint;
        # the stronger 1 - 1/e ratio holds empirically on the random
        # oracle suite but not universally (see
        # test_partition_constraint_worst_case_is_one_half).
        opt = solve_exact(inst).served_count
        greedy = solve_cga(inst).served_count
        assert 2 * greedy >= opt
