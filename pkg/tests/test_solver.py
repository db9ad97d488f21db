"""Matching core and proposal solvers, checked against brute-force oracles."""

from __future__ import annotations

import itertools
import random

import pytest

from confassign.errors import Infeasible, UnknownId
from confassign.similarity import Cell, Provenance, SimilarityMatrix
from confassign.solver import (
    AssignmentProblem,
    AssignmentProposal,
    Edge,
    Origin,
    default_capacity,
    hungarian_max_weight,
    score_proposal,
    solve_greedy,
    solve_multipass,
)

GRID_STEP = 0.05


def grid_weights(rng: random.Random, rows: int, cols: int) -> list[list[float]]:
    return [[rng.randrange(21) * GRID_STEP for _ in range(cols)] for _ in range(rows)]


def int_total(weights, matching) -> int:
    """Exact total on the 0.05 grid, scaled to integers."""
    return sum(round(weights[i][j] / GRID_STEP) for i, j in matching)


def brute_force_matchings(rows: int, cols: int):
    """All maximal one-to-one matchings covering min(rows, cols) pairs."""
    if rows <= cols:
        for perm in itertools.permutations(range(cols), rows):
            yield [(i, perm[i]) for i in range(rows)]
    else:
        for perm in itertools.permutations(range(rows), cols):
            yield [(perm[j], j) for j in range(cols)]


def brute_force_best(weights) -> tuple[int, list[tuple[int, int]]]:
    """Max integer total and the lexicographically smallest optimal matching."""
    rows, cols = len(weights), len(weights[0])
    best_total = None
    best_matching = None
    for matching in brute_force_matchings(rows, cols):
        total = int_total(weights, matching)
        key = sorted(matching)
        if best_total is None or total > best_total or (
            total == best_total and key < best_matching
        ):
            best_total = total
            best_matching = key
    return best_total, best_matching


def make_matrix(values, conflicts=frozenset()) -> SimilarityMatrix:
    papers = [f"P{i}" for i in range(len(values))]
    reviewers = [f"R{j}" for j in range(len(values[0]))]
    cells = [
        [
            Cell(0.0, Provenance.Conflict)
            if (i, j) in conflicts
            else Cell(values[i][j])
            for j in range(len(values[0]))
        ]
        for i in range(len(values))
    ]
    return SimilarityMatrix(papers, reviewers, cells)


def uniform_problem(matrix: SimilarityMatrix, k: int, cap: int | None = None, **kw):
    if cap is None:
        cap = default_capacity(k, len(matrix.papers), len(matrix.reviewers))
    return AssignmentProblem(
        matrix=matrix, k=k, capacity={r: cap for r in matrix.reviewers}, **kw
    )


class TestHungarian:
    def test_single_cell(self):
        assert hungarian_max_weight([[0.7]]) == {(0, 0)}

    def test_diagonal_dominance(self):
        assert hungarian_max_weight([[1.0, 0.0], [0.0, 1.0]]) == {(0, 0), (1, 1)}

    def test_three_by_three_matches_oracle(self):
        weights = [[0.9, 0.6, 0.1], [0.9, 0.8, 0.2], [0.3, 0.8, 0.7]]
        best_total, best_matching = brute_force_best(weights)
        got = hungarian_max_weight(weights)
        assert int_total(weights, got) == best_total
        assert sorted(got) == best_matching

    def test_wide_grid_covers_all_rows(self):
        weights = [[0.2, 0.9, 0.4]]
        assert hungarian_max_weight(weights) == {(0, 1)}

    def test_tall_grid_covers_all_columns(self):
        weights = [[0.1], [0.9], [0.5]]
        assert hungarian_max_weight(weights) == {(1, 0)}

    def test_forbidden_cell_avoided(self):
        weights = [[1.0, 0.1], [0.9, 0.2]]
        got = hungarian_max_weight(weights, forbidden={(0, 0)})
        assert got == {(0, 1), (1, 0)}

    def test_all_forbidden_row_infeasible(self):
        with pytest.raises(Infeasible) as err:
            hungarian_max_weight([[0.5, 0.5], [0.5, 0.5]], forbidden={(1, 0), (1, 1)})
        assert err.value.starved == (1,)

    def test_hall_violation_infeasible(self):
        # both rows can only use column 0
        forbidden = {(0, 1), (1, 1)}
        with pytest.raises(Infeasible):
            hungarian_max_weight([[0.5, 0.5], [0.5, 0.5]], forbidden=forbidden)

    def test_surplus_rows_may_stay_unmatched(self):
        # 3 rows, 1 column: only the best row is matched
        weights = [[0.3], [0.8], [0.5]]
        forbidden = {(1, 0)}
        assert hungarian_max_weight(weights, forbidden=forbidden) == {(2, 0)}

    def test_lexicographic_tie_break(self):
        # every matching has total 1.0; lexicographically smallest wins
        weights = [[0.5, 0.5], [0.5, 0.5]]
        assert sorted(hungarian_max_weight(weights)) == [(0, 0), (1, 1)]

    def test_random_instances_equal_oracle_and_lex(self):
        rng = random.Random(1234)
        for _ in range(150):
            rows = rng.randint(1, 5)
            cols = rng.randint(1, 5)
            # coarse grid forces plenty of ties
            weights = [
                [rng.randrange(5) * 0.25 for _ in range(cols)] for _ in range(rows)
            ]
            best_total, best_matching = brute_force_best(weights)
            got = hungarian_max_weight(weights)
            assert sum(round(w * 4) for w in (weights[i][j] for i, j in got)) == sum(
                round(weights[i][j] * 4) for i, j in best_matching
            )
            assert sorted(got) == best_matching

    def test_random_instances_with_forbidden_cells(self):
        # rows <= cols: full cover avoiding forbidden cells, or Infeasible;
        # oracle enumerates permutations and applies the same lex tie-break
        rng = random.Random(987)
        infeasible_seen = 0
        for _ in range(200):
            rows = rng.randint(1, 4)
            cols = rng.randint(rows, 5)
            weights = [
                [rng.randrange(5) * 0.25 for _ in range(cols)] for _ in range(rows)
            ]
            forbidden = {
                (i, j)
                for i in range(rows)
                for j in range(cols)
                if rng.random() < 0.3
            }
            best = None
            for matching in brute_force_matchings(rows, cols):
                if any(pair in forbidden for pair in matching):
                    continue
                total = int_total(weights, matching)
                key = (-total, sorted(matching))
                if best is None or key < best:
                    best = key
            if best is None:
                infeasible_seen += 1
                with pytest.raises(Infeasible):
                    hungarian_max_weight(weights, forbidden)
            else:
                got = hungarian_max_weight(weights, forbidden)
                assert sorted(got) == best[1]
        assert infeasible_seen > 0  # the generator does hit both branches


def oracle_multipass(matrix, k, capacity, excluded=frozenset()):
    """Mirror of the pass structure with per-pass exhaustive search.

    Each pass enumerates every capacity-respecting paper->reviewer map,
    takes the maximum total, and breaks ties exactly like the solver: by
    the canonical slot-index vector, i.e. by reviewer position, earlier
    papers first.
    """
    papers = list(matrix.papers)
    reviewers = list(matrix.reviewers)
    conflicts = {
        (p, r)
        for i, p in enumerate(papers)
        for j, r in enumerate(reviewers)
        if matrix.cells[i][j].provenance is Provenance.Conflict
    }
    assigned = {p: set() for p in papers}
    loads = {r: 0 for r in reviewers}
    total = 0.0
    edges = []
    for t in range(1, k + 1):
        active = [p for p in papers if len(assigned[p]) < t]
        if not active:
            continue
        remaining = {r: capacity[r] - loads[r] for r in reviewers}
        slots = [(r, s) for r in reviewers for s in range(max(0, remaining[r]))]
        options = []
        for p in active:
            options.append(
                [
                    j
                    for j, (r, _) in enumerate(slots)
                    if (p, r) not in conflicts
                    and (p, r) not in excluded
                    and r not in assigned[p]
                ]
            )
        best = None
        for combo in itertools.product(*options):
            if len(set(combo)) != len(combo):
                continue
            value = sum(
                matrix.value(active[i], slots[j][0]) for i, j in enumerate(combo)
            )
            key = (-round(value / GRID_STEP), combo)
            if best is None or key < best[0]:
                best = (key, combo)
        if best is None:
            return None
        for i, j in enumerate(best[1]):
            r = slots[j][0]
            assigned[active[i]].add(r)
            loads[r] += 1
            total += matrix.value(active[i], r)
            edges.append((active[i], r, t))
    return total, edges


class TestMultipass:
    def test_forced_complete_assignment(self):
        matrix = make_matrix([[0.5, 0.5], [0.5, 0.5]])
        proposal = solve_multipass(uniform_problem(matrix, k=2, cap=2))
        score = score_proposal(proposal, matrix)
        assert score.load == {"R0": 2, "R1": 2}
        assert {e.pair for e in proposal.edges} == {
            ("P0", "R0"), ("P0", "R1"), ("P1", "R0"), ("P1", "R1")
        }

    def test_single_paper_argmax(self):
        matrix = make_matrix([[0.2, 0.9, 0.4]])
        proposal = solve_multipass(uniform_problem(matrix, k=1))
        assert [e.pair for e in proposal.edges] == [("P0", "R1")]

    def test_pass_numbers_and_distinctness(self):
        rng = random.Random(3)
        matrix = make_matrix(grid_weights(rng, 4, 3))
        proposal = solve_multipass(uniform_problem(matrix, k=2, cap=3))
        for paper in matrix.papers:
            got = [e for e in proposal.edges if e.paper_id == paper]
            assert sorted(e.pass_num for e in got) == [1, 2]
            assert len({e.reviewer_id for e in got}) == 2

    def test_matches_pass_structured_oracle(self):
        rng = random.Random(77)
        for _ in range(60):
            n = rng.randint(1, 3)
            m = rng.randint(max(1, 2 if n > 1 else 1), 3)
            k = rng.randint(1, min(2, m))
            matrix = make_matrix(grid_weights(rng, n, m))
            cap = default_capacity(k, n, m)
            capacity = {r: cap for r in matrix.reviewers}
            expected = oracle_multipass(matrix, k, capacity)
            proposal = solve_multipass(uniform_problem(matrix, k=k, cap=cap))
            assert expected is not None
            total, edges = expected
            assert score_proposal(proposal, matrix).total_weight == pytest.approx(total)
            assert [(e.paper_id, e.reviewer_id, e.pass_num) for e in proposal.edges] == edges

    def test_conflict_row_starves(self):
        matrix = make_matrix([[0.5, 0.5], [0.9, 0.9]], conflicts={(0, 0), (0, 1)})
        with pytest.raises(Infeasible) as err:
            solve_multipass(uniform_problem(matrix, k=1, cap=2))
        assert err.value.starved == ("P0",)

    def test_pinned_edges_respected(self):
        matrix = make_matrix([[0.1, 0.9], [0.9, 0.1]])
        problem = uniform_problem(matrix, k=1, cap=1, pinned=(("P0", "R0"),))
        proposal = solve_multipass(problem)
        pairs = {e.pair for e in proposal.edges}
        assert ("P0", "R0") in pairs
        assert ("P1", "R1") in pairs
        pinned_edge = next(e for e in proposal.edges if e.pair == ("P0", "R0"))
        assert pinned_edge.pass_num == 0
        assert pinned_edge.origin is Origin.Manual

    def test_excluded_pairs_avoided(self):
        matrix = make_matrix([[0.1, 0.9]])
        problem = uniform_problem(matrix, k=1, cap=1, excluded=frozenset({("P0", "R1")}))
        proposal = solve_multipass(problem)
        assert [e.pair for e in proposal.edges] == [("P0", "R0")]

    def test_deterministic(self):
        rng = random.Random(11)
        matrix = make_matrix(grid_weights(rng, 5, 4))
        problem = uniform_problem(matrix, k=2)
        assert solve_multipass(problem) == solve_multipass(problem)


class TestGreedy:
    def test_single_paper_argmax(self):
        matrix = make_matrix([[0.3, 0.8]])
        proposal = solve_greedy(uniform_problem(matrix, k=1))
        assert [e.pair for e in proposal.edges] == [("P0", "R1")]

    def test_tied_eligibility_lower_paper_first(self):
        # both papers prefer R0 which has capacity 1: P0 is processed first
        matrix = make_matrix([[0.9, 0.1], [0.9, 0.2]])
        proposal = solve_greedy(uniform_problem(matrix, k=1, cap=1))
        assert {e.pair for e in proposal.edges} == {("P0", "R0"), ("P1", "R1")}

    def test_scarce_paper_processed_first(self):
        # P1 has one eligible reviewer (conflict on R0) and goes first
        matrix = make_matrix([[0.9, 0.8], [0.5, 0.9]], conflicts={(1, 0)})
        proposal = solve_greedy(uniform_problem(matrix, k=1, cap=1))
        assert {e.pair for e in proposal.edges} == {("P1", "R1"), ("P0", "R0")}

    def test_load_tie_break(self):
        # equal factors: reviewer with the lower current load wins
        matrix = make_matrix([[0.5, 0.5], [0.5, 0.5]])
        proposal = solve_greedy(uniform_problem(matrix, k=1, cap=2))
        assert {e.pair for e in proposal.edges} == {("P0", "R0"), ("P1", "R1")}

    def test_starvation(self):
        matrix = make_matrix([[0.5, 0.5]], conflicts={(0, 0), (0, 1)})
        with pytest.raises(Infeasible) as err:
            solve_greedy(uniform_problem(matrix, k=1))
        assert err.value.starved == ("P0",)

    def test_never_lands_on_conflict(self):
        rng = random.Random(6)
        for _ in range(40):
            n, m = rng.randint(1, 5), rng.randint(2, 5)
            conflicts = {
                (i, j) for i in range(n) for j in range(m) if rng.random() < 0.2
            }
            for i in range(n):  # keep every paper feasible
                if all((i, j) in conflicts for j in range(m)):
                    conflicts.discard((i, rng.randrange(m)))
            matrix = make_matrix(grid_weights(rng, n, m), conflicts)
            proposal = solve_greedy(uniform_problem(matrix, k=1, cap=n))
            for e in proposal.edges:
                cell = matrix.cell(e.paper_id, e.reviewer_id)
                assert cell.provenance is not Provenance.Conflict


def test_multipass_dominates_greedy_single_pass():
    rng = random.Random(404)
    for _ in range(50):
        n, m = rng.randint(1, 5), rng.randint(1, 5)
        matrix = make_matrix(grid_weights(rng, n, m))
        problem = uniform_problem(matrix, k=1)
        exact = score_proposal(solve_multipass(problem), matrix).total_weight
        greedy = score_proposal(solve_greedy(problem), matrix).total_weight
        assert exact >= greedy - 1e-12


class TestScore:
    def test_empty_proposal(self):
        matrix = make_matrix([[0.5]])
        score = score_proposal(AssignmentProposal(()), matrix)
        assert score.total_weight == 0.0
        assert score.min_edge is None
        assert score.load == {"R0": 0}

    def test_arithmetic(self):
        matrix = make_matrix([[0.5, 0.5]])
        proposal = AssignmentProposal(
            (Edge("P0", "R0", 0.5, 1), Edge("P0", "R1", 0.5, 2))
        )
        score = score_proposal(proposal, matrix)
        assert score.total_weight == 1.0
        assert score.min_edge == 0.5
        assert score.load == {"R0": 1, "R1": 1}

    def test_unknown_id(self):
        matrix = make_matrix([[0.5]])
        with pytest.raises(UnknownId):
            score_proposal(AssignmentProposal((Edge("PX", "R0", 0.5, 1),)), matrix)
