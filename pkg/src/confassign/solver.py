"""Load-balanced reviewer assignment from the merged similarity matrix.

Two solvers over the same problem shape: an exact multi-pass maximum-weight
matching (one matching round per required reviewer, reviewer capacity
expanded into unit slots) and a greedy heuristic that serves papers with
the fewest options first. Conflict cells are hard-forbidden for both;
zero-factor cells remain legal last resorts.

The matching core works on exact integers derived from the float weights,
with a lexicographic perturbation that makes the optimum unique, so
identical problems always produce identical proposals.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import AbstractSet, Iterable, Mapping, Sequence

from .errors import Infeasible, UnknownId
from .similarity import Provenance, SimilarityMatrix


class Approval(str, enum.Enum):
    Pending = "Pending"
    Approved = "Approved"
    Rejected = "Rejected"


class Origin(str, enum.Enum):
    Automatic = "Automatic"
    Manual = "Manual"


@dataclass(frozen=True)
class Edge:
    paper_id: str
    reviewer_id: str
    factor: float
    pass_num: int
    approval: Approval = Approval.Pending
    origin: Origin = Origin.Automatic

    @property
    def edge_id(self) -> str:
        return f"{self.paper_id}|{self.reviewer_id}"

    @property
    def pair(self) -> tuple[str, str]:
        return (self.paper_id, self.reviewer_id)


@dataclass(frozen=True)
class AssignmentProposal:
    edges: tuple[Edge, ...]

    def pairs(self) -> set[tuple[str, str]]:
        return {e.pair for e in self.edges}

    def total_weight(self) -> float:
        return sum(e.factor for e in self.edges)


@dataclass(frozen=True)
class AssignmentProblem:
    """Inputs of one solver run.

    ``capacity`` must cover every reviewer of the matrix. ``pinned`` pairs
    are treated as already assigned: they consume capacity up front, count
    toward their paper's quota, and appear in the proposal with pass 0.
    """

    matrix: SimilarityMatrix
    k: int
    capacity: Mapping[str, int]
    excluded: frozenset[tuple[str, str]] = frozenset()
    pinned: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class ProposalScore:
    total_weight: float
    min_edge: float | None
    load: dict[str, int] = field(hash=False, default_factory=dict)


def default_capacity(k: int, n_papers: int, n_reviewers: int) -> int:
    """Uniform per-reviewer cap that spreads k*|P| assignments evenly."""
    return max(1, math.ceil(k * n_papers / max(1, n_reviewers)))


# ---------------------------------------------------------------------------
# exact rectangular maximum-weight matching
# ---------------------------------------------------------------------------

def _exact_int_grid(weights: Sequence[Sequence[float]]) -> tuple[list[list[int]], int]:
    """Represent float weights exactly as integers over a common power-of-two scale."""
    max_den = 1
    for row in weights:
        for w in row:
            if not math.isfinite(w):
                raise ValueError(f"weight is not finite: {w}")
            max_den = max(max_den, float(w).as_integer_ratio()[1])
    grid = []
    for row in weights:
        out = []
        for w in row:
            num, den = float(w).as_integer_ratio()
            out.append(num * (max_den // den))
        grid.append(out)
    return grid, max_den


def _min_cost_assignment(cost: list[list[int]]) -> list[int]:
    """O(n^3) potentials algorithm; returns row index assigned to each column."""
    n = len(cost)
    max_abs = max((abs(c) for row in cost for c in row), default=0)
    inf = (max_abs + 1) * (4 * n + 4) + 1
    u = [0] * (n + 1)
    v = [0] * (n + 1)
    p = [0] * (n + 1)  # p[j] = row matched to column j, 1-based; 0 = free
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = [inf] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = inf
            j1 = 0
            row = cost[i0 - 1]
            for j in range(1, n + 1):
                if used[j]:
                    continue
                cur = row[j - 1] - u[i0] - v[j]
                if cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    return [p[j] - 1 for j in range(1, n + 1)]


def hungarian_max_weight(
    weights: Sequence[Sequence[float]],
    forbidden: AbstractSet[tuple[int, int]] = frozenset(),
) -> set[tuple[int, int]]:
    """Maximum-weight one-to-one matching on a rectangular grid.

    Covers min(rows, cols) cells when the forbidden set allows it;
    rectangular grids are padded internally with zero-weight dummies that
    never reach the result. Among equal-weight optima the matching whose
    sorted (row, col) list is lexicographically smallest is returned,
    achieved by perturbing each cell by a positional epsilon too small to
    change the exact optimum. With rows <= cols every row must be covered,
    so a row left on a forbidden cell raises Infeasible; with rows > cols
    the surplus rows simply stay unmatched.
    """
    n = len(weights)
    if n == 0 or len(weights[0]) == 0:
        raise ValueError("weight grid must be non-empty")
    m = len(weights[0])
    if any(len(row) != m for row in weights):
        raise ValueError("weight grid must be rectangular")

    if n <= m:
        dead = [i for i in range(n) if all((i, j) in forbidden for j in range(m))]
        if dead:
            raise Infeasible(
                f"rows with every cell forbidden: {dead}", starved=tuple(dead)
            )

    grid, scale = _exact_int_grid(weights)
    size = max(n, m)
    base = size + 1
    big = base**size  # one weight unit always outweighs the whole perturbation
    forb = 2 * size * (max((abs(c) for r in grid for c in r), default=0) + 1) * big + 1

    cost = []
    for i in range(size):
        pert = base ** (size - 1 - i)
        row = []
        for j in range(size):
            if i < n and j < m:
                value = forb * -1 if (i, j) in forbidden else grid[i][j] * big
            else:
                value = 0
            row.append(-(value - j * pert))
        cost.append(row)

    row_of_col = _min_cost_assignment(cost)
    matched: set[tuple[int, int]] = set()
    starved: list[int] = []
    for j, i in enumerate(row_of_col):
        if i < n and j < m:
            if (i, j) in forbidden:
                starved.append(i)
            else:
                matched.add((i, j))
    if starved and n <= m:
        raise Infeasible(
            f"rows cannot be matched without forbidden cells: {sorted(starved)}",
            starved=tuple(sorted(starved)),
        )
    return matched


# ---------------------------------------------------------------------------
# proposal construction
# ---------------------------------------------------------------------------

def _conflict_pairs(matrix: SimilarityMatrix) -> set[tuple[str, str]]:
    return {
        (p, r)
        for i, p in enumerate(matrix.papers)
        for j, r in enumerate(matrix.reviewers)
        if matrix.cells[i][j].provenance is Provenance.Conflict
    }


def _start_state(
    problem: AssignmentProblem,
) -> tuple[list[Edge], dict[str, set[str]], dict[str, int]]:
    matrix = problem.matrix
    assigned: dict[str, set[str]] = {p: set() for p in matrix.papers}
    loads: dict[str, int] = {r: 0 for r in matrix.reviewers}
    edges = []
    for paper_id, reviewer_id in problem.pinned:
        factor = matrix.value(paper_id, reviewer_id)
        if reviewer_id in assigned[paper_id]:
            continue
        assigned[paper_id].add(reviewer_id)
        loads[reviewer_id] += 1
        edges.append(
            Edge(paper_id, reviewer_id, factor, pass_num=0, origin=Origin.Manual)
        )
    return edges, assigned, loads


def solve_multipass(problem: AssignmentProblem) -> AssignmentProposal:
    """k matching passes; pass t gives one more reviewer to every paper below t.

    The right side of each pass has one slot per unit of remaining reviewer
    capacity; forbidden cells are conflicts, explicit exclusions, and pairs
    already assigned. Starvation in any pass aborts with the affected
    paper ids.
    """
    matrix = problem.matrix
    conflicts = _conflict_pairs(matrix)
    edges, assigned, loads = _start_state(problem)

    for t in range(1, problem.k + 1):
        papers = [p for p in matrix.papers if len(assigned[p]) < t]
        if not papers:
            continue
        slots = [
            (r, s)
            for r in matrix.reviewers
            for s in range(max(0, problem.capacity[r] - loads[r]))
        ]
        if not slots:
            raise Infeasible(
                f"no reviewer capacity left in pass {t} for papers: {papers}",
                starved=tuple(papers),
            )
        weights = [[matrix.value(p, r) for r, _ in slots] for p in papers]
        forbidden = {
            (i, j)
            for i, p in enumerate(papers)
            for j, (r, _) in enumerate(slots)
            if (p, r) in conflicts
            or (p, r) in problem.excluded
            or r in assigned[p]
        }
        try:
            matching = hungarian_max_weight(weights, forbidden)
        except Infeasible as exc:
            starved_papers = tuple(papers[i] for i in exc.starved)
            raise Infeasible(
                f"papers cannot reach {problem.k} reviewers: {list(starved_papers)}",
                starved=starved_papers,
            ) from exc
        matched_rows = set()
        for i, j in sorted(matching):
            paper_id = papers[i]
            reviewer_id = slots[j][0]
            assigned[paper_id].add(reviewer_id)
            loads[reviewer_id] += 1
            matched_rows.add(i)
            edges.append(
                Edge(paper_id, reviewer_id, matrix.value(paper_id, reviewer_id), pass_num=t)
            )
        starved = [p for i, p in enumerate(papers) if i not in matched_rows]
        if starved:
            raise Infeasible(
                f"papers cannot reach {problem.k} reviewers: {starved}",
                starved=tuple(starved),
            )
    return AssignmentProposal(tuple(edges))


def solve_greedy(problem: AssignmentProblem) -> AssignmentProposal:
    """Heuristic: hardest papers first, best eligible reviewers per paper.

    Papers are ordered once by ascending count of eligible reviewers
    (non-conflict, not excluded, positive capacity), ties by position.
    Each paper then takes its best eligible reviewers by factor, breaking
    ties by lower current load, then lower reviewer index.
    """
    matrix = problem.matrix
    conflicts = _conflict_pairs(matrix)
    edges, assigned, loads = _start_state(problem)
    reviewer_pos = {r: j for j, r in enumerate(matrix.reviewers)}

    def eligible(paper_id: str) -> list[str]:
        return [
            r
            for r in matrix.reviewers
            if (paper_id, r) not in conflicts
            and (paper_id, r) not in problem.excluded
            and r not in assigned[paper_id]
            and problem.capacity[r] - loads[r] > 0
        ]

    order = sorted(
        range(len(matrix.papers)),
        key=lambda i: (len(eligible(matrix.papers[i])), i),
    )
    starved = []
    for i in order:
        paper_id = matrix.papers[i]
        needed = problem.k - len(assigned[paper_id])
        for rank in range(needed):
            candidates = eligible(paper_id)
            if not candidates:
                starved.append(paper_id)
                break
            best = min(
                candidates,
                key=lambda r: (-matrix.value(paper_id, r), loads[r], reviewer_pos[r]),
            )
            assigned[paper_id].add(best)
            loads[best] += 1
            edges.append(
                Edge(
                    paper_id,
                    best,
                    matrix.value(paper_id, best),
                    pass_num=len(assigned[paper_id]),
                )
            )
    if starved:
        raise Infeasible(
            f"papers cannot reach {problem.k} reviewers: {starved}",
            starved=tuple(starved),
        )
    return AssignmentProposal(tuple(edges))


def score_proposal(
    proposal: AssignmentProposal, matrix: SimilarityMatrix
) -> ProposalScore:
    """Chair-facing aggregate: total weight, weakest edge, per-reviewer load."""
    load = {r: 0 for r in matrix.reviewers}
    total = 0.0
    minimum: float | None = None
    for edge in proposal.edges:
        if edge.paper_id not in matrix.papers or edge.reviewer_id not in load:
            raise UnknownId(f"edge references unknown id: {edge.pair}")
        value = matrix.value(edge.paper_id, edge.reviewer_id)
        total += value
        minimum = value if minimum is None else min(minimum, value)
        load[edge.reviewer_id] += 1
    return ProposalScore(total_weight=total, min_edge=minimum, load=load)


def approve_edges(
    proposal: AssignmentProposal, edge_ids: Iterable[str] | None
) -> AssignmentProposal:
    """Return a proposal with the listed edges (or all, when None) approved."""
    if edge_ids is None:
        wanted = {e.edge_id for e in proposal.edges}
    else:
        wanted = set(edge_ids)
    edges = tuple(
        replace(e, approval=Approval.Approved) if e.edge_id in wanted else e
        for e in proposal.edges
    )
    return AssignmentProposal(edges)
