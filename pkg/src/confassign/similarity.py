"""Semantic similarity over the taxonomy and the merged similarity matrix.

A cell of the matrix carries both the factor in [0, 1] and where it came
from: computed from keywords, converted from a reviewer bid, or zeroed by
a conflict of interest. Merge precedence is Conflict > Bid > Computed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Mapping

from .errors import EmptyPaperSet, UnknownPaper, UnknownReviewer
from .rules import CompetenceLevel, restrict_to_closest
from .taxonomy import Taxonomy

if TYPE_CHECKING:  # pragma: no cover
    from .coi import CoIRecord
    from .conference import Conference


class Provenance(str, enum.Enum):
    Computed = "Computed"
    Bid = "Bid"
    Conflict = "Conflict"


@dataclass(frozen=True)
class Cell:
    """One similarity factor with its provenance; Conflict implies 0.0."""

    factor: float
    provenance: Provenance = Provenance.Computed

    def __post_init__(self) -> None:
        if not 0.0 <= self.factor <= 1.0:
            raise ValueError(f"factor out of range: {self.factor}")
        if self.provenance is Provenance.Conflict and self.factor != 0.0:
            raise ValueError("conflict cells must carry factor 0.0")


class SimilarityMatrix:
    """|P| x |R| grid of cells, immutable once built."""

    def __init__(
        self,
        papers: Iterable[str],
        reviewers: Iterable[str],
        cells: Iterable[Iterable[Cell]],
    ):
        self.papers = tuple(papers)
        self.reviewers = tuple(reviewers)
        self.cells = tuple(tuple(row) for row in cells)
        if len(self.cells) != len(self.papers) or any(
            len(row) != len(self.reviewers) for row in self.cells
        ):
            raise ValueError("cell grid does not match the id lists")
        self._paper_index = {p: i for i, p in enumerate(self.papers)}
        self._reviewer_index = {r: j for j, r in enumerate(self.reviewers)}

    def paper_index(self, paper_id: str) -> int:
        try:
            return self._paper_index[paper_id]
        except KeyError:
            raise UnknownPaper(f"unknown paper: {paper_id!r}") from None

    def reviewer_index(self, reviewer_id: str) -> int:
        try:
            return self._reviewer_index[reviewer_id]
        except KeyError:
            raise UnknownReviewer(f"unknown reviewer: {reviewer_id!r}") from None

    def cell(self, paper_id: str, reviewer_id: str) -> Cell:
        return self.cells[self.paper_index(paper_id)][self.reviewer_index(reviewer_id)]

    def value(self, paper_id: str, reviewer_id: str) -> float:
        return self.cell(paper_id, reviewer_id).factor

    def row(self, paper_id: str) -> tuple[Cell, ...]:
        return self.cells[self.paper_index(paper_id)]

    def with_cells(self, replacements: Mapping[tuple[int, int], Cell]) -> "SimilarityMatrix":
        """Return a copy with the given (row, col) cells replaced."""
        grid = [list(row) for row in self.cells]
        for (i, j), cell in replacements.items():
            grid[i][j] = cell
        return SimilarityMatrix(self.papers, self.reviewers, grid)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SimilarityMatrix):
            return NotImplemented
        return (
            self.papers == other.papers
            and self.reviewers == other.reviewers
            and self.cells == other.cells
        )

    def __repr__(self) -> str:
        return f"SimilarityMatrix({len(self.papers)}x{len(self.reviewers)})"


def keyword_pair_similarity(taxonomy: Taxonomy, a: str, b: str) -> float:
    """Depth-ratio similarity of two keywords.

    1.0 on identity; otherwise 2*depth(lca) / (depth(a) + depth(b)).
    Symmetric, bounded in [0, 1], and 1.0 only on identity. Two distinct
    siblings below the root score > 0 because they share a deep ancestor.
    """
    if a == b:
        taxonomy.require(a)
        return 1.0
    ancestor = taxonomy.lca(a, b)
    da, db = taxonomy.depth(a), taxonomy.depth(b)
    return 2.0 * taxonomy.depth(ancestor) / (da + db)


DEFAULT_LEVEL_WEIGHTS: dict[CompetenceLevel, float] = {
    CompetenceLevel.High: 1.0,
    CompetenceLevel.Medium: 0.75,
    CompetenceLevel.Low: 0.5,
}


def level_weight(
    level: CompetenceLevel,
    weights: Mapping[CompetenceLevel, float] | None = None,
) -> float:
    return (weights or DEFAULT_LEVEL_WEIGHTS)[level]


def set_similarity(
    taxonomy: Taxonomy,
    paper_keywords: Iterable[str],
    selection: Mapping[str, CompetenceLevel],
    level_weights: Mapping[CompetenceLevel, float] | None = None,
) -> float:
    """Similarity of a paper keyword set to a reviewer selection.

    Mean over the paper's keywords of the best level-weighted pair
    similarity offered by the selection. Taking the best match per paper
    keyword keeps a reviewer's large selection from diluting the score;
    an empty selection scores 0.0.
    """
    paper = list(paper_keywords)
    if not paper:
        raise EmptyPaperSet("paper keyword set is empty")
    taxonomy.validate_keywords(paper)
    taxonomy.validate_keywords(selection)
    if not selection:
        return 0.0
    total = 0.0
    for p in paper:
        total += max(
            keyword_pair_similarity(taxonomy, p, r) * level_weight(lvl, level_weights)
            for r, lvl in selection.items()
        )
    return total / len(paper)


def build_similarity_matrix(
    taxonomy: Taxonomy,
    conference: "Conference",
    coi_records: Iterable["CoIRecord"] = (),
) -> SimilarityMatrix:
    """Assemble the merged matrix for a preprocessed conference.

    Expansion/reduction of keyword sets is expected to have happened
    already (the workflow applies them per configuration); this function
    computes every cell, overlays bids, then zeroes conflicted cells.
    """
    from .bids import apply_bids  # deferred: bids module builds on this one

    config = conference.config
    selections = {rv.person_id: rv.selection for rv in conference.reviewers}
    paper_sets = {p.id: p.keywords for p in conference.papers}
    paper_ids = [p.id for p in conference.papers]
    reviewer_ids = [rv.person_id for rv in conference.reviewers]

    grid = []
    for pid in paper_ids:
        row = []
        for rid in reviewer_ids:
            sel = selections[rid]
            if config.restrict_to_closest and sel:
                sel = restrict_to_closest(taxonomy, paper_sets[pid], sel)
            factor = set_similarity(taxonomy, paper_sets[pid], sel, config.level_weights)
            row.append(Cell(factor))
        grid.append(row)
    matrix = SimilarityMatrix(paper_ids, reviewer_ids, grid)

    matrix = apply_bids(matrix, conference.bids, config.bid_mode)
    overlays: dict[tuple[int, int], Cell] = {}
    for record in coi_records:
        i = matrix.paper_index(record.paper_id)
        j = matrix.reviewer_index(record.reviewer_id)
        overlays[(i, j)] = Cell(0.0, Provenance.Conflict)
    return matrix.with_cells(overlays)
