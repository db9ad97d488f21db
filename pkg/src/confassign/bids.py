"""Bid and explicit-conflict conversion into similarity factors.

A bid always overrides the computed similarity for its cell: the reviewer
knows best. Static mode uses a fixed map; dynamic mode additionally floors
the positive bid levels at a quantile of the computed values for the same
paper, so an explicit bid never ranks below the bulk of the computed row.
"""

from __future__ import annotations

import enum
import math
from typing import Iterable, Mapping

from .similarity import Cell, Provenance, SimilarityMatrix


class Bid(str, enum.Enum):
    ExpertWilling = "ExpertWilling"
    Expert = "Expert"
    CapableNotExpert = "CapableNotExpert"
    NotWilling = "NotWilling"
    ConflictOfInterest = "ConflictOfInterest"


class BidMode(str, enum.Enum):
    Static = "Static"
    Dynamic = "Dynamic"


_STATIC_MAP: dict[Bid, float] = {
    Bid.ExpertWilling: 1.0,
    Bid.Expert: 0.9,
    Bid.CapableNotExpert: 0.6,
    Bid.NotWilling: 0.1,
    Bid.ConflictOfInterest: 0.0,
}

# quantile rank of the computed row used as a floor, per positive bid level
_DYNAMIC_RANK: dict[Bid, float] = {
    Bid.ExpertWilling: 1.0,
    Bid.Expert: 0.75,
    Bid.CapableNotExpert: 0.5,
}


def static_bid_to_similarity(bid: Bid) -> float:
    return _STATIC_MAP[bid]


def _nearest_rank_quantile(values: list[float], q: float) -> float:
    ordered = sorted(values)
    rank = max(1, math.ceil(q * len(ordered)))
    return ordered[rank - 1]


def dynamic_bid_to_similarity(bid: Bid, computed_for_paper: Iterable[float]) -> float:
    """Convert a bid relative to the computed factors of one paper's row.

    Positive bids return max(static value, nearest-rank quantile of the
    non-zero computed values). NotWilling and ConflictOfInterest are
    absolute statements and ignore the row entirely.
    """
    static = _STATIC_MAP[bid]
    rank = _DYNAMIC_RANK.get(bid)
    if rank is None:
        return static
    nonzero = [v for v in computed_for_paper if v > 0.0]
    if not nonzero:
        return static
    return max(static, _nearest_rank_quantile(nonzero, rank))


def apply_bids(
    matrix: SimilarityMatrix,
    bids: Mapping[tuple[str, str], Bid],
    mode: BidMode,
) -> SimilarityMatrix:
    """Replace bid cells with converted factors; all other cells untouched.

    ConflictOfInterest bids become Conflict cells; everything else becomes
    a Bid cell. Dynamic conversion reads the Computed values of the input
    matrix, so the order bids are applied in cannot matter.
    """
    replacements: dict[tuple[int, int], Cell] = {}
    computed_rows: dict[int, list[float]] = {}
    for (paper_id, reviewer_id), bid in bids.items():
        i = matrix.paper_index(paper_id)
        j = matrix.reviewer_index(reviewer_id)
        if bid is Bid.ConflictOfInterest:
            replacements[(i, j)] = Cell(0.0, Provenance.Conflict)
            continue
        if mode is BidMode.Dynamic:
            if i not in computed_rows:
                computed_rows[i] = [
                    cell.factor
                    for cell in matrix.cells[i]
                    if cell.provenance is Provenance.Computed
                ]
            factor = dynamic_bid_to_similarity(bid, computed_rows[i])
        else:
            factor = static_bid_to_similarity(bid)
        replacements[(i, j)] = Cell(factor, Provenance.Bid)
    return matrix.with_cells(replacements)
