"""Conference state: papers, reviewers, roster, bids, declared conflicts, config.

This is the single validated input object the pipeline runs on. All
cross-references (author ids, reviewer ids, keywords, bid targets) must
resolve at construction time so downstream code never re-checks them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .bids import Bid, BidMode
from .coi import Person
from .errors import InvalidConference, UnknownKeyword, UnknownPaper, UnknownReviewer
from .rules import CompetenceLevel
from .solver import default_capacity
from .taxonomy import Taxonomy

SOLVERS = ("multipass", "greedy")


@dataclass(frozen=True)
class Paper:
    id: str
    title: str
    author_ids: tuple[str, ...]
    keywords: frozenset[str]


@dataclass(frozen=True)
class Reviewer:
    person_id: str
    selection: Mapping[str, CompetenceLevel]


@dataclass(frozen=True)
class Config:
    k: int = 3
    capacities: Mapping[str, int] = field(default_factory=dict)
    depth_threshold: int = 2
    level_weights: Mapping[CompetenceLevel, float] = field(
        default_factory=lambda: {
            CompetenceLevel.High: 1.0,
            CompetenceLevel.Medium: 0.75,
            CompetenceLevel.Low: 0.5,
        }
    )
    bid_mode: BidMode = BidMode.Static
    same_country_rule: bool = False
    year_window: int = 10
    solver: str = "multipass"
    expand_selections: bool = True
    reduce_paper_sets: bool = True
    restrict_to_closest: bool = False


@dataclass(frozen=True)
class Conference:
    taxonomy: Taxonomy
    papers: tuple[Paper, ...]
    reviewers: tuple[Reviewer, ...]
    roster: tuple[Person, ...]
    bids: Mapping[tuple[str, str], Bid] = field(default_factory=dict)
    explicit_cois: tuple[tuple[str, str], ...] = ()
    config: Config = field(default_factory=Config)

    def roster_by_id(self) -> dict[str, Person]:
        return {p.id: p for p in self.roster}

    def paper_by_id(self, paper_id: str) -> Paper:
        for paper in self.papers:
            if paper.id == paper_id:
                return paper
        raise UnknownPaper(f"unknown paper: {paper_id!r}")

    def reviewer_ids(self) -> tuple[str, ...]:
        return tuple(rv.person_id for rv in self.reviewers)

    def effective_capacities(self) -> dict[str, int]:
        """Configured capacities, falling back to the even-spread default."""
        fallback = default_capacity(self.config.k, len(self.papers), len(self.reviewers))
        return {
            rid: self.config.capacities.get(rid, fallback)
            for rid in self.reviewer_ids()
        }

    def validate(self) -> None:
        cfg = self.config
        if cfg.k < 1:
            raise InvalidConference(f"k must be >= 1, got {cfg.k}")
        if cfg.depth_threshold < 1:
            raise InvalidConference("depth_threshold must be >= 1")
        if cfg.year_window < 1:
            raise InvalidConference("year_window must be >= 1")
        if cfg.solver not in SOLVERS:
            raise InvalidConference(f"unknown solver {cfg.solver!r}")
        for level, weight in cfg.level_weights.items():
            if not 0.0 < weight <= 1.0:
                raise InvalidConference(f"level weight out of (0,1] for {level}: {weight}")

        roster_ids = set()
        for person in self.roster:
            if not person.id:
                raise InvalidConference("roster entry with empty id")
            if person.id in roster_ids:
                raise InvalidConference(f"duplicate roster id: {person.id}")
            roster_ids.add(person.id)
            if person.email.count("@") != 1:
                raise InvalidConference(f"bad email for {person.id}: {person.email!r}")

        paper_ids = set()
        for paper in self.papers:
            if not paper.id or "|" in paper.id:
                raise InvalidConference(f"bad paper id: {paper.id!r}")
            if paper.id in paper_ids:
                raise InvalidConference(f"duplicate paper id: {paper.id}")
            paper_ids.add(paper.id)
            if not paper.author_ids:
                raise InvalidConference(f"paper {paper.id} has no authors")
            for author in paper.author_ids:
                if author not in roster_ids:
                    raise InvalidConference(f"paper {paper.id}: unknown author {author!r}")
            if not paper.keywords:
                raise InvalidConference(f"paper {paper.id} has an empty keyword set")
            for kw in paper.keywords:
                if kw not in self.taxonomy:
                    raise UnknownKeyword(f"paper {paper.id}: unknown keyword {kw!r}")

        reviewer_ids = set()
        for reviewer in self.reviewers:
            rid = reviewer.person_id
            if not rid or "|" in rid:
                raise InvalidConference(f"bad reviewer id: {rid!r}")
            if rid in reviewer_ids:
                raise InvalidConference(f"duplicate reviewer: {rid}")
            reviewer_ids.add(rid)
            if rid not in roster_ids:
                raise InvalidConference(f"reviewer {rid!r} is not on the roster")
            for kw in reviewer.selection:
                if kw not in self.taxonomy:
                    raise UnknownKeyword(f"reviewer {rid}: unknown keyword {kw!r}")

        for (paper_id, reviewer_id), bid in self.bids.items():
            if paper_id not in paper_ids:
                raise UnknownPaper(f"bid on unknown paper: {paper_id!r}")
            if reviewer_id not in reviewer_ids:
                raise UnknownReviewer(f"bid by unknown reviewer: {reviewer_id!r}")
            if not isinstance(bid, Bid):
                raise InvalidConference(f"bad bid level for ({paper_id}, {reviewer_id})")
        for paper_id, reviewer_id in self.explicit_cois:
            if paper_id not in paper_ids:
                raise UnknownPaper(f"conflict on unknown paper: {paper_id!r}")
            if reviewer_id not in reviewer_ids:
                raise UnknownReviewer(f"conflict by unknown reviewer: {reviewer_id!r}")

        for rid, cap in cfg.capacities.items():
            if rid not in reviewer_ids:
                raise UnknownReviewer(f"capacity for unknown reviewer: {rid!r}")
            if not isinstance(cap, int) or cap < 1:
                raise InvalidConference(f"capacity for {rid} must be a positive integer")
