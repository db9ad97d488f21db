"""Workflow store: pipeline orchestration, chair approval, audit, persistence.

Stages move Draft -> MatrixBuilt -> Proposed -> {PartiallyApproved ->} Approved.
Every mutating operation appends an audit event; replaying the audit log over
the initial conference reproduces the final state because all operations are
deterministic. Persistence is a single versioned JSON document plus an
optional append-only JSON-lines audit sidecar.
"""

from __future__ import annotations

import enum
import hashlib
import json
import threading
import time
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Callable, Iterable

from . import coi as coi_mod
from .bids import Bid, BidMode
from .coi import BibCorpus, CoIReason, CoIRecord, Person
from .conference import Conference, Config, Paper, Reviewer
from .errors import (
    ConflictRequiresForce,
    CapacityRequiresForce,
    DuplicateEdge,
    IllegalState,
    MalformedDocument,
    SchemaVersionMismatch,
    UnknownEdge,
)
from .rules import CompetenceLevel, expand_reviewer_selection, reduce_parent_child
from .similarity import (
    Cell,
    Provenance,
    SimilarityMatrix,
    build_similarity_matrix,
)
from .solver import (
    Approval,
    AssignmentProblem,
    AssignmentProposal,
    Edge,
    Origin,
    approve_edges,
    score_proposal,
    solve_greedy,
    solve_multipass,
)
from .taxonomy import Taxonomy, load_taxonomy_xml

DOCUMENT_VERSION = 1


class Stage(str, enum.Enum):
    Draft = "Draft"
    MatrixBuilt = "MatrixBuilt"
    Proposed = "Proposed"
    PartiallyApproved = "PartiallyApproved"
    Approved = "Approved"


_STAGE_ORDER = {s: i for i, s in enumerate(Stage)}


@dataclass(frozen=True)
class AuditEvent:
    seq: int
    timestamp: float
    actor: str
    action: str
    payload: dict


def _wall_clock() -> float:
    return time.time()


class WorkflowStore:
    """Holds one conference and serializes all mutations through a lock."""

    def __init__(
        self,
        conference: Conference,
        *,
        clock: Callable[[], float] | None = None,
    ):
        conference.validate()
        self.conference = conference
        self.stage = Stage.Draft
        self.matrix: SimilarityMatrix | None = None
        self.coi_records: tuple[CoIRecord, ...] = ()
        self.proposal: AssignmentProposal | None = None
        self.audit: list[AuditEvent] = []
        self.corpus: BibCorpus | None = None
        self._clock = clock or _wall_clock
        self._lock = threading.RLock()
        self._audit_sink: Path | None = None

    # -- audit -----------------------------------------------------------

    def _record(self, actor: str, action: str, payload: dict) -> None:
        now = self._clock()
        if self.audit:
            now = max(now, self.audit[-1].timestamp)
        event = AuditEvent(len(self.audit) + 1, now, actor, action, payload)
        self.audit.append(event)
        if self._audit_sink is not None:
            with self._audit_sink.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(_event_to_dict(event), sort_keys=True) + "\n")

    def _require_stage(self, *allowed: Stage) -> None:
        if self.stage not in allowed:
            names = "/".join(s.value for s in allowed)
            raise IllegalState(f"operation requires stage {names}, current is {self.stage.value}")

    def _require_at_least(self, minimum: Stage) -> None:
        if _STAGE_ORDER[self.stage] < _STAGE_ORDER[minimum]:
            raise IllegalState(
                f"operation requires stage {minimum.value} or later, current is {self.stage.value}"
            )

    # -- pipeline -----------------------------------------------------------

    def attach_bibliography(self, corpus: BibCorpus) -> None:
        self.corpus = corpus

    def _preprocessed_conference(self) -> Conference:
        conf = self.conference
        cfg = conf.config
        reviewers = conf.reviewers
        if cfg.expand_selections:
            reviewers = tuple(
                replace(
                    rv,
                    selection=expand_reviewer_selection(
                        conf.taxonomy, rv.selection, cfg.depth_threshold
                    ),
                )
                for rv in reviewers
            )
        papers = conf.papers
        if cfg.reduce_paper_sets:
            papers = tuple(
                replace(p, keywords=reduce_parent_child(conf.taxonomy, p.keywords))
                for p in papers
            )
        return replace(conf, papers=papers, reviewers=reviewers)

    def detect_conflicts(self, current_year: int | None = None) -> tuple[CoIRecord, ...]:
        """Run all enabled detectors plus explicit declarations; no state change."""
        conf = self.conference
        record_sets = [
            coi_mod.explicit_coi_records(conf),
            coi_mod.detect_same_country(conf, conf.config.same_country_rule),
            coi_mod.detect_same_institution(conf),
            coi_mod.detect_local_coauthorship(conf),
        ]
        if self.corpus is not None:
            record_sets.append(
                coi_mod.detect_historical_coauthorship(
                    self.corpus, conf, conf.config.year_window, current_year
                )
            )
        return coi_mod.merge_records(record_sets)

    def run_pipeline(
        self, *, actor: str = "system", current_year: int | None = None
    ) -> SimilarityMatrix:
        """Apply keyword rules, detect conflicts, build the merged matrix."""
        with self._lock:
            self.conference.validate()
            records = self.detect_conflicts(current_year)
            processed = self._preprocessed_conference()
            self.matrix = build_similarity_matrix(processed.taxonomy, processed, records)
            self.coi_records = records
            self.proposal = None
            self.stage = Stage.MatrixBuilt
            self._record(actor, "run_pipeline", {"current_year": current_year})
            return self.matrix

    # -- proposal ---------------------------------------------------------

    def _problem(
        self,
        pinned: Iterable[tuple[str, str]] = (),
        forbidden: Iterable[tuple[str, str]] = (),
    ) -> AssignmentProblem:
        assert self.matrix is not None
        return AssignmentProblem(
            matrix=self.matrix,
            k=self.conference.config.k,
            capacity=self.conference.effective_capacities(),
            excluded=frozenset(forbidden),
            pinned=tuple(pinned),
        )

    def _solve(self, problem: AssignmentProblem) -> AssignmentProposal:
        solver = solve_greedy if self.conference.config.solver == "greedy" else solve_multipass
        return solver(problem)

    def propose(self, *, actor: str = "chair") -> AssignmentProposal:
        """Run the configured solver; replaces any previous proposal."""
        with self._lock:
            self._require_at_least(Stage.MatrixBuilt)
            proposal = self._solve(self._problem())
            self.proposal = proposal
            self.stage = Stage.Proposed
            self._record(actor, "propose", {"edges": len(proposal.edges)})
            return proposal

    def _current_edges(self) -> list[Edge]:
        if self.proposal is None:
            raise IllegalState("no proposal exists yet")
        return list(self.proposal.edges)

    def approve(self, edge_ids: list[str] | None, *, actor: str = "chair") -> Stage:
        """Approve all edges (None) or the listed edge ids."""
        with self._lock:
            self._require_stage(Stage.Proposed, Stage.PartiallyApproved)
            edges = self._current_edges()
            known = {e.edge_id for e in edges}
            if edge_ids is not None:
                unknown = [e for e in edge_ids if e not in known]
                if unknown:
                    raise UnknownEdge(f"unknown edge ids: {unknown}")
            self.proposal = approve_edges(self.proposal, edge_ids)  # type: ignore[arg-type]
            done = all(e.approval is Approval.Approved for e in self.proposal.edges)
            self.stage = Stage.Approved if done else Stage.PartiallyApproved
            self._record(
                actor,
                "approve",
                {"edges": "all" if edge_ids is None else sorted(edge_ids)},
            )
            return self.stage

    def manual_assign(
        self,
        paper_id: str,
        reviewer_id: str,
        *,
        force: bool = False,
        actor: str = "chair",
    ) -> Edge:
        """Add a chair-made edge; force is required over conflicts or capacity."""
        with self._lock:
            self._require_at_least(Stage.Proposed)
            assert self.matrix is not None
            cell = self.matrix.cell(paper_id, reviewer_id)
            edges = self._current_edges()
            if any(e.pair == (paper_id, reviewer_id) for e in edges):
                raise DuplicateEdge(f"pair already assigned: ({paper_id}, {reviewer_id})")
            if cell.provenance is Provenance.Conflict and not force:
                raise ConflictRequiresForce(
                    f"({paper_id}, {reviewer_id}) is a conflict cell; pass force to override"
                )
            load = sum(1 for e in edges if e.reviewer_id == reviewer_id)
            capacity = self.conference.effective_capacities()[reviewer_id]
            if load >= capacity and not force:
                raise CapacityRequiresForce(
                    f"{reviewer_id} is at capacity {capacity}; pass force to override"
                )
            edge = Edge(
                paper_id,
                reviewer_id,
                cell.factor,
                pass_num=0,
                approval=Approval.Approved,
                origin=Origin.Manual,
            )
            self.proposal = AssignmentProposal(tuple(edges + [edge]))
            self._record(
                actor,
                "manual_assign",
                {
                    "paper_id": paper_id,
                    "reviewer_id": reviewer_id,
                    "force": force,
                    "conflict_override": cell.provenance is Provenance.Conflict,
                },
            )
            return edge

    def manual_unassign(
        self, paper_id: str, reviewer_id: str, *, actor: str = "chair"
    ) -> None:
        with self._lock:
            self._require_at_least(Stage.Proposed)
            edges = self._current_edges()
            kept = [e for e in edges if e.pair != (paper_id, reviewer_id)]
            if len(kept) == len(edges):
                raise UnknownEdge(f"no edge for pair ({paper_id}, {reviewer_id})")
            self.proposal = AssignmentProposal(tuple(kept))
            self._record(
                actor,
                "manual_unassign",
                {"paper_id": paper_id, "reviewer_id": reviewer_id},
            )

    def what_if(
        self,
        pinned: Iterable[tuple[str, str]] = (),
        forbidden: Iterable[tuple[str, str]] = (),
    ) -> AssignmentProposal:
        """Re-solve with pins and exclusions without touching stored state."""
        with self._lock:
            self._require_at_least(Stage.MatrixBuilt)
            assert self.matrix is not None
            for pair in list(pinned) + list(forbidden):
                self.matrix.cell(*pair)  # id validation only
            return self._solve(self._problem(pinned=pinned, forbidden=forbidden))

    # -- status / reporting --------------------------------------------------

    def underloaded_papers(self) -> list[str]:
        if self.proposal is None:
            return []
        counts = {p.id: 0 for p in self.conference.papers}
        for edge in self.proposal.edges:
            counts[edge.paper_id] = counts.get(edge.paper_id, 0) + 1
        return [pid for pid, n in counts.items() if n < self.conference.config.k]

    def status(self) -> dict:
        warnings = [
            f"paper {pid} has fewer than {self.conference.config.k} reviewers"
            for pid in self.underloaded_papers()
        ]
        return {
            "stage": self.stage.value,
            "papers": len(self.conference.papers),
            "reviewers": len(self.conference.reviewers),
            "k": self.conference.config.k,
            "matrix_built": self.matrix is not None,
            "proposal_edges": len(self.proposal.edges) if self.proposal else 0,
            "audit_length": len(self.audit),
            "warnings": warnings,
        }

    def state_hash(self) -> str:
        """Hash of the domain state (everything except the audit trail)."""
        doc = self.to_document()
        doc.pop("audit", None)
        blob = json.dumps(doc, sort_keys=True).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()

    # -- persistence -----------------------------------------------------

    def to_document(self) -> dict:
        return {
            "version": DOCUMENT_VERSION,
            "config": config_to_dict(self.conference.config),
            "taxonomy_ref": {
                "kind": "inline",
                "xml": self.conference.taxonomy.to_xml().decode("utf-8"),
            },
            "papers": [
                {
                    "id": p.id,
                    "title": p.title,
                    "author_ids": list(p.author_ids),
                    "keywords": sorted(p.keywords),
                }
                for p in self.conference.papers
            ],
            "reviewers": [
                {
                    "person_id": rv.person_id,
                    "selection": {kw: lvl.name for kw, lvl in sorted(rv.selection.items())},
                }
                for rv in self.conference.reviewers
            ],
            "roster": [
                {
                    "id": person.id,
                    "name": person.name,
                    "email": person.email,
                    "country": person.country,
                    "affiliation": person.affiliation,
                }
                for person in self.conference.roster
            ],
            "bids": [
                {"paper_id": p, "reviewer_id": r, "level": bid.value}
                for (p, r), bid in sorted(self.conference.bids.items())
            ],
            "explicit_cois": [
                {"paper_id": p, "reviewer_id": r} for p, r in self.conference.explicit_cois
            ],
            "stage": self.stage.value,
            "matrix": _matrix_to_dict(self.matrix, self.coi_records),
            "proposal": _proposal_to_dict(self.proposal),
            "audit": [_event_to_dict(e) for e in self.audit],
        }

    @classmethod
    def from_document(
        cls, doc: dict, *, clock: Callable[[], float] | None = None
    ) -> "WorkflowStore":
        try:
            version = doc["version"]
        except (TypeError, KeyError):
            raise MalformedDocument("document has no version field") from None
        if version != DOCUMENT_VERSION:
            raise SchemaVersionMismatch(
                f"document version {version!r}, engine supports {DOCUMENT_VERSION}"
            )
        try:
            conference = _conference_from_doc(doc)
            store = cls(conference, clock=clock)
            store.stage = Stage(doc.get("stage", "Draft"))
            matrix, records = _matrix_from_dict(doc.get("matrix"))
            store.matrix = matrix
            store.coi_records = records
            store.proposal = _proposal_from_dict(doc.get("proposal"))
            store.audit = [_event_from_dict(e) for e in doc.get("audit", [])]
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise MalformedDocument(f"cannot parse conference document: {exc}") from exc
        return store

    def save(self, path: str | Path) -> None:
        path = Path(path)
        path.write_text(
            json.dumps(self.to_document(), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
        audit_path = path.with_suffix(path.suffix + ".audit.jsonl")
        with audit_path.open("w", encoding="utf-8") as fh:
            for event in self.audit:
                fh.write(json.dumps(_event_to_dict(event), sort_keys=True) + "\n")
        self._audit_sink = audit_path

    @classmethod
    def load(
        cls, path: str | Path, *, clock: Callable[[], float] | None = None
    ) -> "WorkflowStore":
        path = Path(path)
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise MalformedDocument(f"cannot read document {path}: {exc}") from exc
        store = cls.from_document(doc, clock=clock)
        store._audit_sink = path.with_suffix(path.suffix + ".audit.jsonl")
        return store


def replay_audit(
    conference: Conference,
    events: Iterable[AuditEvent],
    *,
    corpus: BibCorpus | None = None,
) -> WorkflowStore:
    """Rebuild a store by re-running the audited mutations in order."""
    store = WorkflowStore(conference)
    if corpus is not None:
        store.attach_bibliography(corpus)
    for event in events:
        payload = event.payload
        if event.action == "run_pipeline":
            store.run_pipeline(actor=event.actor, current_year=payload.get("current_year"))
        elif event.action == "propose":
            store.propose(actor=event.actor)
        elif event.action == "approve":
            edges = payload["edges"]
            store.approve(None if edges == "all" else list(edges), actor=event.actor)
        elif event.action == "manual_assign":
            store.manual_assign(
                payload["paper_id"],
                payload["reviewer_id"],
                force=payload.get("force", False),
                actor=event.actor,
            )
        elif event.action == "manual_unassign":
            store.manual_unassign(
                payload["paper_id"], payload["reviewer_id"], actor=event.actor
            )
        else:
            raise ValueError(f"unknown audit action: {event.action}")
    return store


# ---------------------------------------------------------------------------
# document (de)serialization helpers
# ---------------------------------------------------------------------------

def config_to_dict(config: Config) -> dict:
    return {
        "k": config.k,
        "capacities": dict(config.capacities),
        "depth_threshold": config.depth_threshold,
        "level_weights": {lvl.name: w for lvl, w in config.level_weights.items()},
        "bid_mode": config.bid_mode.value,
        "same_country_rule": config.same_country_rule,
        "year_window": config.year_window,
        "solver": config.solver,
        "expand_selections": config.expand_selections,
        "reduce_paper_sets": config.reduce_paper_sets,
        "restrict_to_closest": config.restrict_to_closest,
    }


def config_from_dict(data: dict) -> Config:
    defaults = Config()
    weights = {
        CompetenceLevel[name]: float(w)
        for name, w in data.get("level_weights", {}).items()
    } or defaults.level_weights
    return Config(
        k=int(data.get("k", defaults.k)),
        capacities={str(k): int(v) for k, v in data.get("capacities", {}).items()},
        depth_threshold=int(data.get("depth_threshold", defaults.depth_threshold)),
        level_weights=weights,
        bid_mode=BidMode(data.get("bid_mode", defaults.bid_mode.value)),
        same_country_rule=bool(data.get("same_country_rule", defaults.same_country_rule)),
        year_window=int(data.get("year_window", defaults.year_window)),
        solver=str(data.get("solver", defaults.solver)),
        expand_selections=bool(data.get("expand_selections", defaults.expand_selections)),
        reduce_paper_sets=bool(data.get("reduce_paper_sets", defaults.reduce_paper_sets)),
        restrict_to_closest=bool(
            data.get("restrict_to_closest", defaults.restrict_to_closest)
        ),
    )


def conference_from_parts(
    taxonomy: Taxonomy,
    papers: list[dict],
    reviewers: list[dict],
    roster: list[dict],
    bids: list[dict] | None = None,
    explicit_cois: list[dict] | None = None,
    config: dict | None = None,
) -> Conference:
    """Build a validated Conference from plain JSON-shaped pieces."""
    conference = Conference(
        taxonomy=taxonomy,
        papers=tuple(
            Paper(
                id=str(p["id"]),
                title=str(p.get("title", p["id"])),
                author_ids=tuple(p.get("author_ids", [])),
                keywords=frozenset(p.get("keywords", [])),
            )
            for p in papers
        ),
        reviewers=tuple(
            Reviewer(
                person_id=str(rv["person_id"]),
                selection={
                    kw: CompetenceLevel[lvl] for kw, lvl in rv.get("selection", {}).items()
                },
            )
            for rv in reviewers
        ),
        roster=tuple(
            Person(
                id=str(p["id"]),
                name=str(p.get("name", p["id"])),
                email=str(p.get("email", f"{p['id']}@example.org")),
                country=str(p.get("country", "")),
                affiliation=str(p.get("affiliation", "")),
            )
            for p in roster
        ),
        bids={
            (str(b["paper_id"]), str(b["reviewer_id"])): Bid(b["level"])
            for b in (bids or [])
        },
        explicit_cois=tuple(
            (str(c["paper_id"]), str(c["reviewer_id"])) for c in (explicit_cois or [])
        ),
        config=config_from_dict(config or {}),
    )
    conference.validate()
    return conference


def _conference_from_doc(doc: dict) -> Conference:
    taxonomy = load_taxonomy_xml(doc["taxonomy_ref"]["xml"])
    return conference_from_parts(
        taxonomy,
        doc.get("papers", []),
        doc.get("reviewers", []),
        doc.get("roster", []),
        doc.get("bids", []),
        doc.get("explicit_cois", []),
        doc.get("config", {}),
    )


def _matrix_to_dict(
    matrix: SimilarityMatrix | None, records: tuple[CoIRecord, ...]
) -> dict | None:
    if matrix is None:
        return None
    return {
        "papers": list(matrix.papers),
        "reviewers": list(matrix.reviewers),
        "cells": [
            [[cell.factor, cell.provenance.value] for cell in row] for row in matrix.cells
        ],
        "conflicts": [
            {
                "paper_id": r.paper_id,
                "reviewer_id": r.reviewer_id,
                "reason": r.reason.value,
                "evidence": r.evidence,
            }
            for r in records
        ],
    }


def _matrix_from_dict(
    data: dict | None,
) -> tuple[SimilarityMatrix | None, tuple[CoIRecord, ...]]:
    if data is None:
        return None, ()
    matrix = SimilarityMatrix(
        data["papers"],
        data["reviewers"],
        [
            [Cell(float(factor), Provenance(prov)) for factor, prov in row]
            for row in data["cells"]
        ],
    )
    records = tuple(
        CoIRecord(
            c["paper_id"], c["reviewer_id"], CoIReason(c["reason"]), c["evidence"]
        )
        for c in data.get("conflicts", [])
    )
    return matrix, records


def _proposal_to_dict(proposal: AssignmentProposal | None) -> list[dict] | None:
    if proposal is None:
        return None
    return [
        {
            "paper_id": e.paper_id,
            "reviewer_id": e.reviewer_id,
            "factor": e.factor,
            "pass": e.pass_num,
            "approval": e.approval.value,
            "origin": e.origin.value,
        }
        for e in proposal.edges
    ]


def _proposal_from_dict(data: list[dict] | None) -> AssignmentProposal | None:
    if data is None:
        return None
    return AssignmentProposal(
        tuple(
            Edge(
                e["paper_id"],
                e["reviewer_id"],
                float(e["factor"]),
                pass_num=int(e["pass"]),
                approval=Approval(e["approval"]),
                origin=Origin(e["origin"]),
            )
            for e in data
        )
    )


def _event_to_dict(event: AuditEvent) -> dict:
    return {
        "seq": event.seq,
        "timestamp": event.timestamp,
        "actor": event.actor,
        "action": event.action,
        "payload": event.payload,
    }


def _event_from_dict(data: dict) -> AuditEvent:
    return AuditEvent(
        seq=int(data["seq"]),
        timestamp=float(data["timestamp"]),
        actor=str(data["actor"]),
        action=str(data["action"]),
        payload=dict(data["payload"]),
    )


def proposal_view(store: WorkflowStore) -> dict:
    """JSON-shaped proposal payload shared by the CLI and the service."""
    edges = []
    if store.proposal is not None:
        edges = [
            {
                "edge_id": e.edge_id,
                "paper_id": e.paper_id,
                "reviewer_id": e.reviewer_id,
                "factor": e.factor,
                "pass": e.pass_num,
                "approval": e.approval.value,
                "origin": e.origin.value,
            }
            for e in store.proposal.edges
        ]
    payload: dict[str, Any] = {"stage": store.stage.value, "edges": edges}
    if store.proposal is not None and store.matrix is not None:
        score = score_proposal(store.proposal, store.matrix)
        payload["total_weight"] = score.total_weight
        payload["min_edge"] = score.min_edge
        payload["load"] = score.load
    payload["capacity"] = store.conference.effective_capacities()
    return payload


def matrix_view(store: WorkflowStore) -> dict:
    """JSON-shaped matrix payload with titles, names, and conflict reasons."""
    if store.matrix is None:
        return {"stage": store.stage.value, "papers": [], "reviewers": [], "cells": []}
    roster = store.conference.roster_by_id()
    titles = {p.id: p.title for p in store.conference.papers}
    reasons: dict[tuple[str, str], list[str]] = {}
    for record in store.coi_records:
        reasons.setdefault((record.paper_id, record.reviewer_id), []).append(
            f"{record.reason.value}: {record.evidence}"
        )
    return {
        "stage": store.stage.value,
        "papers": [
            {"id": pid, "title": titles.get(pid, pid)} for pid in store.matrix.papers
        ],
        "reviewers": [
            {"id": rid, "name": roster[rid].name if rid in roster else rid}
            for rid in store.matrix.reviewers
        ],
        "cells": [
            [
                {
                    "factor": cell.factor,
                    "provenance": cell.provenance.value,
                    "conflict_reasons": reasons.get((pid, rid), []),
                }
                for rid, cell in zip(store.matrix.reviewers, row)
            ]
            for pid, row in zip(store.matrix.papers, store.matrix.cells)
        ],
    }


def coi_view(store: WorkflowStore) -> list[dict]:
    return [
        {
            "paper_id": r.paper_id,
            "reviewer_id": r.reviewer_id,
            "reason": r.reason.value,
            "evidence": r.evidence,
        }
        for r in store.coi_records
    ]
