"""confassign: paper-reviewer assignment engine with a chair approval workflow."""

from .bids import Bid, BidMode, apply_bids, dynamic_bid_to_similarity, static_bid_to_similarity
from .coi import (
    BibCorpus,
    BibRecord,
    CoIReason,
    CoIRecord,
    Person,
    detect_historical_coauthorship,
    detect_local_coauthorship,
    detect_same_country,
    detect_same_institution,
    ingest_bibliography,
    names_match,
    normalize_name,
)
from .conference import Conference, Config, Paper, Reviewer
from .errors import EngineError, Infeasible
from .rules import (
    CompetenceLevel,
    expand_reviewer_selection,
    reduce_parent_child,
    restrict_to_closest,
)
from .similarity import (
    Cell,
    Provenance,
    SimilarityMatrix,
    build_similarity_matrix,
    keyword_pair_similarity,
    level_weight,
    set_similarity,
)
from .solver import (
    Approval,
    AssignmentProblem,
    AssignmentProposal,
    Edge,
    Origin,
    ProposalScore,
    default_capacity,
    hungarian_max_weight,
    score_proposal,
    solve_greedy,
    solve_multipass,
)
from .taxonomy import Taxonomy, load_taxonomy_xml
from .workflow import AuditEvent, Stage, WorkflowStore, replay_audit

__all__ = [
    "Approval",
    "AssignmentProblem",
    "AssignmentProposal",
    "AuditEvent",
    "Bid",
    "BidMode",
    "BibCorpus",
    "BibRecord",
    "Cell",
    "CoIReason",
    "CoIRecord",
    "CompetenceLevel",
    "Conference",
    "Config",
    "Edge",
    "EngineError",
    "Infeasible",
    "Origin",
    "Paper",
    "Person",
    "ProposalScore",
    "Provenance",
    "Reviewer",
    "SimilarityMatrix",
    "Stage",
    "Taxonomy",
    "WorkflowStore",
    "apply_bids",
    "build_similarity_matrix",
    "default_capacity",
    "detect_historical_coauthorship",
    "detect_local_coauthorship",
    "detect_same_country",
    "detect_same_institution",
    "dynamic_bid_to_similarity",
    "expand_reviewer_selection",
    "hungarian_max_weight",
    "ingest_bibliography",
    "keyword_pair_similarity",
    "level_weight",
    "load_taxonomy_xml",
    "names_match",
    "normalize_name",
    "reduce_parent_child",
    "replay_audit",
    "restrict_to_closest",
    "score_proposal",
    "set_similarity",
    "solve_greedy",
    "solve_multipass",
    "static_bid_to_similarity",
]
