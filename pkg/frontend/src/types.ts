// Wire payloads of the gateway API. The console renders these as-is and
// never recomputes factors client-side.

export type Stage =
  | 'Draft'
  | 'MatrixBuilt'
  | 'Proposed'
  | 'PartiallyApproved'
  | 'Approved';

export type Provenance = 'Computed' | 'Bid' | 'Conflict';

export interface StatusPayload {
  stage: Stage;
  papers: number;
  reviewers: number;
  k: number;
  matrix_built: boolean;
  proposal_edges: number;
  audit_length: number;
  warnings: string[];
}

export interface MatrixCell {
  factor: number;
  provenance: Provenance;
  conflict_reasons: string[];
}

export interface MatrixPayload {
  stage: Stage;
  papers: { id: string; title: string }[];
  reviewers: { id: string; name: string }[];
  cells: MatrixCell[][];
}

export interface ProposalEdge {
  edge_id: string;
  paper_id: string;
  reviewer_id: string;
  factor: number;
  pass: number;
  approval: 'Pending' | 'Approved' | 'Rejected';
  origin: 'Automatic' | 'Manual';
}

export interface ProposalPayload {
  stage: Stage;
  edges: ProposalEdge[];
  total_weight?: number;
  min_edge?: number | null;
  load?: Record<string, number>;
  capacity: Record<string, number>;
}

export interface WhatIfEdge {
  edge_id: string;
  paper_id: string;
  reviewer_id: string;
  factor: number;
  pass: number;
  origin: 'Automatic' | 'Manual';
}

export interface WhatIfPayload {
  stage: Stage;
  edges: WhatIfEdge[];
  total_weight: number;
}

export interface CoiRecord {
  paper_id: string;
  reviewer_id: string;
  reason: string;
  evidence: string;
}

export interface Pair {
  paper_id: string;
  reviewer_id: string;
}
