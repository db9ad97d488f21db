import { ApiClient, ApiError } from './api.js';
import type {
  CoiRecord,
  MatrixPayload,
  Pair,
  ProposalPayload,
  StatusPayload,
  WhatIfPayload,
} from './types.js';

/**
 * Asked before a reassignment lands on a conflict cell. Receives the
 * conflict evidence and must return what the user typed; the force request
 * is only sent when the typed text equals the target reviewer id.
 * Return null to cancel.
 */
export type ForceConfirmer = (question: {
  paperId: string;
  reviewerId: string;
  reasons: string[];
}) => Promise<string | null>;

export interface ReassignResult {
  mutated: boolean;
  cancelled?: boolean;
  error?: string;
}

export interface WhatIfDiff {
  added: Pair[];
  removed: Pair[];
  kept: Pair[];
  totalDelta: number;
  hypotheticalTotal: number;
}

const pairKey = (p: Pair) => `${p.paper_id}|${p.reviewer_id}`;

/**
 * Holds the server-mirrored view state. The console is never authoritative:
 * every mutation goes through the API and is followed by a full refresh, so
 * a hard reload reproduces exactly what this controller holds.
 */
export class ConsoleController {
  status: StatusPayload | null = null;
  matrix: MatrixPayload | null = null;
  proposal: ProposalPayload | null = null;
  conflicts: CoiRecord[] = [];
  banner: string | null = null;

  constructor(private readonly api: ApiClient) {}

  async refresh(): Promise<void> {
    this.status = await this.api.getStatus();
    this.matrix = await this.api.getMatrix();
    this.proposal = await this.api.getProposal();
    this.conflicts = await this.api.getConflicts();
  }

  dismissBanner(): void {
    this.banner = null;
  }

  private async guarded<T>(call: () => Promise<T>): Promise<T | null> {
    try {
      const result = await call();
      this.banner = null;
      return result;
    } catch (err) {
      // roll the view back to server truth and surface the domain error name
      this.banner = err instanceof ApiError ? err.name : String(err);
      return null;
    } finally {
      await this.refresh();
    }
  }

  async buildMatrix(): Promise<void> {
    await this.guarded(() => this.api.buildMatrix());
  }

  async propose(): Promise<void> {
    await this.guarded(() => this.api.propose());
  }

  async approveAll(): Promise<void> {
    await this.guarded(() => this.api.approve('all'));
  }

  async approveEdges(edgeIds: string[]): Promise<void> {
    await this.guarded(() => this.api.approve(edgeIds));
  }

  cellOf(paperId: string, reviewerId: string) {
    if (!this.matrix) return null;
    const i = this.matrix.papers.findIndex((p) => p.id === paperId);
    const j = this.matrix.reviewers.findIndex((r) => r.id === reviewerId);
    if (i < 0 || j < 0) return null;
    return this.matrix.cells[i][j];
  }

  /**
   * Move a paper from one reviewer to another (unassign + assign). When the
   * target cell is a conflict, the confirmer runs BEFORE anything is sent;
   * cancelling leaves the server untouched.
   */
  async reassign(
    paperId: string,
    fromReviewer: string,
    toReviewer: string,
    confirm: ForceConfirmer,
  ): Promise<ReassignResult> {
    const target = this.cellOf(paperId, toReviewer);
    let force = false;
    if (target && target.provenance === 'Conflict') {
      const typed = await confirm({
        paperId,
        reviewerId: toReviewer,
        reasons: target.conflict_reasons,
      });
      if (typed !== toReviewer) {
        return { mutated: false, cancelled: true };
      }
      force = true;
    }
    try {
      await this.api.removeEdge(paperId, fromReviewer);
    } catch (err) {
      this.banner = err instanceof ApiError ? err.name : String(err);
      await this.refresh();
      return { mutated: false, error: this.banner ?? undefined };
    }
    try {
      await this.api.addEdge(paperId, toReviewer, force);
    } catch (err) {
      // restore the removed edge so the UI ends where the server is
      this.banner = err instanceof ApiError ? err.name : String(err);
      await this.api.addEdge(paperId, fromReviewer, true).catch(() => undefined);
      await this.refresh();
      return { mutated: false, error: this.banner ?? undefined };
    }
    await this.refresh();
    return { mutated: true };
  }

  /** Re-solve with constraints and diff the result against the live proposal. */
  async whatIf(pinned: Pair[], forbidden: Pair[]): Promise<WhatIfDiff | null> {
    let result: WhatIfPayload;
    try {
      result = await this.api.whatIf(pinned, forbidden);
    } catch (err) {
      this.banner = err instanceof ApiError ? err.name : String(err);
      return null;
    }
    const current = new Map<string, Pair>();
    for (const e of this.proposal?.edges ?? []) {
      current.set(pairKey(e), { paper_id: e.paper_id, reviewer_id: e.reviewer_id });
    }
    const hypothetical = new Map<string, Pair>();
    for (const e of result.edges) {
      hypothetical.set(pairKey(e), { paper_id: e.paper_id, reviewer_id: e.reviewer_id });
    }
    const added: Pair[] = [];
    const kept: Pair[] = [];
    const removed: Pair[] = [];
    for (const [key, pair] of hypothetical) {
      (current.has(key) ? kept : added).push(pair);
    }
    for (const [key, pair] of current) {
      if (!hypothetical.has(key)) removed.push(pair);
    }
    const currentTotal = this.proposal?.total_weight ?? 0;
    return {
      added,
      removed,
      kept,
      totalDelta: result.total_weight - currentTotal,
      hypotheticalTotal: result.total_weight,
    };
  }
}
