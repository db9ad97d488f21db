import type {
  CoiRecord,
  MatrixPayload,
  Pair,
  ProposalPayload,
  Stage,
  StatusPayload,
  WhatIfPayload,
} from './types.js';

/** Domain error surfaced by the gateway (IllegalState, ConflictRequiresForce, ...). */
export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly name: string,
    detail: string,
  ) {
    super(detail);
  }
}

async function unwrap<T>(response: Response): Promise<T> {
  if (response.ok) {
    return (await response.json()) as T;
  }
  let name = `Http${response.status}`;
  let detail = response.statusText;
  try {
    const body = await response.json();
    if (body && typeof body.error === 'string') name = body.error;
    if (body && typeof body.detail === 'string') detail = body.detail;
  } catch {
    // non-JSON error body: keep the status text
  }
  throw new ApiError(response.status, name, detail);
}

export class ApiClient {
  constructor(private readonly base: string) {}

  private url(path: string): string {
    return `${this.base}${path}`;
  }

  private post<T>(path: string, body?: unknown): Promise<T> {
    return fetch(this.url(path), {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: body === undefined ? undefined : JSON.stringify(body),
    }).then((r) => unwrap<T>(r));
  }

  getStatus(): Promise<StatusPayload> {
    return fetch(this.url('/api/status')).then((r) => unwrap(r));
  }

  getMatrix(): Promise<MatrixPayload> {
    return fetch(this.url('/api/matrix')).then((r) => unwrap(r));
  }

  getProposal(): Promise<ProposalPayload> {
    return fetch(this.url('/api/proposal')).then((r) => unwrap(r));
  }

  getConflicts(): Promise<CoiRecord[]> {
    return fetch(this.url('/api/coi')).then((r) => unwrap(r));
  }

  buildMatrix(): Promise<{ stage: Stage }> {
    return this.post('/api/matrix');
  }

  propose(): Promise<ProposalPayload> {
    return this.post('/api/propose');
  }

  approve(edgeIds: 'all' | string[]): Promise<{ stage: Stage }> {
    return this.post('/api/approve', { edge_ids: edgeIds });
  }

  addEdge(paperId: string, reviewerId: string, force = false): Promise<{ stage: Stage }> {
    return this.post('/api/edges', {
      paper_id: paperId,
      reviewer_id: reviewerId,
      force,
    });
  }

  removeEdge(paperId: string, reviewerId: string): Promise<{ stage: Stage }> {
    return fetch(
      this.url(`/api/edges/${encodeURIComponent(paperId)}/${encodeURIComponent(reviewerId)}`),
      { method: 'DELETE' },
    ).then((r) => unwrap(r));
  }

  whatIf(pinned: Pair[], forbidden: Pair[]): Promise<WhatIfPayload> {
    return this.post('/api/whatif', { pinned, forbidden });
  }
}
