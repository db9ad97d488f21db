// Pure HTML-string renderers. Keeping them DOM-free makes them trivially
// testable; main.ts owns all document wiring.

import type {
  MatrixPayload,
  ProposalPayload,
  Stage,
  StatusPayload,
} from './types.js';
import type { WhatIfDiff } from './controller.js';

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

/** Green ramp by factor; conflicts render red regardless of the 0.0 value. */
export function cellColor(factor: number, provenance: string): string {
  if (provenance === 'Conflict') return 'hsl(0, 72%, 82%)';
  const lightness = 96 - Math.round(factor * 46);
  return `hsl(140, 55%, ${lightness}%)`;
}

const BADGE: Record<string, string> = { Computed: 'C', Bid: 'B', Conflict: '!' };

export function renderStatusChip(stage: Stage): string {
  return `<span class="chip chip-${stage.toLowerCase()}" data-stage="${stage}">${stage}</span>`;
}

export function renderBanner(error: string | null): string {
  if (!error) return '';
  return (
    `<div class="banner" role="alert">${escapeHtml(error)}` +
    `<button data-action="dismiss-banner">×</button></div>`
  );
}

export function renderMatrix(matrix: MatrixPayload): string {
  if (!matrix.papers.length) {
    return '<p class="empty">No matrix yet. Build it first.</p>';
  }
  const head = matrix.reviewers
    .map((r) => `<th title="${escapeHtml(r.id)}">${escapeHtml(r.name)}</th>`)
    .join('');
  const rows = matrix.papers
    .map((paper, i) => {
      const cells = matrix.cells[i]
        .map((cell, j) => {
          const reviewer = matrix.reviewers[j];
          const reasons = cell.conflict_reasons.map(escapeHtml).join('; ');
          return (
            `<td style="background:${cellColor(cell.factor, cell.provenance)}"` +
            ` data-paper="${escapeHtml(paper.id)}" data-reviewer="${escapeHtml(reviewer.id)}"` +
            (reasons ? ` title="${reasons}"` : '') +
            `>${cell.factor.toFixed(2)}` +
            `<sup class="badge badge-${cell.provenance.toLowerCase()}">${BADGE[cell.provenance]}</sup>` +
            `</td>`
          );
        })
        .join('');
      return `<tr><th title="${escapeHtml(paper.id)}">${escapeHtml(paper.title)}</th>${cells}</tr>`;
    })
    .join('');
  return `<table class="matrix"><thead><tr><th></th>${head}</tr></thead><tbody>${rows}</tbody></table>`;
}

function approvalsAllowed(stage: Stage): boolean {
  return stage === 'Proposed' || stage === 'PartiallyApproved';
}

export function renderProposal(proposal: ProposalPayload): string {
  if (!proposal.edges.length) {
    return '<p class="empty">No proposal yet.</p>';
  }
  const disabled = approvalsAllowed(proposal.stage) ? '' : ' disabled';
  const byPaper = new Map<string, typeof proposal.edges>();
  for (const edge of proposal.edges) {
    const list = byPaper.get(edge.paper_id) ?? [];
    list.push(edge);
    byPaper.set(edge.paper_id, list);
  }
  const papers = [...byPaper.entries()]
    .map(([paperId, edges]) => {
      const items = edges
        .map(
          (e) =>
            `<li data-edge="${escapeHtml(e.edge_id)}">` +
            `<input type="checkbox" data-action="approve-edge" data-edge-id="${escapeHtml(e.edge_id)}"` +
            `${e.approval === 'Approved' ? ' checked' : ''}${disabled}/>` +
            `${escapeHtml(e.reviewer_id)} <small>factor ${e.factor.toFixed(2)}, pass ${e.pass},` +
            ` ${e.origin}${e.origin === 'Manual' ? ' ✎' : ''}, ${e.approval}</small>` +
            `<button data-action="unassign" data-paper="${escapeHtml(paperId)}"` +
            ` data-reviewer="${escapeHtml(e.reviewer_id)}">remove</button></li>`,
        )
        .join('');
      return `<div class="paper"><h3>${escapeHtml(paperId)}</h3><ul>${items}</ul></div>`;
    })
    .join('');
  const loads = Object.entries(proposal.load ?? {})
    .map(([reviewer, count]) => {
      const cap = proposal.capacity[reviewer] ?? 1;
      const pct = Math.min(100, Math.round((count / cap) * 100));
      return (
        `<div class="load-row"><span>${escapeHtml(reviewer)}</span>` +
        `<div class="load-bar"><div class="load-fill" style="width:${pct}%"></div></div>` +
        `<span>${count}/${cap}</span></div>`
      );
    })
    .join('');
  const total =
    proposal.total_weight !== undefined
      ? `<p>total weight ${proposal.total_weight.toFixed(3)}</p>`
      : '';
  return (
    `<button data-action="approve-all"${disabled}>Approve all</button>` +
    `${total}<div class="papers">${papers}</div><div class="loads">${loads}</div>`
  );
}

export function renderWhatIfDiff(diff: WhatIfDiff | null): string {
  if (!diff) return '';
  if (!diff.added.length && !diff.removed.length) {
    return '<p class="empty">No change against the current proposal.</p>';
  }
  const line = (sign: string, cls: string) => (p: { paper_id: string; reviewer_id: string }) =>
    `<li class="${cls}">${sign} ${escapeHtml(p.paper_id)} ← ${escapeHtml(p.reviewer_id)}</li>`;
  return (
    `<ul class="diff">` +
    diff.removed.map(line('−', 'removed')).join('') +
    diff.added.map(line('+', 'added')).join('') +
    `</ul><p>total weight delta ${diff.totalDelta >= 0 ? '+' : ''}${diff.totalDelta.toFixed(3)}</p>`
  );
}

export function renderWarnings(status: StatusPayload): string {
  if (!status.warnings.length) return '';
  return `<ul class="warnings">${status.warnings
    .map((w) => `<li>${escapeHtml(w)}</li>`)
    .join('')}</ul>`;
}
