import { ApiClient } from './api.js';
import { ConsoleController } from './controller.js';
import type { Pair } from './types.js';
import {
  renderBanner,
  renderMatrix,
  renderProposal,
  renderStatusChip,
  renderWarnings,
  renderWhatIfDiff,
} from './render.js';

const api = new ApiClient('');
const controller = new ConsoleController(api);

const el = (id: string) => document.getElementById(id)!;

let lastDiffHtml = '';
let dragSource: { paper: string; reviewer: string } | null = null;

function paint(): void {
  el('status').innerHTML = controller.status
    ? renderStatusChip(controller.status.stage) + renderWarnings(controller.status)
    : '';
  el('banner').innerHTML = renderBanner(controller.banner);
  el('matrix').innerHTML = controller.matrix ? renderMatrix(controller.matrix) : '';
  el('proposal').innerHTML = controller.proposal
    ? renderProposal(controller.proposal)
    : '';
  el('whatif-result').innerHTML = lastDiffHtml;
  wireDragTargets();
}

async function refresh(): Promise<void> {
  await controller.refresh();
  paint();
}

/**
 * Force confirmation dialog: the chair must type the reviewer id to
 * override a conflict-of-interest cell.
 */
async function confirmForce(question: {
  paperId: string;
  reviewerId: string;
  reasons: string[];
}): Promise<string | null> {
  const evidence = question.reasons.join('\n') || 'conflict of interest';
  return window.prompt(
    `Assigning ${question.paperId} to ${question.reviewerId} overrides:\n` +
      `${evidence}\n\nType the reviewer id (${question.reviewerId}) to confirm:`,
  );
}

function wireDragTargets(): void {
  // proposal rows are drag sources, matrix cells are drop targets
  document.querySelectorAll<HTMLElement>('#proposal li[data-edge]').forEach((li) => {
    li.draggable = true;
    li.addEventListener('dragstart', () => {
      const [paper, reviewer] = (li.dataset.edge ?? '|').split('|');
      dragSource = { paper, reviewer };
    });
  });
  document.querySelectorAll<HTMLElement>('#matrix td[data-paper]').forEach((td) => {
    td.addEventListener('dragover', (event) => {
      if (dragSource && td.dataset.paper === dragSource.paper) event.preventDefault();
    });
    td.addEventListener('drop', async (event) => {
      event.preventDefault();
      if (!dragSource) return;
      const { paper, reviewer } = dragSource;
      dragSource = null;
      const target = td.dataset.reviewer!;
      if (target === reviewer) return;
      await controller.reassign(paper, reviewer, target, confirmForce);
      paint();
    });
  });
}

function collectPairs(textarea: HTMLTextAreaElement): Pair[] {
  // one "paper reviewer" pair per line
  return textarea.value
    .split('\n')
    .map((line) => line.trim().split(/\s+/))
    .filter((parts) => parts.length === 2)
    .map(([paper_id, reviewer_id]) => ({ paper_id, reviewer_id }));
}

document.addEventListener('click', async (event) => {
  const target = event.target as HTMLElement;
  const action = target.dataset.action;
  if (!action) return;
  if (action === 'dismiss-banner') {
    controller.dismissBanner();
    paint();
    return;
  }
  if (action === 'build-matrix') await controller.buildMatrix();
  if (action === 'propose') await controller.propose();
  if (action === 'approve-all') await controller.approveAll();
  if (action === 'approve-edge') {
    const edgeId = target.dataset.edgeId!;
    await controller.approveEdges([edgeId]);
  }
  if (action === 'unassign') {
    try {
      await api.removeEdge(target.dataset.paper!, target.dataset.reviewer!);
    } catch (err) {
      controller.banner = String(err);
    }
    await controller.refresh();
  }
  if (action === 'run-whatif') {
    const pins = collectPairs(el('whatif-pins') as HTMLTextAreaElement);
    const forbids = collectPairs(el('whatif-forbids') as HTMLTextAreaElement);
    const diff = await controller.whatIf(pins, forbids);
    lastDiffHtml = renderWhatIfDiff(diff);
  }
  paint();
});

refresh().catch((err) => {
  el('banner').innerHTML = renderBanner(String(err));
});
