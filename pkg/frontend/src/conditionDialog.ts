/** The flow-condition dialog: structured pickers, never free text.
 *
 * Authors compose "finished with a score over 80" from a metric picker,
 * a comparator picker and a number stepper (or tick "completed"); the
 * resulting source string is round-tripped through the server's parse
 * endpoint before it may be saved, so the browser never owns the grammar.
 */

import { ApiError, CanvasApi } from './api.js';
import type { ParseResponse } from './types.js';

export const METRICS = ['score', 'attempts', 'duration'] as const;
export const COMPARATORS = ['>=', '>', '<=', '<', '==', '!='] as const;

export type Metric = (typeof METRICS)[number];
export type Comparator = (typeof COMPARATORS)[number];

export interface ConditionDraft {
  kind: 'comparison' | 'completed' | 'default';
  metric: Metric;
  comparator: Comparator;
  value: number;
}

export function initialDraft(): ConditionDraft {
  return { kind: 'comparison', metric: 'score', comparator: '>=', value: 80 };
}

/** The condition source assembled from picker state; null = default edge. */
export function buildSource(draft: ConditionDraft): string | null {
  if (draft.kind === 'default') {
    return null;
  }
  if (draft.kind === 'completed') {
    return 'completed';
  }
  return `${draft.metric} ${draft.comparator} ${draft.value}`;
}

export interface ConfirmedCondition {
  source: string | null;
  diagnostic: ParseResponse['diagnostic'] | null;
}

/** Validate through the service; only a canonical condition may be saved. */
export async function confirmDraft(
  api: CanvasApi,
  draft: ConditionDraft,
): Promise<ConfirmedCondition> {
  const source = buildSource(draft);
  if (source === null) {
    return { source: null, diagnostic: null };
  }
  try {
    const parsed = await api.parseCondition(source);
    if (!parsed.ok || !parsed.canonical) {
      return { source: null, diagnostic: parsed.diagnostic ?? null };
    }
    return { source: parsed.canonical, diagnostic: null };
  } catch (err) {
    if (err instanceof ApiError) {
      const body = err.body as { diagnostic?: ParseResponse['diagnostic'] } | null;
      return { source: null, diagnostic: body?.diagnostic ?? null };
    }
    throw err;
  }
}

/** Render the dialog; every widget is a picker or stepper. */
export function renderDialog(
  doc: Document,
  draft: ConditionDraft,
  onChange: (draft: ConditionDraft) => void,
): HTMLElement {
  const dialog = doc.createElement('div');
  dialog.className = 'condition-dialog';
  dialog.setAttribute('role', 'group');

  const kind = doc.createElement('select');
  kind.className = 'condition-kind';
  for (const option of ['comparison', 'completed', 'default']) {
    const el = doc.createElement('option');
    el.value = option;
    el.textContent = option;
    kind.appendChild(el);
  }
  kind.value = draft.kind;
  kind.addEventListener('change', () =>
    onChange({ ...draft, kind: kind.value as ConditionDraft['kind'] }),
  );
  dialog.appendChild(kind);

  const metric = doc.createElement('select');
  metric.className = 'condition-metric';
  for (const option of METRICS) {
    const el = doc.createElement('option');
    el.value = option;
    el.textContent = option;
    metric.appendChild(el);
  }
  metric.value = draft.metric;
  metric.addEventListener('change', () =>
    onChange({ ...draft, metric: metric.value as Metric }),
  );
  dialog.appendChild(metric);

  const comparator = doc.createElement('select');
  comparator.className = 'condition-comparator';
  for (const option of COMPARATORS) {
    const el = doc.createElement('option');
    el.value = option;
    el.textContent = option;
    comparator.appendChild(el);
  }
  comparator.value = draft.comparator;
  comparator.addEventListener('change', () =>
    onChange({ ...draft, comparator: comparator.value as Comparator }),
  );
  dialog.appendChild(comparator);

  const value = doc.createElement('input');
  value.type = 'number';
  value.className = 'condition-value';
  value.min = '0';
  value.step = '1';
  value.value = String(draft.value);
  value.addEventListener('change', () =>
    onChange({ ...draft, value: Number(value.value) }),
  );
  dialog.appendChild(value);

  return dialog;
}
