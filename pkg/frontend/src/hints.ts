/** The avatar hint panel: validation issues rendered as otter speech.
 *
 * Errors and warnings arrive from the validate endpoint; templates here
 * only phrase them per locale. Clicking a hint highlights the nodes it
 * is about; an empty report leaves the avatar idling.
 */

import type { ValidationIssue, ValidationReport } from './types.js';

type Phrases = Record<ValidationIssue['code'], (nodes: string) => string>;

const PHRASES: Record<string, Phrases> = {
  en: {
    NeverEnds: (nodes) => `Oh no, this composition never ends! Check ${nodes}.`,
    UnknownModuleRef: (nodes) => `I cannot find the module behind ${nodes}.`,
    NoDefaultEdge: (nodes) =>
      `A learner could get stuck at ${nodes}; add a fallback arrow.`,
    UnreachableNode: (nodes) => `${nodes} can never be reached from the start.`,
    Revisit: (nodes) => `${nodes} may be visited more than once. Intended?`,
  },
  nb: {
    NeverEnds: (nodes) => `Å nei, denne komposisjonen slutter aldri! Se på ${nodes}.`,
    UnknownModuleRef: (nodes) => `Jeg finner ikke modulen bak ${nodes}.`,
    NoDefaultEdge: (nodes) =>
      `En elev kan sette seg fast ved ${nodes}; legg til en reservepil.`,
    UnreachableNode: (nodes) => `${nodes} kan aldri nås fra start.`,
    Revisit: (nodes) => `${nodes} kan bli besøkt flere ganger. Er det meningen?`,
  },
};

const IDLE: Record<string, string> = {
  en: 'Everything looks good!',
  nb: 'Alt ser bra ut!',
};

export function phraseIssue(issue: ValidationIssue, locale: string): string {
  const phrases = PHRASES[locale] ?? PHRASES.en;
  return phrases[issue.code](issue.subject.join(', '));
}

export class AvatarHintPanel {
  readonly element: HTMLElement;

  constructor(
    doc: Document,
    private readonly locale: string = 'en',
    private readonly onHighlight: (nodeIds: string[]) => void = () => {},
  ) {
    this.element = doc.createElement('aside');
    this.element.className = 'avatar-hints avatar-idle';
    this.element.setAttribute('aria-live', 'polite');
  }

  render(report: ValidationReport | null): void {
    const doc = this.element.ownerDocument;
    this.element.textContent = '';
    const issues = report ? [...report.errors, ...report.warnings] : [];
    if (issues.length === 0) {
      this.element.classList.add('avatar-idle');
      const idle = doc.createElement('p');
      idle.className = 'avatar-speech idle';
      idle.textContent = IDLE[this.locale] ?? IDLE.en;
      this.element.appendChild(idle);
      return;
    }
    this.element.classList.remove('avatar-idle');
    const list = doc.createElement('ul');
    for (const issue of issues) {
      const item = doc.createElement('li');
      const button = doc.createElement('button');
      button.type = 'button';
      button.className = `avatar-speech hint-${issue.code}`;
      button.dataset.severity = report!.errors.includes(issue) ? 'error' : 'warning';
      button.dataset.subject = issue.subject.join(',');
      button.textContent = phraseIssue(issue, this.locale);
      button.addEventListener('click', () => this.onHighlight([...issue.subject]));
      item.appendChild(button);
      list.appendChild(item);
    }
    this.element.appendChild(list);
  }
}
