/** Child-friendly input handling: tap debouncing and hit-box slack.
 *
 * Young users double- and triple-tap; a burst inside the debounce window
 * must trigger exactly one action. Their aim is imprecise; every
 * interactive target answers to pointer events some margin outside its
 * visual bounds.
 */

import { DEFAULT_CONFIG, UiConfig } from './config.js';
import type { Point } from './types.js';

export class TapDebouncer {
  private lastFired = Number.NEGATIVE_INFINITY;

  constructor(
    private readonly windowMs: number = DEFAULT_CONFIG.tapDebounceMs,
    private readonly clock: () => number = () => Date.now(),
  ) {}

  /** True exactly once per burst: the first tap fires, the rest buffer. */
  tryFire(): boolean {
    const now = this.clock();
    if (now - this.lastFired < this.windowMs) {
      return false;
    }
    this.lastFired = now;
    return true;
  }
}

/** Wrap a handler so a multi-tap burst within the window runs it once. */
export function debounced(
  handler: (event: Event) => void,
  windowMs: number = DEFAULT_CONFIG.tapDebounceMs,
  clock?: () => number,
): (event: Event) => void {
  const gate = new TapDebouncer(windowMs, clock);
  return (event: Event) => {
    if (gate.tryFire()) {
      handler(event);
    }
  };
}

export interface Rect {
  x: number;
  y: number;
  width: number;
  height: number;
}

/** Does the point land inside the rect grown by the slack margin? */
export function hitContains(rect: Rect, point: Point, slackPx: number): boolean {
  return (
    point.x >= rect.x - slackPx &&
    point.x <= rect.x + rect.width + slackPx &&
    point.y >= rect.y - slackPx &&
    point.y <= rect.y + rect.height + slackPx
  );
}

/**
 * Build an interactive control whose hit region exceeds its visual bounds.
 * The padding extends the clickable area by the slack margin on every side
 * while the negative margin keeps the visual layout unchanged; the data
 * attribute lets tests (and the canvas hit-tester) read the slack back.
 */
export function makeControl(
  doc: Document,
  label: string,
  onActivate: (event: Event) => void,
  config: UiConfig = DEFAULT_CONFIG,
  clock?: () => number,
): HTMLButtonElement {
  const button = doc.createElement('button');
  button.type = 'button';
  button.textContent = label;
  button.dataset.hitSlack = String(config.hitSlackPx);
  button.style.minWidth = `${config.minTargetPx}px`;
  button.style.minHeight = `${config.minTargetPx}px`;
  button.style.padding = `${config.hitSlackPx}px`;
  button.style.margin = `-${config.hitSlackPx}px`;
  const activate = debounced(onActivate, config.tapDebounceMs, clock);
  button.addEventListener('click', activate);
  button.addEventListener('keydown', (event) => {
    if (event.key === 'Enter' || event.key === ' ') {
      event.preventDefault();
      activate(event);
    }
  });
  return button;
}
