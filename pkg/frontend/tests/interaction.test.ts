import { describe, expect, it } from 'vitest';

import { DEFAULT_CONFIG } from '../src/config.js';
import { TapDebouncer, debounced, hitContains, makeControl } from '../src/interaction.js';
import { FakeClock } from './fakeServer.js';

describe('tap debouncing', () => {
  it('fires exactly once per burst inside the window', () => {
    const clock = new FakeClock();
    const gate = new TapDebouncer(300, clock.now);
    expect(gate.tryFire()).toBe(true);
    clock.advance(50);
    expect(gate.tryFire()).toBe(false);
    clock.advance(100);
    expect(gate.tryFire()).toBe(false);
    clock.advance(149);
    expect(gate.tryFire()).toBe(false); // 299 ms after the first tap
    clock.advance(1);
    expect(gate.tryFire()).toBe(true); // the window has passed
  });

  it('debounced wrapper runs the handler once per burst', () => {
    const clock = new FakeClock();
    let runs = 0;
    const handler = debounced(() => (runs += 1), 300, clock.now);
    for (let i = 0; i < 5; i += 1) {
      handler(new Event('click'));
      clock.advance(40);
    }
    expect(runs).toBe(1);
    clock.advance(300);
    handler(new Event('click'));
    expect(runs).toBe(2);
  });
});

describe('hit-box slack', () => {
  const rect = { x: 100, y: 100, width: 44, height: 44 };

  it('accepts points within the slack margin outside the visual bounds', () => {
    expect(hitContains(rect, { x: 96, y: 96 }, 8)).toBe(true);
    expect(hitContains(rect, { x: 150, y: 150 }, 8)).toBe(true);
    expect(hitContains(rect, { x: 92, y: 100 }, 8)).toBe(true);
  });

  it('rejects points beyond the slack margin', () => {
    expect(hitContains(rect, { x: 91, y: 100 }, 8)).toBe(false);
    expect(hitContains(rect, { x: 100, y: 161 }, 8)).toBe(false);
    expect(hitContains(rect, { x: 96, y: 96 }, 0)).toBe(false);
  });

  it('the hit region strictly exceeds the visual bounds', () => {
    const inside = { x: rect.x - 1, y: rect.y - 1 };
    expect(hitContains(rect, inside, 0)).toBe(false);
    expect(hitContains(rect, inside, DEFAULT_CONFIG.hitSlackPx)).toBe(true);
  });
});

describe('makeControl', () => {
  it('carries the slack and minimum target size', () => {
    const button = makeControl(document, 'Add', () => {});
    expect(button.dataset.hitSlack).toBe('8');
    expect(button.style.minWidth).toBe('44px');
    expect(button.style.minHeight).toBe('44px');
    expect(button.style.padding).toBe('8px');
    expect(button.style.margin).toBe('-8px');
  });

  it('a click burst triggers exactly one action', () => {
    const clock = new FakeClock();
    let runs = 0;
    const button = makeControl(document, 'Add', () => (runs += 1), DEFAULT_CONFIG, clock.now);
    for (let i = 0; i < 4; i += 1) {
      button.dispatchEvent(new MouseEvent('click'));
      clock.advance(60);
    }
    expect(runs).toBe(1);
  });

  it('keyboard activation goes through the same gate', () => {
    const clock = new FakeClock();
    let runs = 0;
    const button = makeControl(document, 'Add', () => (runs += 1), DEFAULT_CONFIG, clock.now);
    button.dispatchEvent(new KeyboardEvent('keydown', { key: 'Enter' }));
    clock.advance(50);
    button.dispatchEvent(new MouseEvent('click')); // the browser's synthetic click
    expect(runs).toBe(1);
  });
});
