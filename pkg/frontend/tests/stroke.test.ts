import { describe, expect, it } from 'vitest';

import { arcLength, downsample, isTap } from '../src/stroke';

describe('downsample', () => {
  it('keeps points at least 2px apart', () => {
    const dense = Array.from({ length: 100 }, (_, i) => ({ x: i * 0.5, y: 0 }));
    const out = downsample(dense);
    for (let i = 1; i < out.length - 1; i++) {
      const d = Math.hypot(out[i].x - out[i - 1].x, out[i].y - out[i - 1].y);
      expect(d).toBeGreaterThanOrEqual(2);
    }
  });

  it('always keeps the final point', () => {
    const dense = [
      { x: 0, y: 0 },
      { x: 5, y: 0 },
      { x: 5.5, y: 0.5 },
    ];
    const out = downsample(dense);
    expect(out[out.length - 1]).toEqual({ x: 5.5, y: 0.5 });
  });

  it('passes sparse strokes through', () => {
    const sparse = [
      { x: 0, y: 0 },
      { x: 10, y: 0 },
      { x: 20, y: 5 },
    ];
    expect(downsample(sparse)).toEqual(sparse);
  });
});

describe('tap filtering', () => {
  it('measures arc length', () => {
    expect(
      arcLength([
        { x: 0, y: 0 },
        { x: 3, y: 4 },
      ]),
    ).toBe(5);
  });

  it('discards strokes shorter than 8px as taps', () => {
    expect(
      isTap([
        { x: 0, y: 0 },
        { x: 3, y: 0 },
      ]),
    ).toBe(true);
    expect(
      isTap([
        { x: 0, y: 0 },
        { x: 12, y: 0 },
      ]),
    ).toBe(false);
  });
});
