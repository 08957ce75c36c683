// Stroke capture helpers. Raw pointer samples are noisy and dense; the
// engine's thresholds assume points spaced at least 2px apart.

import type { Point } from './types';

export const MIN_SPACING = 2;
export const TAP_ARC_LENGTH = 8;

export function downsample(points: Point[], minSpacing = MIN_SPACING): Point[] {
  if (points.length === 0) return [];
  const kept: Point[] = [points[0]];
  for (let i = 1; i < points.length; i++) {
    const last = kept[kept.length - 1];
    if (Math.hypot(points[i].x - last.x, points[i].y - last.y) >= minSpacing) {
      kept.push(points[i]);
    }
  }
  const tail = points[points.length - 1];
  const last = kept[kept.length - 1];
  if (kept.length > 1 && (tail.x !== last.x || tail.y !== last.y)) {
    kept.push(tail); // endpoint decides closed-vs-open; never drop it
  }
  return kept;
}

export function arcLength(points: Point[]): number {
  let total = 0;
  for (let i = 1; i < points.length; i++) {
    total += Math.hypot(points[i].x - points[i - 1].x, points[i].y - points[i - 1].y);
  }
  return total;
}

/** Accidental taps are discarded client-side before the service sees them. */
export function isTap(points: Point[]): boolean {
  return points.length < 2 || arcLength(points) < TAP_ARC_LENGTH;
}
