// End-to-end UI flow against the real service (started in globalSetup):
// sketch -> card, one-second highlight, checkbox grouping, drag-out reorder,
// and the exported Markdown reflecting the final order.

import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api';
import { App } from '../src/app';
import { MOVIES_CHART, MOVIES_DATA } from './fixtures';
import { SERVICE_BASE } from './server';

const sleep = (ms: number) => new Promise((r) => setTimeout(r, ms));

function firePointer(el: Element, type: string, x: number, y: number): void {
  el.dispatchEvent(new MouseEvent(type, { clientX: x, clientY: y, bubbles: true }));
}

function draw(overlay: Element, points: { x: number; y: number }[]): void {
  firePointer(overlay, 'pointerdown', points[0].x, points[0].y);
  for (const p of points.slice(1)) {
    firePointer(overlay, 'pointermove', p.x, p.y);
  }
  const last = points[points.length - 1];
  firePointer(overlay, 'pointerup', last.x, last.y);
}

function barTops(app: App, genre: string): { x: number; y: number }[] {
  return app
    .scene!.marks.filter((m) => m.seriesKey === genre && m.shape.kind === 'rect')
    .map((m) => {
      const shape = m.shape as { x: number; y: number; w: number };
      return { x: shape.x + shape.w / 2, y: shape.y - 6 };
    })
    .sort((a, b) => a.x - b.x);
}

describe('sketch-to-documentation flow', () => {
  let app: App;
  let overlay: Element;
  let list: Element;

  beforeAll(async () => {
    document.body.innerHTML = '';
    app = new App(document.body, new ApiClient(SERVICE_BASE));
    await app.start(MOVIES_CHART, MOVIES_DATA);
    overlay = app.sketchPanel.element.querySelector('.sketch-overlay')!;
    list = app.cardsPanel.element.querySelector('.card-list')!;
  });

  afterAll(() => {
    document.body.innerHTML = '';
  });

  it('a stroke along Drama yields a first-position card in the stroke color', async () => {
    draw(overlay, barTops(app, 'Drama'));
    await app.whenIdle();

    const firstNode = list.children[1] as HTMLElement; // children[0] is a drop zone
    expect(firstNode.classList.contains('card')).toBe(true);
    expect(firstNode.textContent).toContain('decreased from 80 to 25');

    const strokeColor = app.state!.sketches[0].color;
    expect(firstNode.dataset.color).toBe(strokeColor);
    expect(firstNode.style.borderColor.length).toBeGreaterThan(0);
    const strokeEl = app.sketchPanel.element.querySelector('.stroke') as SVGElement;
    expect(strokeEl.getAttribute('stroke')).toBe(strokeColor);

    const marks = firstNode.querySelectorAll('mark.km');
    expect(marks.length).toBeGreaterThan(3); // key messages emphasized
  });

  it('the red selection highlight clears on its own within 1.0-1.5s', async () => {
    expect(app.sketchPanel.highlightCount()).toBeGreaterThan(0);
    const seenAt = Date.now();
    await sleep(400);
    expect(app.sketchPanel.highlightCount()).toBeGreaterThan(0); // still on well under 1s
    while (app.sketchPanel.highlightCount() > 0) {
      if (Date.now() - seenAt > 2000) throw new Error('highlight never cleared');
      await sleep(50);
    }
    const elapsed = Date.now() - seenAt;
    expect(elapsed).toBeGreaterThanOrEqual(500);
    expect(elapsed).toBeLessThanOrEqual(1600);
  });

  it('checkbox-selecting two cards and grouping renders one group', async () => {
    draw(overlay, barTops(app, 'Action'));
    await app.whenIdle();
    expect(list.querySelectorAll('.card').length).toBe(2);

    for (const box of list.querySelectorAll<HTMLInputElement>('input.card-select')) {
      box.click();
    }
    (app.cardsPanel.element.querySelector('[data-action="group"]') as HTMLElement).click();
    await app.whenIdle();

    const groups = list.querySelectorAll('.group');
    expect(groups.length).toBe(1);
    expect(groups[0].querySelectorAll('.card').length).toBe(2);
  });

  it('dragging a card out of the group reorders the exported Markdown', async () => {
    const group = list.querySelector('.group')!;
    const dragged = group.querySelector('.card') as HTMLElement; // first member: the Action card
    const draggedText = dragged.querySelector('.card-text')!.textContent!;

    dragged.dispatchEvent(new Event('dragstart', { bubbles: false }));
    const zones = list.querySelectorAll<HTMLElement>(':scope > .drop-zone');
    zones[zones.length - 1].dispatchEvent(new Event('drop')); // top level, end
    await app.whenIdle();

    expect(list.querySelectorAll(':scope > .card').length).toBe(1);
    expect(list.querySelector('.group')!.querySelectorAll('.card').length).toBe(1);

    const markdown = await new ApiClient(SERVICE_BASE).exportMarkdown(app.sessionId);
    const nested = markdown.indexOf('  - The Count of Drama');
    const moved = markdown.indexOf(`- ${draggedText}`);
    expect(nested).toBeGreaterThan(-1);
    expect(moved).toBeGreaterThan(nested); // moved card now trails the group
    expect(markdown.trimEnd().endsWith(draggedText)).toBe(true);
  });

  it('an empty lasso keeps the panel unchanged and surfaces a toast', async () => {
    const before = list.querySelectorAll('.card').length;
    const x = 44;
    const y = 44;
    draw(overlay, [
      { x, y },
      { x: x + 12, y },
      { x: x + 12, y: y + 12 },
      { x, y: y + 12 },
      { x, y },
    ]);
    await app.whenIdle();
    expect(list.querySelectorAll('.card').length).toBe(before);
    expect(document.querySelector('.toast')).not.toBeNull();
  });

  it('a tap is discarded silently without a request', async () => {
    const before = app.state!.version;
    draw(overlay, [
      { x: 200, y: 200 },
      { x: 202, y: 201 },
    ]);
    await app.whenIdle();
    expect(app.state!.version).toBe(before);
  });
});
