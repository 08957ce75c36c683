// Sketch panel: shows the rendered chart and captures freehand strokes on
// an SVG overlay. Selected items flash red for one second; strokes keep the
// color the engine assigned to them.

import { downsample, isTap } from './stroke';
import type { Point, SceneGraph, SceneMark, SketchInfo } from './types';

const SVG_NS = 'http://www.w3.org/2000/svg';
export const HIGHLIGHT_MS = 1000;
const PENDING_COLOR = '#999999';

export interface SketchPanelCallbacks {
  onStroke(points: number[][]): Promise<boolean>; // resolve true when a card was created
  onSketchClick(sketchId: string): void;
  onSketchDelete(sketchId: string): void;
}

export class SketchPanel {
  readonly element: HTMLElement;
  private chartHost: HTMLElement;
  private overlay: SVGSVGElement;
  private strokesLayer: SVGGElement;
  private highlightLayer: SVGGElement;
  private pendingLayer: SVGGElement;
  private scene: SceneGraph | null = null;
  private drawing: Point[] | null = null;
  private highlightTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(private callbacks: SketchPanelCallbacks) {
    this.element = document.createElement('div');
    this.element.className = 'sketch-panel';
    this.chartHost = document.createElement('div');
    this.chartHost.className = 'chart-host';
    this.overlay = document.createElementNS(SVG_NS, 'svg');
    this.overlay.classList.add('sketch-overlay');
    this.strokesLayer = document.createElementNS(SVG_NS, 'g');
    this.highlightLayer = document.createElementNS(SVG_NS, 'g');
    this.pendingLayer = document.createElementNS(SVG_NS, 'g');
    this.overlay.append(this.strokesLayer, this.highlightLayer, this.pendingLayer);
    this.element.append(this.chartHost, this.overlay);

    this.overlay.addEventListener('pointerdown', (e) => this.beginStroke(e as PointerEvent));
    this.overlay.addEventListener('pointermove', (e) => this.extendStroke(e as PointerEvent));
    this.overlay.addEventListener('pointerup', () => void this.finishStroke());
    this.overlay.addEventListener('pointerleave', () => void this.finishStroke());
  }

  setScene(scene: SceneGraph, svg: string): void {
    this.scene = scene;
    this.chartHost.innerHTML = svg;
    const { width, height } = scene.viewport;
    this.overlay.setAttribute('viewBox', `0 0 ${width} ${height}`);
    this.overlay.setAttribute('width', String(width));
    this.overlay.setAttribute('height', String(height));
  }

  /** Redraw the saved strokes from the server-side session state. */
  setSketches(sketches: SketchInfo[]): void {
    this.strokesLayer.replaceChildren();
    for (const sketch of sketches) {
      const line = document.createElementNS(SVG_NS, 'polyline');
      line.setAttribute('points', sketch.points.map(([x, y]) => `${x},${y}`).join(' '));
      line.setAttribute('fill', 'none');
      line.setAttribute('stroke', sketch.color);
      line.classList.add('stroke');
      line.dataset.sketchId = sketch.id;
      line.addEventListener('click', () => {
        this.callbacks.onSketchClick(sketch.id);
        this.showDeletePopup(sketch);
      });
      this.strokesLayer.appendChild(line);
    }
  }

  setStrokeEmphasis(sketchId: string | null): void {
    for (const el of this.strokesLayer.querySelectorAll('.stroke')) {
      el.classList.toggle('active', (el as SVGElement).dataset.sketchId === sketchId);
    }
  }

  /** Red outlines over the selected marks, auto-cleared after one second. */
  flashHighlight(rowIds: number[]): void {
    if (!this.scene) return;
    this.highlightLayer.replaceChildren();
    const wanted = new Set(rowIds);
    for (const mark of this.scene.marks) {
      if (wanted.has(mark.rowId)) {
        this.highlightLayer.appendChild(this.highlightShape(mark));
      }
    }
    if (this.highlightTimer !== null) clearTimeout(this.highlightTimer);
    this.highlightTimer = setTimeout(() => {
      this.highlightLayer.replaceChildren();
      this.highlightTimer = null;
    }, HIGHLIGHT_MS);
  }

  highlightCount(): number {
    return this.highlightLayer.childElementCount;
  }

  private highlightShape(mark: SceneMark): SVGElement {
    const shape = mark.shape;
    if (shape.kind === 'rect') {
      const rect = document.createElementNS(SVG_NS, 'rect');
      rect.setAttribute('x', String(shape.x));
      rect.setAttribute('y', String(shape.y));
      rect.setAttribute('width', String(shape.w));
      rect.setAttribute('height', String(shape.h));
      rect.classList.add('flash');
      return rect;
    }
    const circle = document.createElementNS(SVG_NS, 'circle');
    let cx: number;
    let cy: number;
    let r = 7;
    if (shape.kind === 'point') {
      cx = shape.cx;
      cy = shape.cy;
      r = shape.r + 3;
    } else if (shape.kind === 'lineVertex') {
      cx = shape.x;
      cy = shape.y;
    } else {
      const mid = (shape.startAngle + shape.endAngle) / 2;
      cx = shape.cx + (shape.r / 2) * Math.cos(mid);
      cy = shape.cy + (shape.r / 2) * Math.sin(mid);
      r = 10;
    }
    circle.setAttribute('cx', String(cx));
    circle.setAttribute('cy', String(cy));
    circle.setAttribute('r', String(r));
    circle.classList.add('flash');
    return circle;
  }

  private toCanvas(e: PointerEvent): Point {
    const rect = this.overlay.getBoundingClientRect();
    if (!this.scene || rect.width === 0 || rect.height === 0) {
      return { x: e.clientX, y: e.clientY };
    }
    const { width, height } = this.scene.viewport;
    return {
      x: ((e.clientX - rect.left) / rect.width) * width,
      y: ((e.clientY - rect.top) / rect.height) * height,
    };
  }

  private beginStroke(e: PointerEvent): void {
    if (!this.scene) return;
    this.drawing = [this.toCanvas(e)];
    if (typeof this.overlay.setPointerCapture === 'function' && e.pointerId !== undefined) {
      try {
        this.overlay.setPointerCapture(e.pointerId);
      } catch {
        // capture is cosmetic; drawing works without it
      }
    }
    this.renderPending();
  }

  private extendStroke(e: PointerEvent): void {
    if (!this.drawing) return;
    this.drawing.push(this.toCanvas(e));
    this.renderPending();
  }

  private renderPending(): void {
    this.pendingLayer.replaceChildren();
    if (!this.drawing || this.drawing.length < 2) return;
    const line = document.createElementNS(SVG_NS, 'polyline');
    line.setAttribute('points', this.drawing.map((p) => `${p.x},${p.y}`).join(' '));
    line.setAttribute('fill', 'none');
    line.setAttribute('stroke', PENDING_COLOR);
    line.classList.add('stroke', 'pending');
    this.pendingLayer.appendChild(line);
  }

  private async finishStroke(): Promise<void> {
    if (!this.drawing) return;
    const points = downsample(this.drawing);
    this.drawing = null;
    if (isTap(points)) {
      this.pendingLayer.replaceChildren(); // accidental tap: drop silently
      return;
    }
    const accepted = await this.callbacks.onStroke(points.map((p) => [p.x, p.y]));
    if (accepted) {
      this.pendingLayer.replaceChildren();
    } else {
      this.fadePending();
    }
  }

  private fadePending(): void {
    const line = this.pendingLayer.firstElementChild;
    if (!line) return;
    line.classList.add('fade-out');
    setTimeout(() => this.pendingLayer.replaceChildren(), 600);
  }

  private showDeletePopup(sketch: SketchInfo): void {
    this.element.querySelector('.sketch-popup')?.remove();
    const popup = document.createElement('button');
    popup.className = 'sketch-popup';
    popup.textContent = 'Delete sketch';
    const [x, y] = sketch.points[0] ?? [0, 0];
    popup.style.left = `${x}px`;
    popup.style.top = `${y}px`;
    popup.addEventListener('click', () => {
      popup.remove();
      this.callbacks.onSketchDelete(sketch.id);
    });
    this.element.appendChild(popup);
    setTimeout(() => popup.remove(), 4000);
  }
}
