// Wires the two panels to the service. The UI mirrors the last server
// response; every mutation re-renders from what the server returned.

import { ApiClient, ApiError } from './api';
import { CardsPanel } from './cardsPanel';
import { SketchPanel } from './sketchPanel';
import type { MoveTarget, SceneGraph, SessionState } from './types';

export class App {
  readonly element: HTMLElement;
  readonly sketchPanel: SketchPanel;
  readonly cardsPanel: CardsPanel;
  sessionId = '';
  scene: SceneGraph | null = null;
  state: SessionState | null = null;
  private toastHost: HTMLElement;
  private inflight: Promise<unknown> = Promise.resolve();

  constructor(
    root: HTMLElement,
    private api: ApiClient,
  ) {
    this.element = document.createElement('div');
    this.element.className = 'app';
    this.sketchPanel = new SketchPanel({
      onStroke: (points) => this.submitStroke(points),
      onSketchClick: (sketchId) => this.locateCard(sketchId),
      onSketchDelete: (sketchId) => void this.track(this.deleteSketch(sketchId)),
    });
    this.cardsPanel = new CardsPanel({
      onGroup: (ids) => void this.track(this.mutate(() => this.api.groupCards(this.sessionId, ids))),
      onGroupAll: () => void this.track(this.mutate(() => this.api.groupAll(this.sessionId))),
      onDeleteAll: () => void this.track(this.mutate(() => this.api.deleteAll(this.sessionId))),
      onDeleteCard: (id) => void this.track(this.mutate(() => this.api.deleteCard(this.sessionId, id))),
      onEdit: (id, text) => void this.track(this.mutate(() => this.api.editCard(this.sessionId, id, text))),
      onMove: (nodeId, target: MoveTarget) =>
        void this.track(this.mutate(() => this.api.moveNode(this.sessionId, nodeId, target))),
      onHoverCard: (sketchId) => this.sketchPanel.setStrokeEmphasis(sketchId),
    });
    this.toastHost = document.createElement('div');
    this.toastHost.className = 'toasts';
    this.element.append(this.sketchPanel.element, this.cardsPanel.element, this.toastHost);
    root.appendChild(this.element);
  }

  async start(chart: unknown, data: unknown[]): Promise<void> {
    const created = await this.api.createSession(chart, data);
    this.sessionId = created.sessionId;
    this.scene = created.sceneGraph;
    this.sketchPanel.setScene(created.sceneGraph, created.svg);
    await this.refresh();
  }

  /** Resolves when every in-flight service call has settled (test hook). */
  whenIdle(): Promise<unknown> {
    return this.inflight;
  }

  private track<T>(p: Promise<T>): Promise<T> {
    this.inflight = this.inflight.then(() => p.catch(() => undefined));
    return p;
  }

  private applyState(state: SessionState): void {
    this.state = state;
    this.cardsPanel.render(state);
    this.sketchPanel.setSketches(state.sketches);
  }

  private async refresh(): Promise<void> {
    const full = await this.api.getSession(this.sessionId);
    this.applyState(full);
  }

  private async mutate(call: () => Promise<SessionState>): Promise<void> {
    try {
      this.applyState(await call());
    } catch (err) {
      this.toast(err instanceof ApiError ? err.message : String(err));
    }
  }

  private submitStroke(points: number[][]): Promise<boolean> {
    const run = (async () => {
      try {
        const resp = await this.api.submitSketch(this.sessionId, points);
        this.sketchPanel.flashHighlight(resp.highlightRowIds);
        await this.refresh();
        return true;
      } catch (err) {
        this.toast(err instanceof ApiError ? err.message : String(err));
        return false;
      }
    })();
    this.track(run);
    return run;
  }

  private async deleteSketch(sketchId: string): Promise<void> {
    await this.mutate(() => this.api.deleteSketch(this.sessionId, sketchId));
  }

  private locateCard(sketchId: string): void {
    const card = Object.values(this.state?.cards ?? {}).find((c) => c.sketchId === sketchId);
    if (card) this.cardsPanel.scrollCardIntoView(card.id);
  }

  private toast(message: string): void {
    const note = document.createElement('div');
    note.className = 'toast';
    note.textContent = message;
    this.toastHost.appendChild(note);
    setTimeout(() => note.remove(), 3000);
  }
}
