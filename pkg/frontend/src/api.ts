// Thin typed client for the documentation service. No business logic here:
// selection, facts, and card text all come from the server.

import type {
  CreateSessionResponse,
  FullSessionResponse,
  MoveTarget,
  SessionState,
  SketchResponse,
} from './types';

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

async function unwrap<T>(resp: Response): Promise<T> {
  if (resp.ok) {
    return (await resp.json()) as T;
  }
  let code = `http_${resp.status}`;
  let message = resp.statusText;
  try {
    const body = await resp.json();
    if (body?.detail?.code) {
      code = body.detail.code;
      message = body.detail.message ?? message;
    }
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(resp.status, code, message);
}

export class ApiClient {
  constructor(readonly base: string = '') {}

  private url(path: string): string {
    return `${this.base}${path}`;
  }

  private async send<T>(method: string, path: string, body?: unknown): Promise<T> {
    const resp = await fetch(this.url(path), {
      method,
      headers: body === undefined ? undefined : { 'Content-Type': 'application/json' },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    return unwrap<T>(resp);
  }

  createSession(chart: unknown, data: unknown[]): Promise<CreateSessionResponse> {
    return this.send('POST', '/sessions', { chart, data });
  }

  getSession(id: string): Promise<FullSessionResponse> {
    return this.send('GET', `/sessions/${id}`);
  }

  submitSketch(id: string, points: number[][]): Promise<SketchResponse> {
    return this.send('POST', `/sessions/${id}/sketches`, { points });
  }

  deleteCard(id: string, cardId: string): Promise<SessionState> {
    return this.send('DELETE', `/sessions/${id}/cards/${cardId}`);
  }

  deleteSketch(id: string, sketchId: string): Promise<SessionState> {
    return this.send('DELETE', `/sessions/${id}/sketches/${sketchId}`);
  }

  deleteAll(id: string): Promise<SessionState> {
    return this.send('DELETE', `/sessions/${id}/cards`);
  }

  groupCards(id: string, cardIds: string[]): Promise<SessionState> {
    return this.send('POST', `/sessions/${id}/groups`, { cardIds });
  }

  groupAll(id: string): Promise<SessionState> {
    return this.send('POST', `/sessions/${id}/group-all`);
  }

  editCard(id: string, cardId: string, text: string): Promise<SessionState> {
    return this.send('PATCH', `/sessions/${id}/cards/${cardId}`, { text });
  }

  moveNode(id: string, nodeId: string, target: MoveTarget): Promise<SessionState> {
    return this.send('PATCH', `/sessions/${id}/tree`, {
      nodeId,
      index: target.index,
      group: target.group ?? null,
    });
  }

  async exportMarkdown(id: string): Promise<string> {
    const resp = await fetch(this.url(`/sessions/${id}/export?format=markdown`));
    if (!resp.ok) {
      throw new ApiError(resp.status, `http_${resp.status}`, resp.statusText);
    }
    return resp.text();
  }
}
