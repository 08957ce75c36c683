// Wire-format types for the documentation service (see docs/formats.md).

export interface Point {
  x: number;
  y: number;
}

export type SpanKind = 'variable' | 'value' | 'pattern';
export type Span = [number, number, SpanKind];

export interface Box {
  x: number;
  y: number;
  w: number;
  h: number;
}

export type MarkShape =
  | { kind: 'rect'; x: number; y: number; w: number; h: number }
  | { kind: 'point'; cx: number; cy: number; r: number }
  | { kind: 'arc'; cx: number; cy: number; r: number; startAngle: number; endAngle: number }
  | { kind: 'lineVertex'; x: number; y: number };

export interface SceneMark {
  rowId: number;
  color: string;
  seriesKey: string | null;
  shape: MarkShape;
}

export interface SceneGraph {
  chartClass: string;
  viewport: { width: number; height: number; margin: number };
  marks: SceneMark[];
  legend: { category: string; color: string; labelBox: Box }[];
  title: string | null;
}

export interface Card {
  id: string;
  sketchId: string | null;
  color: string;
  text: string;
  spans: Span[];
  scopeLabel: string;
  facts: unknown[];
  createdAt: number;
  edited: boolean;
}

export type TreeNode = { card: string } | { group: string; cards: string[] };

export interface SketchInfo {
  id: string;
  color: string;
  points: number[][];
}

export interface SessionState {
  sessionId: string;
  version: number;
  tree: TreeNode[];
  cards: Record<string, Card>;
  sketches: SketchInfo[];
}

export interface CreateSessionResponse {
  sessionId: string;
  sceneGraph: SceneGraph;
  svg: string;
  version: number;
  tree: TreeNode[];
}

export interface SketchResponse {
  sessionId: string;
  sketch: { id: string; color: string };
  selection: { rowIds: number[]; scope: string; kind: string };
  highlightRowIds: number[];
  cards: Card[];
  grouped: boolean;
  version: number;
  tree: TreeNode[];
}

export type FullSessionResponse = SessionState & { sceneGraph: SceneGraph; svg: string };

export type MoveTarget = { index: number; group?: string };
