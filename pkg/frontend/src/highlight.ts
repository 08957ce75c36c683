// Key-message emphasis: the server locates messages as [start, end, kind]
// spans; we only turn them into <mark> elements.

import type { Span } from './types';

export function renderSpannedText(text: string, spans: Span[]): DocumentFragment {
  const fragment = document.createDocumentFragment();
  const ordered = [...spans].sort((a, b) => a[0] - b[0]);
  let cursor = 0;
  for (const [start, end, kind] of ordered) {
    if (start < cursor || end > text.length) continue; // stale span after an edit race
    if (start > cursor) {
      fragment.appendChild(document.createTextNode(text.slice(cursor, start)));
    }
    const mark = document.createElement('mark');
    mark.className = `km km-${kind}`;
    mark.textContent = text.slice(start, end);
    fragment.appendChild(mark);
    cursor = end;
  }
  if (cursor < text.length) {
    fragment.appendChild(document.createTextNode(text.slice(cursor)));
  }
  return fragment;
}
