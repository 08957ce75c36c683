// Documentation panel: the card tree with checkbox selection, a
// group/group-all/delete-all toolbar, drag-and-drop reordering, and
// click-to-edit. Every gesture issues a service mutation; the panel is
// re-rendered from the server's response.

import { renderSpannedText } from './highlight';
import type { Card, MoveTarget, SessionState, TreeNode } from './types';

export interface CardsPanelCallbacks {
  onGroup(cardIds: string[]): void;
  onGroupAll(): void;
  onDeleteAll(): void;
  onDeleteCard(cardId: string): void;
  onEdit(cardId: string, text: string): void;
  onMove(nodeId: string, target: MoveTarget): void;
  onHoverCard(sketchId: string | null): void;
}

export class CardsPanel {
  readonly element: HTMLElement;
  private list: HTMLElement;
  private selected = new Set<string>();
  private dragNode: string | null = null;
  private state: SessionState | null = null;

  constructor(private callbacks: CardsPanelCallbacks) {
    this.element = document.createElement('div');
    this.element.className = 'cards-panel';

    const toolbar = document.createElement('div');
    toolbar.className = 'toolbar';
    toolbar.append(
      this.toolButton('Group', 'group', () => {
        if (this.selected.size >= 2) this.callbacks.onGroup(this.selectedInDocumentOrder());
      }),
      this.toolButton('Group All', 'group-all', () => this.callbacks.onGroupAll()),
      this.toolButton('Delete All', 'delete-all', () => this.callbacks.onDeleteAll()),
    );

    this.list = document.createElement('div');
    this.list.className = 'card-list';
    this.element.append(toolbar, this.list);
  }

  private toolButton(label: string, action: string, handler: () => void): HTMLButtonElement {
    const button = document.createElement('button');
    button.textContent = label;
    button.dataset.action = action;
    button.addEventListener('click', handler);
    return button;
  }

  private selectedInDocumentOrder(): string[] {
    const order: string[] = [];
    for (const node of this.state?.tree ?? []) {
      if ('card' in node) {
        if (this.selected.has(node.card)) order.push(node.card);
      } else {
        for (const id of node.cards) if (this.selected.has(id)) order.push(id);
      }
    }
    return order;
  }

  render(state: SessionState): void {
    this.state = state;
    for (const id of [...this.selected]) {
      if (!(id in state.cards)) this.selected.delete(id);
    }
    this.list.replaceChildren();
    state.tree.forEach((node, index) => {
      this.list.appendChild(this.dropZone({ index }));
      this.list.appendChild(
        'card' in node ? this.cardElement(state.cards[node.card]) : this.groupElement(node, state),
      );
    });
    this.list.appendChild(this.dropZone({ index: state.tree.length }));
  }

  scrollCardIntoView(cardId: string): void {
    const el = this.list.querySelector<HTMLElement>(`[data-card-id="${cardId}"]`);
    if (!el) return;
    if (typeof el.scrollIntoView === 'function') {
      try {
        el.scrollIntoView({ block: 'nearest' });
      } catch {
        // headless DOMs may not implement scrolling
      }
    }
    el.classList.add('located');
    setTimeout(() => el.classList.remove('located'), 1200);
  }

  private groupElement(node: { group: string; cards: string[] }, state: SessionState): HTMLElement {
    const group = document.createElement('div');
    group.className = 'group';
    group.dataset.groupId = node.group;
    const handle = document.createElement('div');
    handle.className = 'group-handle';
    handle.textContent = `Group (${node.cards.length})`;
    handle.draggable = true;
    handle.addEventListener('dragstart', () => {
      this.dragNode = node.group;
    });
    handle.addEventListener('dragend', () => {
      this.dragNode = null;
    });
    group.appendChild(handle);
    node.cards.forEach((cardId, index) => {
      group.appendChild(this.dropZone({ index, group: node.group }));
      group.appendChild(this.cardElement(state.cards[cardId]));
    });
    group.appendChild(this.dropZone({ index: node.cards.length, group: node.group }));
    return group;
  }

  private cardElement(card: Card): HTMLElement {
    const el = document.createElement('div');
    el.className = 'card';
    el.dataset.cardId = card.id;
    el.dataset.color = card.color;
    el.style.borderColor = card.color;
    el.draggable = true;
    el.addEventListener('dragstart', () => {
      this.dragNode = card.id;
    });
    el.addEventListener('dragend', () => {
      this.dragNode = null;
    });
    el.addEventListener('mouseenter', () => this.callbacks.onHoverCard(card.sketchId));
    el.addEventListener('mouseleave', () => this.callbacks.onHoverCard(null));

    const header = document.createElement('div');
    header.className = 'card-header';
    const checkbox = document.createElement('input');
    checkbox.type = 'checkbox';
    checkbox.className = 'card-select';
    checkbox.checked = this.selected.has(card.id);
    checkbox.addEventListener('change', () => {
      if (checkbox.checked) this.selected.add(card.id);
      else this.selected.delete(card.id);
    });
    const scope = document.createElement('span');
    scope.className = 'scope-label';
    scope.textContent = card.scopeLabel;
    const remove = document.createElement('button');
    remove.className = 'card-delete';
    remove.textContent = '×';
    remove.title = 'Delete card and sketch';
    remove.addEventListener('click', () => this.callbacks.onDeleteCard(card.id));
    header.append(checkbox, scope, remove);

    const text = document.createElement('div');
    text.className = 'card-text';
    text.appendChild(renderSpannedText(card.text, card.spans));
    text.addEventListener('click', () => this.startEdit(el, card));

    el.append(header, text);
    return el;
  }

  private startEdit(el: HTMLElement, card: Card): void {
    if (el.querySelector('textarea')) return;
    const text = el.querySelector('.card-text') as HTMLElement;
    const editor = document.createElement('textarea');
    editor.value = card.text;
    editor.className = 'card-editor';
    const commit = () => {
      if (editor.value !== card.text) {
        this.callbacks.onEdit(card.id, editor.value);
      } else {
        editor.replaceWith(text);
      }
    };
    editor.addEventListener('blur', commit);
    editor.addEventListener('keydown', (e) => {
      if (e.key === 'Enter' && !e.shiftKey) {
        e.preventDefault();
        commit();
      }
    });
    text.replaceWith(editor);
    editor.focus();
  }

  private dropZone(target: MoveTarget): HTMLElement {
    const zone = document.createElement('div');
    zone.className = 'drop-zone';
    zone.dataset.index = String(target.index);
    if (target.group) zone.dataset.group = target.group;
    zone.addEventListener('dragover', (e) => {
      e.preventDefault();
      zone.classList.add('over');
    });
    zone.addEventListener('dragleave', () => zone.classList.remove('over'));
    zone.addEventListener('drop', (e) => {
      e.preventDefault();
      zone.classList.remove('over');
      if (this.dragNode) {
        this.callbacks.onMove(this.dragNode, target);
        this.dragNode = null;
      }
    });
    return zone;
  }
}
