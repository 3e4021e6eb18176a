// Annotator client: document text with colored mention spans, the
// constrained type tree, an annotation hint panel, and the ranked
// entity-linking revision list. The server is the source of truth:
// every state change renders from the latest session response.

import { ApiClient, ApiError } from './api.js';
import { bindAnnotationHotkeys } from './hotkeys.js';
import { buildTypeTree, lastSegment, renderTypeTree } from './tree.js';
import type { MentionView, SessionView } from './types.js';

export class AnnotatorApp {
  view: SessionView | null = null;
  selectedMention: string | null = null;

  private doc: Document;
  private queue: Promise<void> = Promise.resolve();
  private unbindHotkeys: (() => void) | null = null;

  constructor(private api: ApiClient, private root: HTMLElement) {
    this.doc = root.ownerDocument;
  }

  /** Resolves once every queued interaction has finished. */
  settled(): Promise<void> {
    return this.queue;
  }

  async open(annotator: string, docId: string): Promise<void> {
    const { session_id } = await this.api.openSession(annotator, docId);
    await this.load(session_id);
  }

  async load(sessionId: string): Promise<void> {
    this.view = await this.api.getSession(sessionId);
    this.selectedMention = this.view.mentions.length > 0
      ? this.view.mentions[0].mention_id : null;
    this.bindHotkeys();
    this.render();
  }

  dispose(): void {
    if (this.unbindHotkeys) this.unbindHotkeys();
    this.unbindHotkeys = null;
  }

  private bindHotkeys(): void {
    if (this.unbindHotkeys) return;
    this.unbindHotkeys = bindAnnotationHotkeys(this.doc, {
      undo: () => this.undo(),
      redo: () => this.redo(),
      reset: () => this.reset(),
    });
  }

  // -- queued mutations -------------------------------------------------------

  selectMention(mentionId: string): void {
    this.selectedMention = mentionId;
    this.render();
  }

  selectType(path: string): Promise<void> {
    return this.mutate((v, m) =>
      this.api.selectType(v.session_id, v.annotator, m, path));
  }

  labelType(path: string): Promise<void> {
    return this.mutate((v, m) =>
      this.api.label(v.session_id, v.annotator, m, path));
  }

  revise(entity: string): Promise<void> {
    return this.mutate((v, m) =>
      this.api.revise(v.session_id, v.annotator, m, entity));
  }

  undo(): Promise<void> {
    return this.enqueue(async () => {
      if (!this.view) return;
      this.view = await this.api.undo(this.view.session_id, this.view.annotator);
      this.render();
    });
  }

  redo(): Promise<void> {
    return this.enqueue(async () => {
      if (!this.view) return;
      this.view = await this.api.redo(this.view.session_id, this.view.annotator);
      this.render();
    });
  }

  reset(): Promise<void> {
    return this.enqueue(async () => {
      if (!this.view) return;
      this.view = await this.api.reset(this.view.session_id, this.view.annotator,
                                       this.selectedMention ?? undefined);
      this.render();
    });
  }

  private mutate(op: (view: SessionView, mentionId: string) => Promise<SessionView>):
      Promise<void> {
    return this.enqueue(async () => {
      if (!this.view || this.selectedMention === null) return;
      this.view = await op(this.view, this.selectedMention);
      this.render();
    });
  }

  private enqueue(fn: () => Promise<void>): Promise<void> {
    this.queue = this.queue.then(fn).catch((err) => this.showError(err));
    return this.queue;
  }

  private showError(err: unknown): void {
    const toast = this.doc.createElement('div');
    toast.className = 'toast';
    toast.textContent = err instanceof ApiError
      ? `${err.code}: ${err.message}` : String(err);
    this.root.appendChild(toast);
  }

  // -- rendering --------------------------------------------------------------

  private mention(): MentionView | null {
    if (!this.view || this.selectedMention === null) return null;
    return this.view.mentions.find(
      (m) => m.mention_id === this.selectedMention) ?? null;
  }

  render(): void {
    if (!this.view) return;
    this.root.innerHTML = '';
    this.root.appendChild(this.renderToolbar());

    const main = this.doc.createElement('div');
    main.className = 'layout';
    main.appendChild(this.renderText());
    main.appendChild(this.renderTree());
    main.appendChild(this.renderHints());
    main.appendChild(this.renderCandidates());
    this.root.appendChild(main);
  }

  private renderToolbar(): HTMLElement {
    const view = this.view!;
    const bar = this.doc.createElement('div');
    bar.className = 'toolbar';

    const info = this.doc.createElement('span');
    info.className = 'session-info';
    info.textContent = `${view.doc_id} · ${view.annotator}`;
    bar.appendChild(info);

    const mk = (name: string, title: string, fn: () => void) => {
      const btn = this.doc.createElement('button');
      btn.className = `btn-${name}`;
      btn.textContent = title;
      btn.addEventListener('click', fn);
      bar.appendChild(btn);
    };
    mk('undo', `undo (${view.undo_depth})`, () => this.undo());
    mk('redo', `redo (${view.redo_depth})`, () => this.redo());
    mk('reset', 'reset', () => this.reset());

    for (const format of ['txt', 'json'] as const) {
      const link = this.doc.createElement('a');
      link.className = `export-${format}`;
      link.textContent = `export ${format}`;
      link.href = this.api.exportUrl(view.session_id, format);
      link.setAttribute('download', `${view.doc_id}.${format}`);
      bar.appendChild(link);
    }
    return bar;
  }

  private renderText(): HTMLElement {
    const view = this.view!;
    const panel = this.doc.createElement('div');
    panel.className = 'panel doc-text';
    let cursor = 0;
    for (const mention of view.mentions) {
      panel.appendChild(
        this.doc.createTextNode(view.text.slice(cursor, mention.start)));
      const span = this.doc.createElement('span');
      span.className = 'mention';
      if (mention.final_label !== null) span.classList.add('labeled');
      if (mention.mention_id === this.selectedMention) span.classList.add('active');
      span.dataset.mentionId = mention.mention_id;
      span.textContent = mention.surface;
      span.addEventListener('click', () => this.selectMention(mention.mention_id));
      panel.appendChild(span);
      if (mention.final_label !== null) {
        const tag = this.doc.createElement('span');
        tag.className = 'label-tag';
        tag.textContent = mention.final_label;
        panel.appendChild(tag);
      }
      cursor = mention.end;
    }
    panel.appendChild(this.doc.createTextNode(view.text.slice(cursor)));
    return panel;
  }

  private renderTree(): HTMLElement {
    const panel = this.doc.createElement('div');
    panel.className = 'panel tree-panel';
    const heading = this.doc.createElement('h3');
    heading.textContent = 'Types';
    panel.appendChild(heading);

    const mention = this.mention();
    if (!mention) {
      panel.appendChild(this.doc.createTextNode('Select a mention.'));
      return panel;
    }
    const tree = buildTypeTree(mention.offered_types);
    panel.appendChild(renderTypeTree(tree, {
      onSelect: (path) => void this.selectType(path),
      onLabel: (path) => void this.labelType(path),
    }, this.doc));
    return panel;
  }

  private renderHints(): HTMLElement {
    const panel = this.doc.createElement('div');
    panel.className = 'panel hint-panel';
    const heading = this.doc.createElement('h3');
    heading.textContent = 'Hints';
    panel.appendChild(heading);

    const mention = this.mention();
    if (!mention) return panel;

    const chain = mention.selected_types;
    if (chain.length > 0) {
      const path = chain[chain.length - 1];
      const offered = mention.offered_types.find((t) => t.path === path);
      const div = this.doc.createElement('div');
      div.className = 'hint-type';
      div.textContent = `${path}: ${offered ? offered.definition : ''}`;
      panel.appendChild(div);
    }
    const entityId = mention.final_entity ?? mention.predicted;
    const candidate = mention.candidates.find((c) => c.entity === entityId);
    if (candidate) {
      const div = this.doc.createElement('div');
      div.className = 'hint-entity';
      div.textContent = `${candidate.name}: ${candidate.description}`;
      panel.appendChild(div);
    }
    return panel;
  }

  private renderCandidates(): HTMLElement {
    const panel = this.doc.createElement('div');
    panel.className = 'panel candidates-panel';
    const heading = this.doc.createElement('h3');
    heading.textContent = 'Entity linking';
    panel.appendChild(heading);

    const mention = this.mention();
    if (!mention) return panel;
    if (mention.candidates.length === 0) {
      panel.appendChild(this.doc.createTextNode(
        'No candidates; needs manual search. The full type tree is offered.'));
      return panel;
    }
    const list = this.doc.createElement('ul');
    list.className = 'candidate-list';
    for (const candidate of mention.candidates) {
      const item = this.doc.createElement('li');
      item.className = 'candidate';
      if (candidate.entity === mention.predicted) item.classList.add('predicted');
      if (candidate.entity === mention.final_entity) item.classList.add('chosen');
      item.dataset.entity = candidate.entity;
      item.textContent = `${candidate.name} (${candidate.score.toFixed(2)})`;
      item.title = candidate.description;
      item.addEventListener('click', () => void this.revise(candidate.entity));
      list.appendChild(item);
    }
    panel.appendChild(list);
    return panel;
  }
}

export { lastSegment };
