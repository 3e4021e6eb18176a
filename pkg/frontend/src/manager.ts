// Manager dashboard: agreement heat map, error-pattern summary, and
// vote integration with a downloadable result.

import { ApiClient, ApiError } from './api.js';
import { renderHeatmap } from './heatmap.js';
import type { IntegrationResponse, MatrixResponse } from './types.js';

export class ManagerApp {
  matrix: MatrixResponse | null = null;
  sessionIds: string[] = [];

  private doc: Document;

  constructor(private api: ApiClient, private root: HTMLElement) {
    this.doc = root.ownerDocument;
  }

  async loadMatrix(sessionIds: string[]): Promise<void> {
    this.sessionIds = sessionIds;
    try {
      this.matrix = await this.api.matrix(sessionIds);
    } catch (err) {
      this.showError(err);
      return;
    }
    this.render();
  }

  async loadErrorSummary(gold: string, pred: string): Promise<void> {
    try {
      const { counts } = await this.api.errorCounts(gold, pred);
      const panel = this.ensurePanel('error-summary', 'Error patterns');
      const list = this.doc.createElement('ul');
      for (const kind of ['Correct', 'OverSpecific', 'NotSpecific', 'IncorrectPath']) {
        const item = this.doc.createElement('li');
        item.dataset.kind = kind;
        item.textContent = `${kind}: ${counts[kind] ?? 0}`;
        list.appendChild(item);
      }
      panel.appendChild(list);
    } catch (err) {
      this.showError(err);
    }
  }

  async runIntegration(): Promise<IntegrationResponse | null> {
    try {
      const result = await this.api.integrate(this.sessionIds);
      const panel = this.ensurePanel('integration-result', 'Integrated labels');
      const summary = this.doc.createElement('div');
      summary.className = 'integration-summary';
      const labeled = Object.keys(result.labels).length;
      summary.textContent =
        `${labeled} labeled, ${result.unresolved.length} unresolved`;
      panel.appendChild(summary);

      const pre = this.doc.createElement('pre');
      pre.className = 'integration-json';
      pre.textContent = JSON.stringify(result, null, 2);
      panel.appendChild(pre);

      // browsers get a downloadable file; test DOMs may lack object URLs
      if (typeof URL.createObjectURL === 'function') {
        const link = this.doc.createElement('a');
        link.className = 'integration-download';
        link.textContent = 'download final.json';
        link.href = URL.createObjectURL(
          new Blob([pre.textContent], { type: 'application/json' }));
        link.setAttribute('download', 'final.json');
        panel.appendChild(link);
      }
      return result;
    } catch (err) {
      this.showError(err);
      return null;
    }
  }

  render(): void {
    this.root.innerHTML = '';
    const heading = this.doc.createElement('h2');
    heading.textContent = 'Annotator comparison';
    this.root.appendChild(heading);
    if (this.matrix) {
      this.root.appendChild(renderHeatmap(this.matrix, this.doc));
    }
    const integrateBtn = this.doc.createElement('button');
    integrateBtn.className = 'btn-integrate';
    integrateBtn.textContent = 'integrate by voting';
    integrateBtn.addEventListener('click', () => void this.runIntegration());
    this.root.appendChild(integrateBtn);
  }

  private ensurePanel(className: string, title: string): HTMLElement {
    const existing = this.root.querySelector(`.${className}`);
    if (existing) existing.remove();
    const panel = this.doc.createElement('div');
    panel.className = `panel ${className}`;
    const heading = this.doc.createElement('h3');
    heading.textContent = title;
    panel.appendChild(heading);
    this.root.appendChild(panel);
    return panel;
  }

  private showError(err: unknown): void {
    const toast = this.doc.createElement('div');
    toast.className = 'toast';
    toast.textContent = err instanceof ApiError
      ? `${err.code}: ${err.message}` : String(err);
    this.root.appendChild(toast);
  }
}
