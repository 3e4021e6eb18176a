// Pairwise-accuracy heat map: darker means higher agreement.

import type { MatrixResponse } from './types.js';

// Linear color scale on [0, 1]; undefined pairs render neutral gray.
export function accuracyColor(value: number | null): string {
  if (value === null) return 'hsl(0, 0%, 87%)';
  const v = Math.max(0, Math.min(1, value));
  const lightness = 95 - 70 * v; // 95% (light) at 0 -> 25% (dark) at 1
  return `hsl(215, 65%, ${lightness}%)`;
}

export function colorLightness(color: string): number {
  const match = /hsl\(\d+, \d+%, ([\d.]+)%\)/.exec(color);
  if (!match) throw new Error(`not an hsl color: ${color}`);
  return parseFloat(match[1]);
}

export function renderHeatmap(matrix: MatrixResponse, doc: Document): HTMLTableElement {
  const table = doc.createElement('table');
  table.className = 'heatmap';

  const header = doc.createElement('tr');
  header.appendChild(doc.createElement('th'));
  for (const name of matrix.annotators) {
    const th = doc.createElement('th');
    th.textContent = name;
    header.appendChild(th);
  }
  table.appendChild(header);

  matrix.cells.forEach((row, i) => {
    const tr = doc.createElement('tr');
    const th = doc.createElement('th');
    th.textContent = matrix.annotators[i];
    tr.appendChild(th);
    row.forEach((value, j) => {
      const td = doc.createElement('td');
      td.className = 'heatmap-cell';
      // the raw endpoint value and derived color ride along so the view
      // never drifts from the matrix payload
      td.dataset.value = value === null ? 'null' : String(value);
      td.dataset.color = accuracyColor(value);
      td.dataset.row = String(i);
      td.dataset.col = String(j);
      td.style.backgroundColor = td.dataset.color;
      td.title = value === null
        ? `${matrix.annotators[i]} / ${matrix.annotators[j]}: no shared mentions`
        : `${matrix.annotators[i]} / ${matrix.annotators[j]}: ${value.toFixed(3)}`;
      td.textContent = value === null ? '-' : value.toFixed(2);
      tr.appendChild(td);
    });
    table.appendChild(tr);
  });
  return table;
}
