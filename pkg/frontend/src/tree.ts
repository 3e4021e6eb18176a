// Hierarchical rendering of the constrained type set.
//
// The tree is built from exactly the offered paths of the last session
// response and nothing else; because offered sets are ancestor-closed,
// the ancestor spine is always present for context.

import type { OfferedType } from './types.js';

export interface TypeNode {
  path: string;
  definition: string;
  children: TypeNode[];
}

function parentIn(path: string, offered: Set<string>): string | null {
  // nearest ancestor prefix that is itself offered
  let prefix = path;
  while (true) {
    const cut = prefix.lastIndexOf('/');
    if (cut <= 0) return null;
    prefix = prefix.slice(0, cut);
    if (offered.has(prefix)) return prefix;
  }
}

export function buildTypeTree(offered: OfferedType[]): TypeNode[] {
  const byPath = new Map<string, TypeNode>();
  const sorted = [...offered].sort((a, b) => a.path.localeCompare(b.path));
  for (const t of sorted) {
    byPath.set(t.path, { path: t.path, definition: t.definition, children: [] });
  }
  const paths = new Set(byPath.keys());
  const roots: TypeNode[] = [];
  for (const t of sorted) {
    const parent = parentIn(t.path, paths);
    const node = byPath.get(t.path)!;
    if (parent === null) {
      roots.push(node);
    } else {
      byPath.get(parent)!.children.push(node);
    }
  }
  return roots;
}

export function treePaths(nodes: TypeNode[]): string[] {
  const out: string[] = [];
  const walk = (node: TypeNode) => {
    out.push(node.path);
    node.children.forEach(walk);
  };
  nodes.forEach(walk);
  return out;
}

export interface TreeHandlers {
  // a node with visible children: narrow the candidates to this type
  onSelect(path: string): void;
  // a leaf (or the explicit label affordance): make this the final label
  onLabel(path: string): void;
}

export function renderTypeTree(nodes: TypeNode[], handlers: TreeHandlers,
                               doc: Document): HTMLUListElement {
  const list = doc.createElement('ul');
  list.className = 'type-tree';
  for (const node of nodes) {
    const item = doc.createElement('li');

    const name = doc.createElement('span');
    name.className = 'type-name';
    name.textContent = lastSegment(node.path);
    name.dataset.path = node.path;
    name.title = node.definition;
    name.addEventListener('click', () => {
      if (node.children.length > 0) {
        handlers.onSelect(node.path);
      } else {
        handlers.onLabel(node.path);
      }
    });
    item.appendChild(name);

    if (node.children.length > 0) {
      // non-leaf types can still be chosen as the final (coarse) label
      const labelBtn = doc.createElement('span');
      labelBtn.className = 'type-label-btn';
      labelBtn.textContent = '✓';
      labelBtn.title = `label as ${node.path}`;
      labelBtn.dataset.path = node.path;
      labelBtn.addEventListener('click', () => handlers.onLabel(node.path));
      item.appendChild(labelBtn);
      item.appendChild(renderTypeTree(node.children, handlers, doc));
    }
    list.appendChild(item);
  }
  return list;
}

export function lastSegment(path: string): string {
  return path.slice(path.lastIndexOf('/') + 1);
}
