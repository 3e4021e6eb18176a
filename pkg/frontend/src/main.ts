// Bootstrap: pick annotator or manager view from the query string.
//
//   ?view=annotator&annotator=alice&doc=d2     open a fresh session
//   ?view=annotator&session=<id>               resume a session
//   ?view=manager&sessions=id1,id2,id3         comparison dashboard
//   &api=http://host:port                      service base URL (default: same origin)

import { AnnotatorApp } from './annotator.js';
import { ApiClient } from './api.js';
import { ManagerApp } from './manager.js';

export async function boot(root: HTMLElement, search: string): Promise<void> {
  const params = new URLSearchParams(search);
  const api = new ApiClient(params.get('api') ?? '');
  const view = params.get('view') ?? 'annotator';

  if (view === 'manager') {
    const app = new ManagerApp(api, root);
    const sessions = (params.get('sessions') ?? '').split(',').filter(Boolean);
    if (sessions.length >= 2) {
      await app.loadMatrix(sessions);
      if (sessions.length >= 2) await app.loadErrorSummary(sessions[0], sessions[1]);
    } else {
      root.textContent = 'manager view needs ?sessions=id1,id2,...';
    }
    return;
  }

  const app = new AnnotatorApp(api, root);
  const sessionId = params.get('session');
  if (sessionId) {
    await app.load(sessionId);
    return;
  }
  const annotator = params.get('annotator');
  const docId = params.get('doc');
  if (annotator && docId) {
    await app.open(annotator, docId);
    return;
  }
  root.textContent =
    'annotator view needs ?session=<id> or ?annotator=<name>&doc=<doc_id>';
}

declare const window: (Window & typeof globalThis) | undefined;

if (typeof window !== 'undefined' && typeof document !== 'undefined') {
  const root = document.getElementById('app');
  if (root) {
    void boot(root, window.location.search);
  }
}
