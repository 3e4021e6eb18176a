// Typed client for the annotation service; the only way the UI touches data.

import type {
  DocSummary,
  ErrorCountsResponse,
  IntegrationResponse,
  MatrixResponse,
  ReductionReport,
  SessionView,
} from './types.js';

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    detail: string,
  ) {
    super(detail);
    this.name = 'ApiError';
  }
}

export class ApiClient {
  constructor(readonly baseUrl: string = '') {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: {} };
    if (body !== undefined) {
      init.headers = { 'Content-Type': 'application/json' };
      init.body = JSON.stringify(body);
    }
    const resp = await fetch(this.baseUrl + path, init);
    const text = await resp.text();
    const data = text ? JSON.parse(text) : null;
    if (!resp.ok) {
      const code = data && data.error ? String(data.error) : `HTTP${resp.status}`;
      const detail = data && data.detail ? String(data.detail) : resp.statusText;
      throw new ApiError(resp.status, code, detail);
    }
    return data as T;
  }

  health(): Promise<{ status: string; types: number; docs: number }> {
    return this.request('GET', '/health');
  }

  listDocs(): Promise<{ documents: DocSummary[] }> {
    return this.request('GET', '/docs');
  }

  openSession(annotator: string, docId: string): Promise<{ session_id: string }> {
    return this.request('POST', '/sessions', { annotator, doc_id: docId });
  }

  getSession(sessionId: string): Promise<SessionView> {
    return this.request('GET', `/sessions/${sessionId}`);
  }

  selectType(sessionId: string, annotator: string, mentionId: string,
             type: string): Promise<SessionView> {
    return this.request(
      'POST', `/sessions/${sessionId}/mentions/${mentionId}/select-type`,
      { annotator, type });
  }

  revise(sessionId: string, annotator: string, mentionId: string,
         entity: string): Promise<SessionView> {
    return this.request(
      'POST', `/sessions/${sessionId}/mentions/${mentionId}/revise`,
      { annotator, entity });
  }

  label(sessionId: string, annotator: string, mentionId: string,
        type: string): Promise<SessionView> {
    return this.request(
      'POST', `/sessions/${sessionId}/mentions/${mentionId}/label`,
      { annotator, type });
  }

  undo(sessionId: string, annotator: string): Promise<SessionView> {
    return this.request('POST', `/sessions/${sessionId}/undo`, { annotator });
  }

  redo(sessionId: string, annotator: string): Promise<SessionView> {
    return this.request('POST', `/sessions/${sessionId}/redo`, { annotator });
  }

  reset(sessionId: string, annotator: string, mentionId?: string): Promise<SessionView> {
    const body: Record<string, string> = { annotator };
    if (mentionId !== undefined) body.mention_id = mentionId;
    return this.request('POST', `/sessions/${sessionId}/reset`, body);
  }

  exportUrl(sessionId: string, format: 'txt' | 'json'): string {
    return `${this.baseUrl}/sessions/${sessionId}/export?format=${format}`;
  }

  matrix(sessionIds: string[]): Promise<MatrixResponse> {
    return this.request('GET', `/manage/matrix?sessions=${sessionIds.join(',')}`);
  }

  errorCounts(gold: string, pred: string): Promise<ErrorCountsResponse> {
    return this.request('GET', `/manage/errors?gold=${gold}&pred=${pred}&format=json`);
  }

  integrate(sessionIds: string[]): Promise<IntegrationResponse> {
    return this.request('POST', '/manage/integrate', { sessions: sessionIds });
  }

  reduction(): Promise<ReductionReport> {
    return this.request('GET', '/stats/reduction');
  }
}
