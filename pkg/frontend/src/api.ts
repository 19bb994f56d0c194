// The service client. The UI talks only to these endpoints; tests swap in
// a mock implementing the same interface.

import type { SessionEvent } from './types';

export interface SessionApi {
  createSession(prompt: string): Promise<string>;
  subscribe(sessionId: string, from: number, onEvent: (e: SessionEvent) => void): () => void;
  submitFeedback(sessionId: string, nodeId: number, answer: string | null): Promise<void>;
  editNode(sessionId: string, nodeId: number, text: string): Promise<void>;
  deleteNode(sessionId: string, nodeId: number): Promise<void>;
  branchOut(sessionId: string, nodeId: number, prompt: string): Promise<void>;
  regenerate(sessionId: string, nodeId: number): Promise<void>;
  collapse(sessionId: string, nodeId: number): Promise<void>;
  expand(sessionId: string, nodeId: number): Promise<void>;
  pause(sessionId: string): Promise<void>;
  resume(sessionId: string): Promise<void>;
  reviewAnswer(sessionId: string): Promise<void>;
}

export class HttpSessionApi implements SessionApi {
  constructor(private baseUrl: string = '', private token: string | null = null) {}

  private headers(): Record<string, string> {
    const headers: Record<string, string> = { 'Content-Type': 'application/json' };
    if (this.token) headers['Authorization'] = `Bearer ${this.token}`;
    return headers;
  }

  private async request(method: string, path: string, body?: unknown): Promise<any> {
    const response = await fetch(this.baseUrl + path, {
      method,
      headers: this.headers(),
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let detail = `${response.status}`;
      try {
        const data = await response.json();
        detail = data.message ?? data.detail ?? detail;
      } catch {
        // non-JSON error body
      }
      throw new Error(`${method} ${path} failed: ${detail}`);
    }
    if (response.status === 204) return null;
    return response.json().catch(() => null);
  }

  async createSession(prompt: string): Promise<string> {
    const data = await this.request('POST', '/sessions', { prompt });
    return data.session_id;
  }

  subscribe(sessionId: string, from: number, onEvent: (e: SessionEvent) => void): () => void {
    let lastSeq = from - 1;
    let closed = false;
    let source: EventSource | null = null;

    const connect = () => {
      if (closed) return;
      source = new EventSource(
        `${this.baseUrl}/sessions/${sessionId}/events?from=${lastSeq + 1}`,
      );
      source.onmessage = (message) => {
        const event = JSON.parse(message.data) as SessionEvent;
        if (event.seq > lastSeq) {
          lastSeq = event.seq;
          onEvent(event);
        }
      };
      source.onerror = () => {
        // reconnect and replay from the next sequence so nothing is lost
        source?.close();
        if (!closed) setTimeout(connect, 1000);
      };
    };
    connect();
    return () => {
      closed = true;
      source?.close();
    };
  }

  submitFeedback(sessionId: string, nodeId: number, answer: string | null): Promise<void> {
    return this.request(
      'POST',
      `/nodes/${nodeId}/feedback?session=${sessionId}`,
      answer === null ? {} : { answer },
    );
  }

  editNode(sessionId: string, nodeId: number, text: string): Promise<void> {
    return this.request('PATCH', `/nodes/${nodeId}?session=${sessionId}`, { text });
  }

  deleteNode(sessionId: string, nodeId: number): Promise<void> {
    return this.request('DELETE', `/nodes/${nodeId}?session=${sessionId}`);
  }

  branchOut(sessionId: string, nodeId: number, prompt: string): Promise<void> {
    return this.request('POST', `/nodes/${nodeId}/branch?session=${sessionId}`, { prompt });
  }

  regenerate(sessionId: string, nodeId: number): Promise<void> {
    return this.request('POST', `/nodes/${nodeId}/regenerate?session=${sessionId}`);
  }

  collapse(sessionId: string, nodeId: number): Promise<void> {
    return this.request('POST', `/nodes/${nodeId}/collapse?session=${sessionId}`);
  }

  expand(sessionId: string, nodeId: number): Promise<void> {
    return this.request('POST', `/nodes/${nodeId}/expand?session=${sessionId}`);
  }

  pause(sessionId: string): Promise<void> {
    return this.request('POST', `/sessions/${sessionId}/pause`);
  }

  resume(sessionId: string): Promise<void> {
    return this.request('POST', `/sessions/${sessionId}/resume`);
  }

  reviewAnswer(sessionId: string): Promise<void> {
    return this.request('POST', `/sessions/${sessionId}/answer`);
  }
}
