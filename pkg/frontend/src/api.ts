/**
 * Thin fetch client for the session service. Every method resolves to the
 * parsed JSON body or throws ApiError with the server's error message.
 */

import type { Action, ExportDocument, View } from './types.js';

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export interface CreateSessionRequest {
  experiment: number;
  condition?: string;
  subject: string;
  maze?: string;
  mazes?: string[];
  budget?: number;
}

/** The service surface the app consumes; SessionClient is the HTTP one. */
export interface SessionApi {
  createSession(req: CreateSessionRequest): Promise<View>;
  getSession(sessionId: string): Promise<View>;
  submitAction(sessionId: string, action: Action | 'done'): Promise<View>;
  advance(sessionId: string): Promise<View>;
  exportSession(sessionId: string): Promise<ExportDocument>;
}

async function requestJson<T>(url: string, init?: RequestInit): Promise<T> {
  let response: Response;
  try {
    response = await fetch(url, init);
  } catch (err) {
    throw new ApiError(0, `network failure: ${String(err)}`);
  }
  const body = (await response.json()) as T & { error?: string };
  if (!response.ok) {
    throw new ApiError(response.status, body.error ?? `HTTP ${response.status}`);
  }
  return body;
}

export class SessionClient implements SessionApi {
  constructor(private baseUrl: string = '') {}

  createSession(req: CreateSessionRequest): Promise<View> {
    return requestJson<View>(`${this.baseUrl}/sessions`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(req),
    });
  }

  getSession(sessionId: string): Promise<View> {
    return requestJson<View>(`${this.baseUrl}/sessions/${sessionId}`);
  }

  submitAction(sessionId: string, action: Action | 'done'): Promise<View> {
    return requestJson<View>(`${this.baseUrl}/sessions/${sessionId}/actions`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ action }),
    });
  }

  advance(sessionId: string): Promise<View> {
    return requestJson<View>(`${this.baseUrl}/sessions/${sessionId}/advance`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({}),
    });
  }

  exportSession(sessionId: string): Promise<ExportDocument> {
    return requestJson<ExportDocument>(`${this.baseUrl}/sessions/${sessionId}/export`);
  }
}
