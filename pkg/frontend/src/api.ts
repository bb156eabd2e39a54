// Typed client for the reasoning service. A 409 on edit is not an error
// at this level: it carries the conflict explanation the UI must show.

import {
  ConflictResponse, EditResponse, ExplainResponse, Meta, OptimizeResponse,
  SessionResponse, StateJson, Value,
} from "./types.js";

export class ApiError extends Error {
  constructor(message: string, public status: number) {
    super(message);
  }
}

export type EditResult =
  | { kind: "ok"; response: EditResponse }
  | { kind: "conflict"; response: ConflictResponse };

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, {
    headers: { "content-type": "application/json" },
    ...init,
  });
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = await response.json();
      detail = body.error ?? body.detail ?? detail;
    } catch {
      /* non-JSON error body */
    }
    throw new ApiError(detail, response.status);
  }
  return response.json() as Promise<T>;
}

export class Client {
  constructor(private base: string = "") {}

  postKb(source: string): Promise<{ kb_id: string; meta: Meta }> {
    return request(`${this.base}/kb`, {
      method: "POST",
      body: JSON.stringify({ source }),
    });
  }

  meta(kbId: string): Promise<Meta> {
    return request(`${this.base}/kb/${kbId}/meta`);
  }

  createSession(kbId: string): Promise<SessionResponse> {
    return request(`${this.base}/session`, {
      method: "POST",
      body: JSON.stringify({ kb_id: kbId }),
    });
  }

  state(sessionId: string): Promise<{ state: StateJson }> {
    return request(`${this.base}/session/${sessionId}/state`);
  }

  async edit(sessionId: string, action: "assert" | "retract", term: string,
             value?: Value): Promise<EditResult> {
    const response = await fetch(`${this.base}/session/${sessionId}/edit`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ action, term, value }),
    });
    if (response.status === 409) {
      return { kind: "conflict", response: await response.json() };
    }
    if (!response.ok) {
      let detail = response.statusText;
      try {
        detail = (await response.json()).error ?? detail;
      } catch {
        /* keep statusText */
      }
      throw new ApiError(detail, response.status);
    }
    return { kind: "ok", response: await response.json() };
  }

  explain(sessionId: string, literal: string): Promise<ExplainResponse> {
    return request(`${this.base}/session/${sessionId}/explain`, {
      method: "POST",
      body: JSON.stringify({ literal }),
    });
  }

  optimize(sessionId: string, term: string,
           direction: "minimize" | "maximize"): Promise<OptimizeResponse> {
    return request(`${this.base}/session/${sessionId}/optimize`, {
      method: "POST",
      body: JSON.stringify({ term, direction }),
    });
  }
}
