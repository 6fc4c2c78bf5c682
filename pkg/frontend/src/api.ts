/**
 * API client. One in-flight answer request per session: submitting a new
 * question aborts the pending one.
 */

import {
  AnswerPayload,
  ExecutePayload,
  PhaseErrorDetail,
  phaseErrorFromBody,
} from "./model.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: PhaseErrorDetail,
  ) {
    super(`${detail.phase}: ${detail.message}`);
  }
}

async function post<T>(url: string, body: unknown, signal?: AbortSignal): Promise<T> {
  const response = await fetch(url, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
    signal,
  });
  if (!response.ok) {
    let parsed: unknown = null;
    try {
      parsed = await response.json();
    } catch {
      // non-JSON error body
    }
    throw new ApiError(response.status, phaseErrorFromBody(parsed));
  }
  return (await response.json()) as T;
}

export class SessionClient {
  private pending: AbortController | null = null;

  constructor(private readonly base: string = "") {}

  /** Ask a question; any answer request still in flight is cancelled. */
  async answer(
    question: string,
    endpointUrl?: string,
    overrides?: Record<string, unknown>,
  ): Promise<AnswerPayload> {
    this.pending?.abort();
    const controller = new AbortController();
    this.pending = controller;
    try {
      return await post<AnswerPayload>(
        `${this.base}/api/answer`,
        {
          question,
          ...(endpointUrl ? { endpoint_url: endpointUrl } : {}),
          ...(overrides ? { overrides } : {}),
        },
        controller.signal,
      );
    } finally {
      if (this.pending === controller) {
        this.pending = null;
      }
    }
  }

  async execute(query: string, endpointUrl?: string): Promise<ExecutePayload> {
    return post<ExecutePayload>(`${this.base}/api/execute`, {
      query,
      ...(endpointUrl ? { endpoint_url: endpointUrl } : {}),
    });
  }

  async health(): Promise<{ status: string; version: string }> {
    const response = await fetch(`${this.base}/api/health`);
    return (await response.json()) as { status: string; version: string };
  }
}
