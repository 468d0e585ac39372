/** Thin client for the session HTTP/event-stream API.
 *
 * `fetch` is injectable so tests can run against recorded traffic; the
 * event subscription hands raw events to a caller-owned SeqBuffer so
 * ordering is handled in one place.
 */

import type { SceneSnapshot, SessionEvent, SkeletonJoints } from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export interface IngestResponse {
  events: SessionEvent[];
}

export class SessionClient {
  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async post<T>(path: string, body: unknown): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!response.ok) {
      const detail = await response.text();
      throw new Error(`${response.status}: ${detail}`);
    }
    return (await response.json()) as T;
  }

  async createSession(world?: unknown, scene?: SceneSnapshot): Promise<{ id: string; scene: SceneSnapshot }> {
    return this.post("/sessions", { world: world ?? null, scene: scene ?? null });
  }

  async sendUtterance(sessionId: string, text: string, t: number): Promise<IngestResponse> {
    return this.post(`/sessions/${sessionId}/utterance`, { text, t });
  }

  async sendSkeleton(
    sessionId: string,
    joints: SkeletonJoints,
    t: number,
  ): Promise<IngestResponse> {
    return this.post(`/sessions/${sessionId}/skeleton`, { joints, t });
  }

  async state(sessionId: string): Promise<Record<string, unknown>> {
    const response = await this.fetchImpl(`${this.baseUrl}/sessions/${sessionId}/state`);
    if (!response.ok) {
      throw new Error(`${response.status}`);
    }
    return (await response.json()) as Record<string, unknown>;
  }

  /** Live event subscription via server-sent events. */
  subscribe(sessionId: string, after: number, onEvent: (e: SessionEvent) => void): () => void {
    const source = new EventSource(
      `${this.baseUrl}/sessions/${sessionId}/events?after=${after}`,
    );
    source.onmessage = (message) => {
      onEvent(JSON.parse(message.data) as SessionEvent);
    };
    return () => source.close();
  }
}

/** Parse one SSE text chunk into events (used by tests and polling mode). */
export function parseSseChunk(chunk: string): SessionEvent[] {
  const events: SessionEvent[] = [];
  for (const block of chunk.split("\n\n")) {
    const dataLines = block
      .split("\n")
      .filter((line) => line.startsWith("data: "))
      .map((line) => line.slice(6));
    if (dataLines.length > 0) {
      events.push(JSON.parse(dataLines.join("\n")) as SessionEvent);
    }
  }
  return events;
}
