/** Thin fetch client for the session API, including the SSE event stream. */

import { SCHEMA_VERSION, SessionResource, SystemEventMsg, TopologyDoc } from "./types.js";

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

export class SchemaMismatchError extends Error {
  constructor(readonly got: string, readonly raw: unknown) {
    super(`unsupported topology schema ${got}, expected ${SCHEMA_VERSION}`);
  }
}

async function asJson(resp: Response): Promise<any> {
  const body = await resp.json().catch(() => ({}));
  if (!resp.ok) {
    throw new ApiError(resp.status, body.error ?? `HTTP ${resp.status}`);
  }
  return body;
}

export class ApiClient {
  constructor(readonly baseUrl: string = "") {}

  async createSession(backend: string = "sim"): Promise<SessionResource> {
    const resp = await fetch(`${this.baseUrl}/api/sessions`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ backend }),
    });
    return asJson(resp);
  }

  async getSession(sessionId: string): Promise<SessionResource> {
    return asJson(await fetch(`${this.baseUrl}/api/sessions/${sessionId}`));
  }

  /** Submit scenario text or a clarification reply; transparently polls
   * when the server answers 202 with a poll token. */
  async postMessage(sessionId: string, text: string): Promise<SystemEventMsg> {
    const resp = await fetch(`${this.baseUrl}/api/sessions/${sessionId}/message`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ text }),
    });
    if (resp.status === 202) {
      const { poll } = await resp.json();
      return this.pollUntilDone(sessionId, poll);
    }
    return asJson(resp);
  }

  private async pollUntilDone(sessionId: string, token: string): Promise<SystemEventMsg> {
    for (;;) {
      await new Promise((resolve) => setTimeout(resolve, 250));
      const resp = await fetch(
        `${this.baseUrl}/api/sessions/${sessionId}/poll/${token}`,
      );
      if (resp.status === 202) continue;
      return asJson(resp);
    }
  }

  async getTopology(sessionId: string): Promise<TopologyDoc> {
    const resp = await fetch(`${this.baseUrl}/api/sessions/${sessionId}/topology`);
    const body = await asJson(resp);
    const schema = resp.headers.get("X-T2N-Schema") ?? body.schema;
    if (schema !== SCHEMA_VERSION) {
      throw new SchemaMismatchError(String(schema), body);
    }
    return body as TopologyDoc;
  }

  async postQuery(sessionId: string, command: string): Promise<SystemEventMsg> {
    const resp = await fetch(`${this.baseUrl}/api/sessions/${sessionId}/query`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ command }),
    });
    return asJson(resp);
  }

  /** Subscribe to the session's event stream. Implemented on fetch
   * streaming so it runs in browsers and under node tests alike.
   * Returns a function that closes the stream. */
  openEvents(
    sessionId: string,
    onEvent: (event: SystemEventMsg) => void,
    onError?: (err: unknown) => void,
  ): () => void {
    const controller = new AbortController();
    (async () => {
      try {
        const resp = await fetch(`${this.baseUrl}/api/sessions/${sessionId}/events`, {
          signal: controller.signal,
        });
        if (!resp.ok || !resp.body) {
          throw new ApiError(resp.status, "event stream unavailable");
        }
        const reader = resp.body.getReader();
        const decoder = new TextDecoder();
        let buffer = "";
        for (;;) {
          const { done, value } = await reader.read();
          if (done) break;
          buffer += decoder.decode(value, { stream: true });
          let index: number;
          while ((index = buffer.indexOf("\n\n")) >= 0) {
            const chunk = buffer.slice(0, index);
            buffer = buffer.slice(index + 2);
            for (const line of chunk.split("\n")) {
              if (line.startsWith("data: ")) {
                onEvent(JSON.parse(line.slice("data: ".length)));
              }
            }
          }
        }
      } catch (err) {
        if (!controller.signal.aborted && onError) onError(err);
      }
    })();
    return () => controller.abort();
  }
}

const IPV4_RE = /^(\d{1,3})\.(\d{1,3})\.(\d{1,3})\.(\d{1,3})$/;

/** Client-side address check so malformed ping targets never hit the API. */
export function isValidIpv4(text: string): boolean {
  const match = IPV4_RE.exec(text.trim());
  if (!match) return false;
  return match.slice(1).every((part) => {
    if (part.length > 1 && part.startsWith("0")) return false;
    return Number(part) <= 255;
  });
}
