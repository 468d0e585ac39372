import { describe, expect, it } from "vitest";

import { SessionClient, type FetchLike } from "../src/api.js";

function fakeFetch(
  handler: (url: string, init?: RequestInit) => { status: number; body: unknown },
): FetchLike {
  return async (url, init) => {
    const result = handler(url, init);
    return new Response(JSON.stringify(result.body), { status: result.status });
  };
}

describe("SessionClient", () => {
  it("posts utterances with text and timestamp", async () => {
    const seen: { url?: string; body?: any } = {};
    const client = new SessionClient(
      "http://api",
      fakeFetch((url, init) => {
        seen.url = url;
        seen.body = JSON.parse(init!.body as string);
        return { status: 200, body: { events: [] } };
      }),
    );
    await client.sendUtterance("abc", "pick up", 1.5);
    expect(seen.url).toBe("http://api/sessions/abc/utterance");
    expect(seen.body).toEqual({ text: "pick up", t: 1.5 });
  });

  it("raises on error statuses with the server detail", async () => {
    const client = new SessionClient(
      "http://api",
      fakeFetch(() => ({ status: 400, body: { detail: "timestamp out of order" } })),
    );
    await expect(client.sendUtterance("abc", "x", 0)).rejects.toThrow(/400/);
  });

  it("creates sessions from a world spec", async () => {
    const client = new SessionClient(
      "http://api",
      fakeFetch((url, init) => {
        const body = JSON.parse(init!.body as string);
        expect(body.world).toEqual({ boxes: [] });
        return { status: 200, body: { id: "s1", scene: { objects: [] } } };
      }),
    );
    const created = await client.createSession({ boxes: [] });
    expect(created.id).toBe("s1");
  });
});
