import { describe, expect, it } from "vitest";

import { SeqBuffer } from "../src/events.js";
import type { SessionEvent } from "../src/types.js";

function event(seq: number): SessionEvent {
  return { v: 1, seq, t: seq, type: "utterance", text: `e${seq}` };
}

describe("SeqBuffer", () => {
  it("delivers in-order input immediately", () => {
    const buffer = new SeqBuffer();
    expect(buffer.push(event(1)).map((e) => e.seq)).toEqual([1]);
    expect(buffer.push(event(2)).map((e) => e.seq)).toEqual([2]);
  });

  it("holds back gaps and releases them in order", () => {
    const buffer = new SeqBuffer();
    expect(buffer.push(event(3))).toEqual([]);
    expect(buffer.push(event(2))).toEqual([]);
    expect(buffer.waiting).toBe(2);
    expect(buffer.push(event(1)).map((e) => e.seq)).toEqual([1, 2, 3]);
    expect(buffer.waiting).toBe(0);
  });

  it("drops duplicates and stale events", () => {
    const buffer = new SeqBuffer();
    buffer.push(event(1));
    expect(buffer.push(event(1))).toEqual([]);
    const late = new SeqBuffer(5);
    expect(late.push(event(4))).toEqual([]);
    expect(late.push(event(6)).map((e) => e.seq)).toEqual([6]);
  });

  it("orders an arbitrarily shuffled stream", () => {
    const buffer = new SeqBuffer();
    const order = [5, 1, 4, 2, 7, 3, 6];
    const delivered: number[] = [];
    for (const seq of order) {
      for (const ready of buffer.push(event(seq))) {
        delivered.push(ready.seq);
      }
    }
    expect(delivered).toEqual([1, 2, 3, 4, 5, 6, 7]);
  });
});
