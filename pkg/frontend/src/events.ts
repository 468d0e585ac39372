/** Sequence-number buffering for the session event stream.
 *
 * The network may deliver events out of order; consumers must still see
 * them in `seq` order. Events are held back until every predecessor has
 * arrived; duplicates are dropped.
 */

import type { SessionEvent } from "./types.js";

export class SeqBuffer {
  private next: number;
  private pending = new Map<number, SessionEvent>();

  constructor(after = 0) {
    this.next = after + 1;
  }

  /** Feed one event; returns the (possibly empty) batch now deliverable. */
  push(event: SessionEvent): SessionEvent[] {
    if (event.seq < this.next || this.pending.has(event.seq)) {
      return [];
    }
    this.pending.set(event.seq, event);
    const ready: SessionEvent[] = [];
    while (this.pending.has(this.next)) {
      ready.push(this.pending.get(this.next)!);
      this.pending.delete(this.next);
      this.next += 1;
    }
    return ready;
  }

  get waiting(): number {
    return this.pending.size;
  }
}
