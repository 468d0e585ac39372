/** Contract tests against recorded server traffic: drag-to-point must
 * highlight exactly the object a client-side oracle ranks nearest, and the
 * server's per-object distances must match that oracle within display
 * rounding. The live console never runs the oracle; it exists only here.
 */

import { describe, expect, it } from "vitest";
import { readFileSync } from "node:fs";

import { nearestInteractable, rankInteractables } from "../src/oracle.js";
import { applyEvent, initialViewState } from "../src/viewstate.js";
import type { SessionEvent } from "../src/types.js";

const layouts = JSON.parse(readFileSync(new URL("../fixtures/layouts.json", import.meta.url), "utf8"));

const DISPLAY_ROUNDING = 1e-6;

describe("drag-to-point highlighting (20 scripted layouts)", () => {
  it("covers the briquette pairs and mixed desks", () => {
    expect(layouts.length).toBe(20);
    expect(layouts.filter((l: any) => l.name.startsWith("pair")).length).toBe(10);
  });

  for (const layout of layouts) {
    it(`highlights the oracle-nearest object in ${layout.name}`, () => {
      // fold the recorded server events into the view state
      let state = initialViewState(layout.scene);
      for (const event of layout.server_events as SessionEvent[]) {
        state = applyEvent(state, event);
      }
      expect(state.selection).not.toBeNull();

      const oracle = nearestInteractable(layout.scene, layout.skeleton);
      expect(state.selection!.index).toBe(oracle.index);

      // server distances agree with the independent recomputation
      const ranked = rankInteractables(layout.scene, layout.skeleton);
      const serverDistances = new Map(
        (layout.server_selection.distances as [number, number][]).map(([i, d]) => [i, d]),
      );
      expect(serverDistances.size).toBe(ranked.length);
      for (const entry of ranked) {
        const server = serverDistances.get(entry.index);
        expect(server).toBeDefined();
        expect(Math.abs(server! - entry.distance)).toBeLessThan(DISPLAY_ROUNDING);
      }
    });
  }

  it("ties resolve to the lowest index on both sides", () => {
    const tie = layouts.find((l: any) => l.name === "pair-tie");
    expect(tie.server_selection.index).toBe(0);
    expect(nearestInteractable(tie.scene, tie.skeleton).index).toBe(0);
    const distances = tie.server_selection.distances as [number, number][];
    expect(distances[0][1]).toBeCloseTo(distances[1][1], 12);
  });

  it("never highlights obstacle-class objects", () => {
    for (const layout of layouts) {
      const obstacleIndices = new Set(
        layout.scene.objects.filter((o: any) => !o.interactable).map((o: any) => o.index),
      );
      expect(obstacleIndices.has(layout.server_selection.index)).toBe(false);
    }
  });
});
