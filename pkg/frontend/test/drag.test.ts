import { describe, expect, it } from "vitest";
import { readFileSync } from "node:fs";

import {
  MIN_DRAG_PX,
  dragToSkeleton,
  screenFromWorld,
  worldFromScreen,
  type Viewport,
} from "../src/drag.js";

const layouts = JSON.parse(readFileSync(new URL("../fixtures/layouts.json", import.meta.url), "utf8"));

const view: Viewport = { originX: 320, originY: 360, scale: 480 };

describe("viewport mapping", () => {
  it("round-trips screen and world coordinates", () => {
    for (const [wx, wy] of [
      [0, 0],
      [0.3, 0.2],
      [-0.45, 0.05],
    ] as [number, number][]) {
      const [sx, sy] = screenFromWorld(wx, wy, view);
      const [bx, by] = worldFromScreen(sx, sy, view);
      expect(bx).toBeCloseTo(wx, 9);
      expect(by).toBeCloseTo(wy, 9);
    }
  });

  it("screen y grows downward while world y grows forward", () => {
    const [, syNear] = screenFromWorld(0, 0.1, view);
    const [, syFar] = screenFromWorld(0, 0.4, view);
    expect(syFar).toBeLessThan(syNear);
  });
});

describe("dragToSkeleton", () => {
  it("ignores drags shorter than the minimum", () => {
    const drag = { x0: 100, y0: 100, x1: 100 + MIN_DRAG_PX - 1, y1: 100 };
    expect(dragToSkeleton(drag, view, 0.06)).toBeNull();
  });

  it("places elbow at the start and wrist at the end on the aim plane", () => {
    const skeleton = dragToSkeleton({ x0: 320, y0: 360, x1: 320 + 480, y1: 360 }, view, 0.06);
    expect(skeleton).not.toBeNull();
    expect(skeleton!.right_elbow).toEqual([0, 0, 0.06]);
    expect(skeleton!.right_wrist).toEqual([1, 0, 0.06]);
  });

  it("reproduces every recorded fixture skeleton exactly", () => {
    // the fixture generator mirrors this synthesis; both must stay in sync
    expect(layouts.length).toBe(20);
    for (const layout of layouts) {
      const skeleton = dragToSkeleton(layout.drag, layout.viewport, layout.aim_height);
      expect(skeleton).toEqual(layout.skeleton);
    }
  });
});
