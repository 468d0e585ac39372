/** Mouse-drag to pointing-skeleton synthesis.
 *
 * The console shows the desk top-down; a drag paints the pointing line on
 * it. The synthesized elbow sits at the drag start, the wrist at the drag
 * end, both on the horizontal aim plane set in the elevation view, so the
 * server receives an ordinary two-joint skeleton frame.
 */

import type { SkeletonJoints } from "./types.js";

export interface Viewport {
  /** screen pixels of the world origin */
  originX: number;
  originY: number;
  /** pixels per meter */
  scale: number;
}

export interface DragGesture {
  x0: number;
  y0: number;
  x1: number;
  y1: number;
}

export const MIN_DRAG_PX = 5;

export function worldFromScreen(
  px: number,
  py: number,
  view: Viewport,
): [number, number] {
  // screen y grows downward, world y grows away from the operator
  return [(px - view.originX) / view.scale, (view.originY - py) / view.scale];
}

export function screenFromWorld(
  wx: number,
  wy: number,
  view: Viewport,
): [number, number] {
  return [view.originX + wx * view.scale, view.originY - wy * view.scale];
}

/** Null when the drag is too short to define a direction (< 5 px). */
export function dragToSkeleton(
  drag: DragGesture,
  view: Viewport,
  aimHeight: number,
): SkeletonJoints | null {
  const dx = drag.x1 - drag.x0;
  const dy = drag.y1 - drag.y0;
  if (Math.hypot(dx, dy) < MIN_DRAG_PX) {
    return null;
  }
  const [ex, ey] = worldFromScreen(drag.x0, drag.y0, view);
  const [wx, wy] = worldFromScreen(drag.x1, drag.y1, view);
  return {
    right_elbow: [round6(ex), round6(ey), round6(aimHeight)],
    right_wrist: [round6(wx), round6(wy), round6(aimHeight)],
  };
}

function round6(value: number): number {
  return Math.round(value * 1e6) / 1e6;
}
