/** 2.5D rendering: desk top-down plus a side elevation.
 *
 * Box worlds need no 3D renderer; both views are flat rectangles plus the
 * pointing line and the trajectory polyline colored by per-segment
 * verdict. Drawing goes through a minimal context interface so tests can
 * record draw calls without a DOM.
 */

import { screenFromWorld, type Viewport } from "./drag.js";
import { objectColor, segmentColor, type ViewState } from "./viewstate.js";

export interface DrawContext {
  fillStyle: string;
  strokeStyle: string;
  lineWidth: number;
  fillRect(x: number, y: number, w: number, h: number): void;
  strokeRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  stroke(): void;
  clearRect(x: number, y: number, w: number, h: number): void;
}

export function drawTopDown(
  ctx: DrawContext,
  state: ViewState,
  view: Viewport,
  width: number,
  height: number,
): void {
  ctx.clearRect(0, 0, width, height);
  if (!state.scene) {
    return;
  }
  for (const obj of state.scene.objects) {
    const [sx, sy] = screenFromWorld(
      obj.centroid[0] - obj.w / 2,
      obj.centroid[1] + obj.h / 2,
      view,
    );
    ctx.fillStyle = objectColor(state, obj.index);
    ctx.fillRect(sx, sy, obj.w * view.scale, obj.h * view.scale);
  }
  if (state.lastRay && state.lastRay.elbow.length === 3) {
    const [ex, ey] = screenFromWorld(state.lastRay.elbow[0], state.lastRay.elbow[1], view);
    const [wx, wy] = screenFromWorld(state.lastRay.wrist[0], state.lastRay.wrist[1], view);
    ctx.strokeStyle = "#e0e0e0";
    ctx.lineWidth = 1;
    ctx.beginPath();
    ctx.moveTo(ex, ey);
    // extend the forearm segment across the view
    const dx = wx - ex;
    const dy = wy - ey;
    ctx.lineTo(ex + dx * 50, ey + dy * 50);
    ctx.stroke();
  }
  drawTrajectory(ctx, state, view, (x, y, _z) => screenFromWorld(x, y, view));
}

export function drawElevation(
  ctx: DrawContext,
  state: ViewState,
  view: Viewport,
  width: number,
  height: number,
): void {
  ctx.clearRect(0, 0, width, height);
  if (!state.scene) {
    return;
  }
  for (const obj of state.scene.objects) {
    const left = view.originX + (obj.centroid[0] - obj.w / 2) * view.scale;
    const top = view.originY - (obj.centroid[2] + obj.d / 2) * view.scale;
    ctx.fillStyle = objectColor(state, obj.index);
    ctx.fillRect(left, top, obj.w * view.scale, obj.d * view.scale);
  }
  drawTrajectory(ctx, state, view, (x, _y, z) => [
    view.originX + x * view.scale,
    view.originY - z * view.scale,
  ]);
}

function drawTrajectory(
  ctx: DrawContext,
  state: ViewState,
  _view: Viewport,
  project: (x: number, y: number, z: number) => [number, number],
): void {
  const trajectory = state.trajectory;
  if (!trajectory) {
    return;
  }
  for (const segment of trajectory.segments) {
    const from = trajectory.waypoints[segment.step];
    const to = trajectory.waypoints[segment.step + 1];
    ctx.strokeStyle = segmentColor(segment.clear);
    ctx.lineWidth = segment.attached ? 3 : 1.5;
    ctx.beginPath();
    const [x0, y0] = project(from[0], from[1], from[2]);
    const [x1, y1] = project(to[0], to[1], to[2]);
    ctx.moveTo(x0, y0);
    ctx.lineTo(x1, y1);
    ctx.stroke();
  }
}
