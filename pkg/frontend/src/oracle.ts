/** Test-only recomputation of the server's target-selection geometry.
 *
 * The live console never calls this: rendering always shows the server's
 * selection. Contract tests use it to confirm the server's per-object
 * distances against an independent client-side implementation.
 */

import type { SceneSnapshot, SkeletonJoints } from "./types.js";

type Vec3 = [number, number, number];

function sub(a: Vec3, b: Vec3): Vec3 {
  return [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
}

function cross(a: Vec3, b: Vec3): Vec3 {
  return [
    a[1] * b[2] - a[2] * b[1],
    a[2] * b[0] - a[0] * b[2],
    a[0] * b[1] - a[1] * b[0],
  ];
}

function norm(a: Vec3): number {
  return Math.hypot(a[0], a[1], a[2]);
}

export function pointLineDistance(l1: Vec3, l2: Vec3, point: Vec3): number {
  const direction = sub(l2, l1);
  return norm(cross(direction, sub(l1, point))) / norm(direction);
}

export interface RankedObject {
  index: number;
  distance: number;
}

/** Distances to every interactable centroid, lowest index first. */
export function rankInteractables(
  scene: SceneSnapshot,
  skeleton: SkeletonJoints,
): RankedObject[] {
  return scene.objects
    .filter((o) => o.interactable)
    .sort((a, b) => a.index - b.index)
    .map((o) => ({
      index: o.index,
      distance: pointLineDistance(
        skeleton.right_elbow,
        skeleton.right_wrist,
        o.centroid,
      ),
    }));
}

/** Argmin with the server's tie rule (lowest index wins). */
export function nearestInteractable(
  scene: SceneSnapshot,
  skeleton: SkeletonJoints,
): RankedObject {
  const ranked = rankInteractables(scene, skeleton);
  if (ranked.length === 0) {
    throw new Error("no interactable objects");
  }
  let best = ranked[0];
  for (const entry of ranked.slice(1)) {
    if (entry.distance < best.distance) {
      best = entry;
    }
  }
  return best;
}
