/** Wire types mirroring the session API (all lengths meters, angles degrees). */

export interface ObjectRecord {
  index: number;
  w: number;
  h: number;
  d: number;
  centroid: [number, number, number];
  interactable: boolean;
}

export interface SceneSnapshot {
  objects: ObjectRecord[];
  effector: { pose: number[]; gripper_opening: number };
  gripper_max_width: number;
  poured: Record<string, number>;
}

export interface SelectionPayload {
  index: number;
  distance: number;
  distances: [number, number][];
}

export interface TrajectorySegment {
  step: number;
  token: string;
  clear: boolean;
  attached: boolean;
}

export interface TrajectoryDump {
  waypoints: [number, number, number][];
  segments: TrajectorySegment[];
}

export interface CheckReport {
  verdict: "clear" | "collision";
  attempts?: number;
  step?: number;
  point?: [number, number, number];
  obstacle?: number;
}

/** One server-sent event; `seq` is strictly increasing per session. */
export interface SessionEvent {
  v: number;
  seq: number;
  t: number;
  type: string;
  [key: string]: unknown;
}

export interface SkeletonJoints {
  right_elbow: [number, number, number];
  right_wrist: [number, number, number];
}
