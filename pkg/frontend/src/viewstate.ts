/** Client view model, folded from the ordered session event stream.
 *
 * The server is authoritative for everything shown: the highlighted object
 * is always the latest server selection, never a local recomputation, and
 * trajectory verdict colors come straight from the plan event.
 */

import type {
  CheckReport,
  SceneSnapshot,
  SelectionPayload,
  SessionEvent,
  TrajectoryDump,
} from "./types.js";

export interface FeedMessage {
  seq: number;
  kind: "info" | "error" | "hint";
  text: string;
}

export interface ViewState {
  scene: SceneSnapshot | null;
  phase: string;
  selection: SelectionPayload | null;
  lastRay: { elbow: number[]; wrist: number[] } | null;
  trajectory: TrajectoryDump | null;
  verdict: CheckReport | null;
  intention: string | null;
  poured: Record<string, number>;
  messages: FeedMessage[];
  lastSeq: number;
}

export function initialViewState(scene: SceneSnapshot | null = null): ViewState {
  return {
    scene,
    phase: "idle",
    selection: null,
    lastRay: null,
    trajectory: null,
    verdict: null,
    intention: null,
    poured: {},
    messages: [],
    lastSeq: 0,
  };
}

export function applyEvent(state: ViewState, event: SessionEvent): ViewState {
  const next: ViewState = { ...state, lastSeq: event.seq };
  switch (event.type) {
    case "utterance":
      next.messages = push(state.messages, event.seq, "info", `you: ${event.text}`);
      break;
    case "state":
      next.phase = event.phase as string;
      next.messages = push(state.messages, event.seq, "info", `phase: ${event.phase}`);
      break;
    case "skeleton": {
      const joints = event.joints as Record<string, number[]>;
      next.lastRay = {
        elbow: joints.right_elbow ?? [],
        wrist: joints.right_wrist ?? [],
      };
      break;
    }
    case "selection":
      next.selection = {
        index: event.index as number,
        distance: event.distance as number,
        distances: event.distances as [number, number][],
      };
      break;
    case "intention":
      next.intention = event.tuple as string;
      next.messages = push(state.messages, event.seq, "info", `intention ${event.tuple}`);
      break;
    case "plan": {
      const check = event.check as CheckReport;
      next.trajectory = event.trajectory as TrajectoryDump;
      next.verdict = check;
      next.messages = push(state.messages, event.seq, "info", `cross-check: ${check.verdict}`);
      break;
    }
    case "executed":
      next.poured = (event.poured as Record<string, number>) ?? {};
      next.phase = "idle";
      next.selection = null;
      next.messages = push(state.messages, event.seq, "info", "executed");
      break;
    case "error":
      next.messages = push(
        state.messages,
        event.seq,
        "error",
        `${event.code}: ${event.message}`,
      );
      break;
    default:
      // forward compatible: unknown event types only land in the feed
      next.messages = push(state.messages, event.seq, "info", `event ${event.type}`);
  }
  return next;
}

/** Object fill color for the 2.5D views. */
export function objectColor(state: ViewState, index: number): string {
  if (state.selection && state.selection.index === index) {
    return "#f5b942"; // selected
  }
  const record = state.scene?.objects.find((o) => o.index === index);
  return record?.interactable ? "#4f9d69" : "#8a8a8a";
}

export function segmentColor(clear: boolean): string {
  return clear ? "#2d7ff9" : "#d64545";
}

function push(
  messages: FeedMessage[],
  seq: number,
  kind: FeedMessage["kind"],
  text: string,
): FeedMessage[] {
  return [...messages, { seq, kind, text }];
}
