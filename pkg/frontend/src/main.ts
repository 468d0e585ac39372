/** Browser wiring: controls, live event stream, and the two canvas views. */

import { SessionClient } from "./api.js";
import { dragToSkeleton, type DragGesture, type Viewport } from "./drag.js";
import { SeqBuffer } from "./events.js";
import { drawElevation, drawTopDown, type DrawContext } from "./render.js";
import type { SceneSnapshot, SessionEvent, SkeletonJoints } from "./types.js";
import { applyEvent, initialViewState, type ViewState } from "./viewstate.js";

const TOP_VIEW: Viewport = { originX: 320, originY: 360, scale: 480 };
const SIDE_VIEW: Viewport = { originX: 320, originY: 210, scale: 480 };

interface ConsoleElements {
  top: HTMLCanvasElement;
  side: HTMLCanvasElement;
  command: HTMLInputElement;
  send: HTMLButtonElement;
  phase: HTMLElement;
  verdict: HTMLElement;
  feed: HTMLElement;
  hint: HTMLElement;
  skeletonFile: HTMLInputElement;
}

export class OperatorConsole {
  private state: ViewState = initialViewState();
  private buffer = new SeqBuffer();
  private sessionId = "";
  private clock = 0;
  private drag: DragGesture | null = null;
  private aimHeight = 0.06;
  private closeStream: (() => void) | null = null;

  constructor(
    private client: SessionClient,
    private el: ConsoleElements,
  ) {}

  async start(world: unknown): Promise<void> {
    const created = await this.client.createSession(world);
    this.sessionId = created.id;
    this.state = initialViewState(created.scene as SceneSnapshot);
    this.bindControls();
    this.closeStream = this.client.subscribe(this.sessionId, 0, (event) => {
      for (const ready of this.buffer.push(event)) {
        this.state = applyEvent(this.state, ready);
      }
      this.render();
    });
    this.render();
  }

  stop(): void {
    this.closeStream?.();
  }

  private bindControls(): void {
    this.el.send.onclick = () => void this.sendCommand();
    this.el.command.onkeydown = (event) => {
      if (event.key === "Enter") {
        void this.sendCommand();
      }
    };
    this.el.top.onmousedown = (event) => {
      this.drag = { x0: event.offsetX, y0: event.offsetY, x1: event.offsetX, y1: event.offsetY };
    };
    this.el.top.onmousemove = (event) => {
      if (this.drag) {
        this.drag.x1 = event.offsetX;
        this.drag.y1 = event.offsetY;
      }
    };
    this.el.top.onmouseup = () => void this.finishDrag();
    this.el.side.onmousedown = (event) => {
      // elevation drag sets the pointing plane height
      this.aimHeight = Math.max(0, (SIDE_VIEW.originY - event.offsetY) / SIDE_VIEW.scale);
      this.el.hint.textContent = `aim height ${this.aimHeight.toFixed(2)} m`;
    };
    this.el.skeletonFile.onchange = () => void this.replaySkeletonFile();
  }

  private async finishDrag(): Promise<void> {
    if (!this.drag || !this.sessionId) {
      return;
    }
    const skeleton = dragToSkeleton(this.drag, TOP_VIEW, this.aimHeight);
    this.drag = null;
    if (skeleton === null) {
      this.el.hint.textContent = "drag further to set a pointing direction";
      return;
    }
    await this.post(() => this.client.sendSkeleton(this.sessionId, skeleton, this.tick()));
  }

  private async sendCommand(): Promise<void> {
    const text = this.el.command.value.trim();
    if (!text || !this.sessionId) {
      return;
    }
    this.el.command.value = "";
    await this.post(() => this.client.sendUtterance(this.sessionId, text, this.tick()));
  }

  /** Upload a recorded skeleton stream (JSON lines of frames) and replay it. */
  private async replaySkeletonFile(): Promise<void> {
    const file = this.el.skeletonFile.files?.[0];
    if (!file) {
      return;
    }
    const text = await file.text();
    for (const line of text.split("\n")) {
      if (!line.trim()) {
        continue;
      }
      const frame = JSON.parse(line) as { joints: SkeletonJoints };
      await this.post(() => this.client.sendSkeleton(this.sessionId, frame.joints, this.tick()));
    }
  }

  private async post(send: () => Promise<{ events: SessionEvent[] }>): Promise<void> {
    try {
      await send(); // events also arrive on the stream; the buffer dedupes
    } catch (error) {
      this.el.hint.textContent = String(error);
    }
    this.render();
  }

  private tick(): number {
    this.clock += 1;
    return this.clock;
  }

  private render(): void {
    const top = this.el.top.getContext("2d") as unknown as DrawContext;
    const side = this.el.side.getContext("2d") as unknown as DrawContext;
    drawTopDown(top, this.state, TOP_VIEW, this.el.top.width, this.el.top.height);
    drawElevation(side, this.state, SIDE_VIEW, this.el.side.width, this.el.side.height);
    this.el.phase.textContent = this.state.phase;
    this.el.verdict.textContent = this.state.verdict ? this.state.verdict.verdict : "-";
    this.el.feed.textContent = this.state.messages
      .map((m) => `[${m.kind}] ${m.text}`)
      .join("\n");
  }
}

export function mount(baseUrl: string, world: unknown): OperatorConsole {
  const byId = <T extends HTMLElement>(id: string) => document.getElementById(id) as T;
  const consoleApp = new OperatorConsole(new SessionClient(baseUrl), {
    top: byId<HTMLCanvasElement>("top-view"),
    side: byId<HTMLCanvasElement>("side-view"),
    command: byId<HTMLInputElement>("command"),
    send: byId<HTMLButtonElement>("send"),
    phase: byId("phase"),
    verdict: byId("verdict"),
    feed: byId("feed"),
    hint: byId("hint"),
    skeletonFile: byId<HTMLInputElement>("skeleton-file"),
  });
  void consoleApp.start(world);
  return consoleApp;
}
