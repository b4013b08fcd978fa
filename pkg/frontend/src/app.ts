// Console composition: five screens over one store, rendered into a root
// element. Navigation is linear; the single back button always moves
// exactly one screen.
//
//   start -> capture -> detail -> chart
//                 settings (from anywhere, returns where it came from)

import { startCaptureLoop, drawOverlay, webcamSource, MAX_FRAME_W, MAX_FRAME_H } from "./capture.js";
import type { CaptureLoop, FrameSource } from "./capture.js";
import { drawPie } from "./chart.js";
import type { Wire } from "./protocol.js";
import { ConsoleStore } from "./state.js";
import type { Screen } from "./state.js";

export interface AppOptions {
  wire: Wire;
  root: HTMLElement;
  frameSource?: () => Promise<FrameSource>; // test hook; default webcam
}

export class ConsoleApp {
  readonly store: ConsoleStore;
  private root: HTMLElement;
  private makeSource: () => Promise<FrameSource>;
  private capture: CaptureLoop | null = null;
  private video: HTMLVideoElement | null = null;

  constructor(opts: AppOptions) {
    this.store = new ConsoleStore(opts.wire);
    this.root = opts.root;
    this.makeSource = opts.frameSource
      ?? (async () => webcamSource(this.video ?? document.createElement("video")));
    this.store.subscribe(() => this.render());
    this.render();
  }

  // -- actions -------------------------------------------------------------

  async beginCapture(mode: "answers" | "rollcall"): Promise<void> {
    this.store.beginTake(mode);
    try {
      const source = await this.makeSource();
      this.capture = startCaptureLoop(this.store, source);
      this.store.goTo("capture");
    } catch (err) {
      this.store.state.lastError = `camera unavailable: ${err}`;
      this.render();
    }
  }

  async endCapture(): Promise<void> {
    if (this.capture) {
      await this.capture.stop();
      this.capture = null;
    }
    this.store.endTake();
    this.store.goTo("detail");
  }

  // -- rendering -----------------------------------------------------------

  private render(): void {
    const st = this.store.state;
    this.root.replaceChildren();
    const header = el("header", {});
    if (st.wireStatus !== "open") {
      header.append(el("div", { class: "banner", "data-role": "reconnect-banner" },
        st.wireStatus === "connecting" ? "connecting to service..." : "connection lost, retrying..."));
    }
    if (st.lastError) {
      header.append(el("div", { class: "banner error", "data-role": "error-banner" }, st.lastError));
    }
    const backTo = this.store.backTarget();
    if (backTo !== null) {
      const back = el("button", { "data-role": "back", "data-target": backTo }, "< back");
      back.addEventListener("click", () => this.store.back());
      header.append(back);
    }
    if (st.screen !== "settings") {
      const gear = el("button", { "data-role": "open-settings" }, "settings");
      gear.addEventListener("click", () => this.store.goTo("settings"));
      header.append(gear);
    }
    this.root.append(header);

    const body = el("main", { "data-screen": st.screen });
    switch (st.screen) {
      case "start": this.renderStart(body); break;
      case "capture": this.renderCapture(body); break;
      case "detail": this.renderDetail(body); break;
      case "chart": this.renderChart(body); break;
      case "settings": this.renderSettings(body); break;
    }
    this.root.append(body);
  }

  private renderStart(body: HTMLElement): void {
    body.append(el("h1", {}, "classcode"));
    const classInput = el("input", { "data-role": "class-id", placeholder: "class id", value: this.store.state.classId ?? "" }) as HTMLInputElement;
    const tagInput = el("input", { "data-role": "question-tag", placeholder: "question tag (optional)" }) as HTMLInputElement;
    const startBtn = el("button", { "data-role": "start-question" }, "Start question");
    startBtn.addEventListener("click", () => {
      if (!this.store.state.sessionId) {
        this.store.startSession(classInput.value || "class", []);
      }
      this.store.startQuestion(tagInput.value || null);
      void this.beginCapture("answers");
    });
    const rollBtn = el("button", { "data-role": "start-rollcall" }, "Roll call");
    rollBtn.addEventListener("click", () => {
      if (!this.store.state.sessionId) {
        this.store.startSession(classInput.value || "class", []);
      }
      void this.beginCapture("rollcall");
    });
    body.append(classInput, tagInput, startBtn, rollBtn);
  }

  private renderCapture(body: HTMLElement): void {
    const st = this.store.state;
    const stage = el("div", { class: "stage" });
    this.video = el("video", { "data-role": "camera", autoplay: "", playsinline: "" }) as HTMLVideoElement;
    const overlay = el("canvas", { "data-role": "overlay", width: "960", height: "540" }) as HTMLCanvasElement;
    stage.append(this.video, overlay);
    drawOverlay(overlay, st.lastDetections, MAX_FRAME_W, MAX_FRAME_H);
    if (st.lastDetections.length === 0) {
      stage.append(el("div", { class: "hint", "data-role": "scan-hint" },
        "pan slowly across the class; recognized cards get a ring"));
    }
    const doneBtn = el("button", { "data-role": "end-take" },
      st.takeMode === "rollcall" ? "Finish roll call" : "Collect answers");
    doneBtn.addEventListener("click", () => void this.endCapture());
    body.append(stage, doneBtn,
      el("div", { "data-role": "frame-counter" }, `frames: ${st.lastFrameIndex + 1}`));
  }

  private renderDetail(body: HTMLElement): void {
    const st = this.store.state;
    body.append(el("h2", {}, st.takeMode === "rollcall" || st.questionNumber === null
      ? "Roll call" : `Question ${st.questionNumber}${st.questionTag ? ` (${st.questionTag})` : ""}`));
    const grid = el("div", { class: "grid", "data-role": "detail-grid" });
    const rows = [...st.students.values()].sort((a, b) => a.ordinal - b.ordinal);
    const rollcall = st.questionNumber === null;
    for (const row of rows) {
      const shown = row.pendingAnswer ?? row.answer;
      const tile = el("button", {
        class: "tile",
        "data-role": "tile",
        "data-ordinal": String(row.ordinal),
        "data-answer": shown,
        "data-present": String(row.present),
      },
        `${row.ordinal}${row.name ? " " + row.name : ""}: ` +
        (rollcall ? (row.present ? "present" : "absent")
                  : (shown === "UNKNOWN" ? "X" : shown)));
      tile.addEventListener("click", () => {
        if (rollcall) this.store.togglePresence(row.ordinal);
        else this.store.cycleAnswer(row.ordinal);
      });
      grid.append(tile);
    }
    body.append(grid);
    const chartBtn = el("button", { "data-role": "to-chart" }, "Chart");
    chartBtn.addEventListener("click", () => {
      this.store.requestSummary();
      this.store.goTo("chart");
    });
    body.append(chartBtn);
  }

  private renderChart(body: HTMLElement): void {
    const st = this.store.state;
    body.append(el("h2", {}, `Question ${st.questionNumber ?? "-"} summary`));
    const canvas = el("canvas", { "data-role": "pie", width: "420", height: "420" }) as HTMLCanvasElement;
    body.append(canvas);
    if (st.counts) {
      const slices = drawPie(canvas, st.counts);
      const legend = el("div", { "data-role": "legend" });
      for (const s of slices) {
        legend.append(el("span", {
          "data-role": "slice",
          "data-label": s.label,
          "data-count": String(s.count),
          "data-fraction": s.fraction.toFixed(4),
        }, `${s.label}: ${s.count}`));
      }
      body.append(legend);
    } else {
      body.append(el("div", { "data-role": "legend" }, "waiting for summary..."));
    }
    // exactly two forward actions; back (header) is the only way backwards
    const tryAgain = el("button", { "data-role": "try-again" }, "Try again");
    tryAgain.addEventListener("click", () => {
      // rescan the same question; merge semantics handle the overlap
      void this.beginCapture("answers");
    });
    const nextQ = el("button", { "data-role": "new-question" }, "New question");
    nextQ.addEventListener("click", () => {
      this.store.startQuestion(null);
      void this.beginCapture("answers");
    });
    body.append(tryAgain, nextQ);
  }

  private renderSettings(body: HTMLElement): void {
    body.append(el("h2", {}, "Settings"));
    const tag = el("input", { "data-role": "settings-tag", placeholder: "tag for next question" });
    const exportBtn = el("button", { "data-role": "export-log" }, "Export answers log");
    exportBtn.addEventListener("click", () => this.store.requestLog());
    body.append(tag, exportBtn);
    const lines = this.store.state.logLines;
    if (lines) {
      body.append(el("pre", { "data-role": "log-dump" }, lines.join("\n")));
    }
  }
}

function el(tag: string, attrs: Record<string, string> = {}, text?: string): HTMLElement {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text !== undefined) node.textContent = text;
  return node;
}
