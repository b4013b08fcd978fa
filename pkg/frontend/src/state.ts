// Console state: a mirror of session state received over the wire plus the
// current screen. Everything here is reconstructible from server messages
// alone, which is what makes the console refresh-safe.

import type {
  AcceptedItem,
  DetectionItem,
  ServerMessage,
  SummaryCounts,
  Wire,
  WireStatus,
} from "./protocol.js";

export type Screen = "start" | "capture" | "detail" | "chart" | "settings";

// Back navigation is linear and always exactly one step; the usability
// round flagged multi-step and inconsistent back paths as the worst defect.
const BACK_ONE_STEP: Record<Exclude<Screen, "settings">, Screen | null> = {
  start: null,
  capture: "start",
  detail: "capture",
  chart: "detail",
};

export interface StudentRow {
  ordinal: number;
  name: string | null;
  answer: string; // "A".."D", "UNKNOWN"
  present: boolean;
  pendingAnswer: string | null; // optimistic value awaiting the server
}

export interface ConsoleState {
  screen: Screen;
  settingsReturnTo: Screen;
  wireStatus: WireStatus;
  sessionId: string | null;
  classId: string | null;
  questionNumber: number | null;
  questionTag: string | null;
  takeMode: "answers" | "rollcall" | null;
  lastDetections: DetectionItem[];
  lastFrameIndex: number;
  frameAcked: boolean;
  students: Map<number, StudentRow>;
  counts: SummaryCounts | null;
  total: number;
  lastError: string | null;
  logLines: string[] | null;
}

export function initialState(): ConsoleState {
  return {
    screen: "start",
    settingsReturnTo: "start",
    wireStatus: "connecting",
    sessionId: null,
    classId: null,
    questionNumber: null,
    questionTag: null,
    takeMode: null,
    lastDetections: [],
    lastFrameIndex: -1,
    frameAcked: true,
    students: new Map(),
    counts: null,
    total: 0,
    lastError: null,
    logLines: null,
  };
}

export class ConsoleStore {
  state = initialState();
  private listeners: Array<() => void> = [];

  constructor(readonly wire: Wire) {
    wire.onMessage((msg) => this.apply(msg));
    wire.onStatus((status) => {
      this.state.wireStatus = status;
      this.emit();
    });
  }

  subscribe(listener: () => void): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const l of this.listeners) l();
  }

  // -- navigation ---------------------------------------------------------

  goTo(screen: Screen): void {
    if (screen === "settings" && this.state.screen !== "settings") {
      this.state.settingsReturnTo = this.state.screen;
    }
    this.state.screen = screen;
    this.emit();
  }

  back(): void {
    const s = this.state.screen;
    const target = s === "settings" ? this.state.settingsReturnTo : BACK_ONE_STEP[s];
    if (target !== null) {
      this.state.screen = target;
      this.emit();
    }
  }

  backTarget(): Screen | null {
    const s = this.state.screen;
    return s === "settings" ? this.state.settingsReturnTo : BACK_ONE_STEP[s];
  }

  // -- commands -----------------------------------------------------------

  startSession(classId: string, roster: Array<{ ordinal: number; name: string | null }>): void {
    this.state.students = new Map(
      roster.map((r) => [r.ordinal, {
        ordinal: r.ordinal,
        name: r.name,
        answer: "UNKNOWN",
        present: false,
        pendingAnswer: null,
      }]),
    );
    this.wire.sendJson({ v: 1, type: "start_session", class_id: classId, roster });
  }

  startQuestion(tag: string | null): void {
    this.wire.sendJson({ type: "start_question", tag });
  }

  beginTake(mode: "answers" | "rollcall"): void {
    this.state.takeMode = mode;
    this.state.lastDetections = [];
    this.state.lastFrameIndex = -1;
    this.state.frameAcked = true;
    this.wire.sendJson({ type: "begin_take", mode });
  }

  sendFrame(data: Blob | ArrayBuffer | Uint8Array): boolean {
    if (!this.state.frameAcked) return false; // paced by acknowledgment
    this.state.frameAcked = false;
    this.wire.sendFrame(data);
    return true;
  }

  endTake(): void {
    this.wire.sendJson({ type: "end_take" });
  }

  cycleAnswer(ordinal: number): void {
    const row = this.state.students.get(ordinal);
    if (!row) return;
    const order = ["A", "B", "C", "D", "UNKNOWN"];
    const current = row.pendingAnswer ?? row.answer;
    const next = order[(order.indexOf(current) + 1) % order.length];
    row.pendingAnswer = next; // optimistic; reverted on error
    this.wire.sendJson({ type: "set_answer", ordinal, answer: next });
    this.emit();
  }

  togglePresence(ordinal: number): void {
    const row = this.state.students.get(ordinal);
    if (!row) return;
    this.wire.sendJson({ type: "set_presence", ordinal, present: !row.present });
  }

  requestSummary(): void {
    this.wire.sendJson({ type: "get_summary" });
  }

  requestLog(): void {
    this.wire.sendJson({ type: "export_log" });
  }

  // -- server messages ----------------------------------------------------

  private row(ordinal: number): StudentRow {
    let row = this.state.students.get(ordinal);
    if (!row) {
      row = { ordinal, name: null, answer: "UNKNOWN", present: false, pendingAnswer: null };
      this.state.students.set(ordinal, row);
    }
    return row;
  }

  private apply(msg: ServerMessage): void {
    const st = this.state;
    switch (msg.type) {
      case "session_started":
        st.sessionId = msg.session_id;
        st.classId = msg.class_id;
        st.questionNumber = null;
        st.counts = null;
        break;
      case "question_started":
        st.questionNumber = msg.number;
        st.questionTag = msg.tag;
        st.counts = null;
        for (const row of st.students.values()) {
          row.answer = "UNKNOWN";
          row.pendingAnswer = null;
        }
        break;
      case "take_started":
        st.takeMode = msg.mode;
        break;
      case "frame_detections":
        st.lastDetections = msg.items;
        st.lastFrameIndex = msg.frame;
        st.frameAcked = true;
        break;
      case "take_result":
        this.applyTakeResult(msg.mode, msg.accepted);
        break;
      case "summary":
        st.counts = msg.counts;
        st.total = msg.total;
        // the server is authoritative: clear optimistic markers
        for (const row of st.students.values()) row.pendingAnswer = null;
        break;
      case "answer_set": {
        const row = this.row(msg.ordinal);
        row.answer = msg.answer;
        row.pendingAnswer = null;
        break;
      }
      case "presence_set":
        this.row(msg.ordinal).present = msg.present;
        break;
      case "log":
        st.logLines = msg.lines;
        break;
      case "error":
        st.lastError = `${msg.code}: ${msg.msg}`;
        // a rejected command reverts any optimistic tile
        for (const row of st.students.values()) row.pendingAnswer = null;
        break;
    }
    this.emit();
  }

  private applyTakeResult(mode: "answers" | "rollcall", accepted: AcceptedItem[]): void {
    if (mode === "rollcall") {
      for (const item of accepted) this.row(item.ordinal).present = item.present ?? true;
    } else {
      for (const item of accepted) {
        if (item.answer) this.row(item.ordinal).answer = item.answer;
      }
    }
    this.state.takeMode = null;
  }
}
