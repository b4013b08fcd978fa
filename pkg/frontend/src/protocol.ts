// Wire protocol v1 message types and the transport abstraction.
// The console only ever talks to the classcode service; tests substitute
// an in-memory wire backed by a mock server.

export type AnswerLetter = "A" | "B" | "C" | "D";

export interface RosterEntry {
  ordinal: number;
  name: string | null;
}

export interface DetectionItem {
  ordinal: number;
  x: number;
  y: number;
  diameter: number;
  theta: number;
  answer: AnswerLetter;
}

export interface AcceptedItem {
  ordinal: number;
  sightings: number;
  longest_run: number;
  x: number;
  y: number;
  answer?: AnswerLetter;
  present?: boolean;
}

export interface SummaryCounts {
  A: number;
  B: number;
  C: number;
  D: number;
  UNKNOWN: number;
}

export type ServerMessage =
  | { type: "session_started"; session_id: string; class_id: string }
  | { type: "question_started"; number: number; tag: string | null }
  | { type: "take_started"; mode: "answers" | "rollcall"; take_id: string }
  | { type: "frame_detections"; frame: number; items: DetectionItem[] }
  | { type: "take_result"; mode: "answers" | "rollcall"; accepted: AcceptedItem[]; frames: number }
  | { type: "summary"; question_number: number; tag: string | null; counts: SummaryCounts; total: number }
  | { type: "answer_set"; ordinal: number; answer: string }
  | { type: "presence_set"; ordinal: number; present: boolean }
  | { type: "log"; lines: string[] }
  | { type: "error"; code: string; msg: string };

export type ClientMessage =
  | { v: 1; type: "start_session"; class_id: string; roster: RosterEntry[] }
  | { type: "start_question"; tag?: string | null }
  | { type: "begin_take"; mode: "answers" | "rollcall" }
  | { type: "end_take" }
  | { type: "set_answer"; ordinal: number; answer: string }
  | { type: "set_presence"; ordinal: number; present: boolean }
  | { type: "get_summary" }
  | { type: "export_log" };

export type WireStatus = "connecting" | "open" | "closed";

// Transport the console speaks through; one server message handler, one
// status handler. Binary payloads are whole encoded frames.
export interface Wire {
  sendJson(msg: ClientMessage): void;
  sendFrame(data: Blob | ArrayBuffer | Uint8Array): void;
  onMessage(handler: (msg: ServerMessage) => void): void;
  onStatus(handler: (status: WireStatus) => void): void;
  close(): void;
}

const RECONNECT_DELAY_MS = 1500;

export function connectWire(url: string): Wire {
  let socket: WebSocket | null = null;
  let closedByUs = false;
  let messageHandler: (msg: ServerMessage) => void = () => {};
  let statusHandler: (status: WireStatus) => void = () => {};

  function open() {
    statusHandler("connecting");
    socket = new WebSocket(url);
    socket.binaryType = "arraybuffer";
    socket.onopen = () => statusHandler("open");
    socket.onmessage = (event) => {
      if (typeof event.data !== "string") return; // server never sends binary
      try {
        messageHandler(JSON.parse(event.data) as ServerMessage);
      } catch {
        console.warn("unparseable server message", event.data);
      }
    };
    socket.onclose = () => {
      statusHandler("closed");
      if (!closedByUs) setTimeout(open, RECONNECT_DELAY_MS);
    };
  }

  open();
  return {
    sendJson(msg) {
      socket?.send(JSON.stringify(msg));
    },
    sendFrame(data) {
      socket?.send(data as ArrayBuffer);
    },
    onMessage(handler) {
      messageHandler = handler;
    },
    onStatus(handler) {
      statusHandler = handler;
    },
    close() {
      closedByUs = true;
      socket?.close();
    },
  };
}
