"""Frame-streaming poll service speaking wire protocol v1.

One operator at a time: the first connection holds the floor, later ones
are refused with a BUSY error. JSON text messages carry commands; binary
messages carry one encoded frame (PNG/JPEG) belonging to the open take.
Every client message gets a reply; processing a frame additionally pushes
that frame's detections so the console can draw its overlay, and ending a
take pushes the updated summary after the take result.

Session state lives in the process and survives reconnects (an unfinished
take is discarded); when a log path is configured, every mutation rewrites
the event log so a restarted service can replay it.

Protocol v1, client to server:
    {"v":1,"type":"start_session","class_id":str,"roster":[{"ordinal":n,"name":str}]}
    {"type":"start_question","tag":str|null} | {"type":"begin_take","mode":"answers"|"rollcall"}
    <binary frame> | {"type":"end_take"} | {"type":"set_answer","ordinal":n,"answer":"A".."D"|"UNKNOWN"}
    {"type":"set_presence","ordinal":n,"present":bool}
    {"type":"get_summary"} | {"type":"export_log"}
Server to client:
    {"type":"session_started"|"question_started"|"take_started"|"presence_set"|"answer_set"...}
    {"type":"frame_detections","frame":i,"items":[{"ordinal","x","y","diameter","theta","answer"}]}
    {"type":"take_result","mode":...,"accepted":[...]} then {"type":"summary","counts":{...}}
    {"type":"log","lines":[...]} | {"type":"error","code":str,"msg":str}
"""

from __future__ import annotations

import io
import json
import logging
import threading
from pathlib import Path

import numpy as np

from . import engine, imaging
from . import session as sess
from .codec import Answer
from .config import ServiceConfig
from .errors import ClasscodeError

logger = logging.getLogger(__name__)

PROTOCOL_VERSION = 1


class ServiceState:
    """Mutable service state shared across connections, single-writer."""

    def __init__(self, cfg: ServiceConfig, clock=sess.utc_now):
        self.cfg = cfg
        self.clock = clock
        self.session: sess.Session | None = None
        self.current_question: sess.Question | None = None
        self.take: engine.TakeRun | None = None
        self.lock = threading.Lock()
        if cfg.log_path and Path(cfg.log_path).exists():
            lines = Path(cfg.log_path).read_text(encoding="utf-8").splitlines()
            if lines:
                self.session = sess.replay_log(lines, clock=clock)
                numbers = sorted(self.session.questions)
                if numbers:
                    self.current_question = self.session.questions[numbers[-1]]
                logger.info("replayed %d log lines", len(lines))

    def persist(self) -> None:
        if self.cfg.log_path and self.session is not None:
            Path(self.cfg.log_path).write_text(
                "\n".join(sess.export_log(self.session)) + "\n", encoding="utf-8")


def _err(code: str, msg: str) -> str:
    return json.dumps({"type": "error", "code": code, "msg": msg})


def _detection_items(result) -> list[dict]:
    from .codec import orientation_to_answer

    return [
        {
            "ordinal": d.id.ordinal,
            "x": round(d.center[0], 2),
            "y": round(d.center[1], 2),
            "diameter": round(d.diameter, 2),
            "theta": round(d.orientation, 4),
            "answer": orientation_to_answer(d.orientation).value,
        }
        for d in result.detections
    ]


def _accepted_items(accepted, mode: str) -> list[dict]:
    items = []
    for a in accepted:
        item = {
            "ordinal": a.id.ordinal,
            "sightings": a.sightings,
            "longest_run": a.longest_run,
            "x": round(a.last_center[0], 2),
            "y": round(a.last_center[1], 2),
        }
        if mode == "rollcall":
            item["present"] = True
        else:
            item["answer"] = a.answer.value
        items.append(item)
    return items


class Operator:
    """Handles one operator connection's messages against shared state."""

    def __init__(self, state: ServiceState):
        self.state = state

    def handle(self, raw) -> list[str]:
        if isinstance(raw, (bytes, bytearray)):
            return self.handle_frame(bytes(raw))
        try:
            msg = json.loads(raw)
            if not isinstance(msg, dict) or "type" not in msg:
                raise ValueError("message must be an object with a type")
        except ValueError as exc:
            return [_err("BAD_MESSAGE", str(exc))]
        handler = getattr(self, "on_" + str(msg["type"]), None)
        if handler is None:
            return [_err("UNKNOWN_TYPE", f"unknown message type {msg['type']!r}")]
        try:
            return handler(msg)
        except ClasscodeError as exc:
            return [_err(type(exc).__name__.upper(), str(exc))]
        except KeyError as exc:
            return [_err("BAD_MESSAGE", f"missing field {exc}")]

    # -- commands ----------------------------------------------------------

    def on_start_session(self, msg) -> list[str]:
        roster = [(int(r["ordinal"]), r.get("name")) for r in msg.get("roster", [])]
        st = self.state
        st.session = sess.start_session(msg["class_id"], roster, clock=st.clock)
        st.current_question = None
        st.take = None
        st.persist()
        return [json.dumps({
            "type": "session_started",
            "session_id": st.session.session_id,
            "class_id": st.session.class_id,
        })]

    def _require_session(self) -> sess.Session:
        if self.state.session is None:
            raise ClasscodeError("no session started")
        return self.state.session

    def on_start_question(self, msg) -> list[str]:
        session = self._require_session()
        number = msg.get("number")
        q = sess.start_question(session, tag=msg.get("tag"),
                                number=None if number is None else int(number))
        self.state.current_question = q
        self.state.persist()
        return [json.dumps({"type": "question_started", "number": q.number,
                            "tag": q.tag})]

    def on_begin_take(self, msg) -> list[str]:
        self._require_session()
        mode = msg.get("mode", "answers")
        if mode not in ("answers", "rollcall"):
            return [_err("BAD_MESSAGE", f"bad take mode {mode!r}")]
        if mode == "answers" and self.state.current_question is None:
            return [_err("NO_QUESTION", "start a question before an answers take")]
        self.state.take = engine.TakeRun(mode=mode)
        return [json.dumps({"type": "take_started", "mode": mode,
                            "take_id": self.state.take.take_id})]

    def handle_frame(self, payload: bytes) -> list[str]:
        if len(payload) > self.state.cfg.max_frame_bytes:
            return [_err("FRAME_TOO_LARGE",
                         f"{len(payload)} bytes exceeds {self.state.cfg.max_frame_bytes}")]
        if self.state.take is None:
            return [_err("NO_TAKE", "binary frame outside an open take")]
        try:
            gray = _decode_image(payload)
        except Exception as exc:
            return [_err("BAD_FRAME", f"cannot decode image: {exc}")]
        result = self.state.take.process_frame(gray, self.state.cfg)
        return [json.dumps({
            "type": "frame_detections",
            "frame": result.frame_index,
            "items": _detection_items(result),
        })]

    def on_end_take(self, msg) -> list[str]:
        session = self._require_session()
        take = self.state.take
        if take is None:
            return [_err("NO_TAKE", "no take in progress")]
        self.state.take = None
        accepted = take.finish(self.state.cfg, single_shot=bool(msg.get("single_shot")))
        replies = []
        if take.mode == "rollcall":
            sess.roll_call_take(session, accepted)
            replies.append(json.dumps({
                "type": "take_result", "mode": "rollcall",
                "accepted": _accepted_items(accepted, "rollcall"),
                "frames": take.frame_count,
            }))
        else:
            q = self.state.current_question
            sess.apply_take(session, q, accepted, take_id=take.take_id)
            replies.append(json.dumps({
                "type": "take_result", "mode": "answers",
                "accepted": _accepted_items(accepted, "answers"),
                "frames": take.frame_count,
            }))
            replies.extend(self.on_get_summary({}))
        self.state.persist()
        return replies

    def on_set_answer(self, msg) -> list[str]:
        session = self._require_session()
        q = self.state.current_question
        if q is None:
            return [_err("NO_QUESTION", "no question open")]
        raw = msg["answer"]
        answer = None if raw in (None, "UNKNOWN") else Answer(raw)
        sess.set_manual_answer(session, q, int(msg["ordinal"]), answer)
        self.state.persist()
        return [json.dumps({"type": "answer_set", "ordinal": int(msg["ordinal"]),
                            "answer": raw if raw is not None else "UNKNOWN"})]

    def on_set_presence(self, msg) -> list[str]:
        session = self._require_session()
        sess.set_presence(session, int(msg["ordinal"]), bool(msg["present"]))
        self.state.persist()
        return [json.dumps({"type": "presence_set", "ordinal": int(msg["ordinal"]),
                            "present": bool(msg["present"])})]

    def on_get_summary(self, msg) -> list[str]:
        session = self._require_session()
        q = self.state.current_question
        if q is None:
            return [_err("NO_QUESTION", "no question open")]
        chart = sess.summarize(session, q)
        return [json.dumps({
            "type": "summary",
            "question_number": q.number,
            "tag": q.tag,
            "counts": chart.counts,
            "total": chart.total,
        })]

    def on_export_log(self, msg) -> list[str]:
        session = self._require_session()
        return [json.dumps({"type": "log", "lines": sess.export_log(session)})]


def _decode_image(payload: bytes) -> np.ndarray:
    from PIL import Image

    img = Image.open(io.BytesIO(payload))
    if img.mode == "L":
        return np.asarray(img, dtype=np.uint8)
    return imaging.to_grayscale(np.asarray(img.convert("RGB"), dtype=np.uint8))


def serve(cfg: ServiceConfig, clock=sess.utc_now, ready=None):
    """Run the websocket service until interrupted.

    `ready` (if given) is a threading.Event set once the socket is bound;
    the bound port is stored on the event as `.port` (handy for tests and
    for port 0).
    """
    from websockets.sync.server import serve as ws_serve

    state = ServiceState(cfg, clock=clock)
    busy = threading.Semaphore(1)

    def handler(conn):
        if not busy.acquire(blocking=False):
            conn.send(_err("BUSY", "another operator is connected"))
            conn.close()
            return
        try:
            op = Operator(state)
            for raw in conn:
                with state.lock:
                    for reply in op.handle(raw):
                        conn.send(reply)
        finally:
            with state.lock:
                state.take = None  # takes in progress die with the connection
            busy.release()

    # transport limit sits above the application limit so oversized frames
    # get an error reply instead of a dropped connection
    with ws_serve(handler, cfg.host, cfg.port,
                  max_size=cfg.max_frame_bytes + 1024 * 1024) as server:
        port = server.socket.getsockname()[1]
        logger.info("listening on %s:%d", cfg.host, port)
        if ready is not None:
            ready.port = port
            ready.set()
        server.serve_forever()
