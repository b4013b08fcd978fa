"""Polling workflow engine: roster, questions, merges, summaries, log.

State mutations are event-sourced: every write appends one record to the
session's event list, and the exported answer log is exactly that list in
newline-delimited JSON. Replaying a log reconstructs the session state,
which is also how the service survives restarts.

Merging policy is last-write-wins: a later scan overwrites an earlier scan
or manual entry for the same student, and a manual tap overwrites anything
before it. Every overridden record stays in the log, so the full history is
auditable even though the state machine itself is trivial.

Log record schema (one JSON object per line):
    {"type": "session",  "v": 1, "session_id", "class_id", "roster", "timestamp"}
    {"type": "question", "session_id", "class_id", "question_number", "tag",
     "timestamp"}
    {"type": "answer",   "session_id", "class_id", "question_number", "tag",
     "student_ordinal", "answer": "A".."D"|"UNKNOWN", "source":
     "scan"|"manual", "take_id", "unrostered", "timestamp"}
    {"type": "rollcall", "session_id", "class_id", "student_ordinal",
     "present", "source", "unrostered", "timestamp"}
Timestamps are RFC 3339 UTC.
"""

from __future__ import annotations

import json
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Callable, Iterable

from .codec import CODE_COUNT, Answer
from .errors import BadOrdinal, BadQuestionNumber, InvalidRoster, QuestionClosed
from .temporal import AcceptedDetection

Clock = Callable[[], datetime]


def utc_now() -> datetime:
    return datetime.now(timezone.utc)


def _stamp(dt: datetime) -> str:
    return dt.isoformat().replace("+00:00", "Z")


@dataclass
class AnswerRecord:
    answer: Answer | None           # None means unknown
    source: str                     # "scan" | "manual"
    timestamp: str
    take_id: str | None = None
    unrostered: bool = False


@dataclass
class Question:
    number: int
    tag: str | None = None
    state: str = "open"
    answers: dict[int, AnswerRecord] = field(default_factory=dict)


@dataclass
class RollCall:
    present: set[int] = field(default_factory=set)
    source: dict[int, str] = field(default_factory=dict)
    unrostered: set[int] = field(default_factory=set)


@dataclass
class Session:
    session_id: str
    class_id: str
    roster: dict[int, str | None]
    questions: dict[int, Question] = field(default_factory=dict)
    rollcall: RollCall | None = None
    events: list[dict] = field(default_factory=list)
    clock: Clock = utc_now

    @property
    def anonymous(self) -> bool:
        return not self.roster


def _validate_ordinal(ordinal: int) -> None:
    if not 1 <= int(ordinal) <= CODE_COUNT:
        raise BadOrdinal(f"ordinal {ordinal} outside 1..{CODE_COUNT}")


def start_session(class_id: str, roster: Iterable[tuple[int, str | None]] | None = None,
                  clock: Clock = utc_now, session_id: str | None = None) -> Session:
    """Open a session. An empty roster means anonymous mode."""
    entries = list(roster or [])
    seen: dict[int, str | None] = {}
    for ordinal, name in entries:
        if not 1 <= int(ordinal) <= CODE_COUNT or int(ordinal) in seen:
            raise InvalidRoster(f"bad or duplicate ordinal {ordinal}")
        seen[int(ordinal)] = name
    session = Session(
        session_id=session_id or uuid.uuid4().hex[:12],
        class_id=class_id,
        roster=seen,
        clock=clock,
    )
    session.events.append({
        "type": "session",
        "v": 1,
        "session_id": session.session_id,
        "class_id": class_id,
        "roster": [{"ordinal": o, "name": n} for o, n in sorted(seen.items())],
        "timestamp": _stamp(clock()),
    })
    return session


def start_question(session: Session, tag: str | None = None,
                   number: int | None = None) -> Question:
    """Open the next question; numbers auto-increment unless set manually."""
    if number is None:
        number = max(session.questions, default=0) + 1
    elif number in session.questions:
        raise BadQuestionNumber(f"question {number} already exists")
    elif number <= 0:
        raise BadQuestionNumber(f"question number must be positive, got {number}")
    q = Question(number=number, tag=tag)
    session.questions[number] = q
    session.events.append({
        "type": "question",
        "session_id": session.session_id,
        "class_id": session.class_id,
        "question_number": number,
        "tag": tag,
        "timestamp": _stamp(session.clock()),
    })
    return q


def _write_answer(session: Session, q: Question, ordinal: int,
                  answer: Answer | None, source: str, take_id: str | None) -> None:
    unrostered = not session.anonymous and ordinal not in session.roster
    record = AnswerRecord(
        answer=answer,
        source=source,
        timestamp=_stamp(session.clock()),
        take_id=take_id,
        unrostered=unrostered,
    )
    q.answers[ordinal] = record
    session.events.append({
        "type": "answer",
        "session_id": session.session_id,
        "class_id": session.class_id,
        "question_number": q.number,
        "tag": q.tag,
        "student_ordinal": ordinal,
        "answer": answer.value if answer is not None else "UNKNOWN",
        "source": source,
        "take_id": take_id,
        "unrostered": unrostered,
        "timestamp": record.timestamp,
    })


def apply_take(session: Session, q: Question, accepted: list[AcceptedDetection],
               take_id: str | None = None) -> Question:
    """Merge one take's accepted detections into the question, last write wins."""
    if q.state != "open":
        raise QuestionClosed(f"question {q.number} is closed")
    for det in sorted(accepted, key=lambda d: d.id.ordinal):
        _write_answer(session, q, det.id.ordinal, det.answer, "scan", take_id)
    return q


def set_manual_answer(session: Session, q: Question, ordinal: int,
                      answer: Answer | None) -> Question:
    """Teacher override; answer None clears back to unknown."""
    if q.state != "open":
        raise QuestionClosed(f"question {q.number} is closed")
    _validate_ordinal(ordinal)
    _write_answer(session, q, int(ordinal), answer, "manual", None)
    return q


def close_question(session: Session, q: Question) -> None:
    q.state = "closed"


@dataclass(frozen=True)
class ChartData:
    counts: dict[str, int]
    total: int

    @property
    def fractions(self) -> dict[str, float]:
        if self.total == 0:
            return {k: 0.0 for k in self.counts}
        return {k: v / self.total for k, v in self.counts.items()}


def summarize(session: Session, q: Question) -> ChartData:
    """Per-answer counts over the roster (or observed ids when anonymous)."""
    if session.anonymous:
        population = set(q.answers)
    else:
        population = set(session.roster)
    counts = {"A": 0, "B": 0, "C": 0, "D": 0, "UNKNOWN": 0}
    for ordinal in population:
        record = q.answers.get(ordinal)
        if record is None or record.answer is None or record.unrostered:
            counts["UNKNOWN"] += 1
        else:
            counts[record.answer.value] += 1
    return ChartData(counts=counts, total=len(population))


def roll_call_take(session: Session, accepted: list[AcceptedDetection]) -> RollCall:
    """Mark every accepted id present, whatever its orientation."""
    rc = session.rollcall or RollCall()
    session.rollcall = rc
    for det in sorted(accepted, key=lambda d: d.id.ordinal):
        _mark_presence(session, rc, det.id.ordinal, True, "scan")
    return rc


def set_presence(session: Session, ordinal: int, present: bool) -> RollCall:
    """Manual roll-call correction."""
    _validate_ordinal(ordinal)
    rc = session.rollcall or RollCall()
    session.rollcall = rc
    _mark_presence(session, rc, int(ordinal), present, "manual")
    return rc


def _mark_presence(session: Session, rc: RollCall, ordinal: int,
                   present: bool, source: str) -> None:
    unrostered = not session.anonymous and ordinal not in session.roster
    if present:
        rc.present.add(ordinal)
    else:
        rc.present.discard(ordinal)
    rc.source[ordinal] = source
    if unrostered:
        rc.unrostered.add(ordinal)
    session.events.append({
        "type": "rollcall",
        "session_id": session.session_id,
        "class_id": session.class_id,
        "student_ordinal": ordinal,
        "present": present,
        "source": source,
        "unrostered": unrostered,
        "timestamp": _stamp(session.clock()),
    })


# ---------------------------------------------------------------------------
# log export / replay
# ---------------------------------------------------------------------------

def export_log(session: Session) -> list[str]:
    """The full event history, one JSON record per line."""
    return [json.dumps(e, separators=(",", ":"), sort_keys=True)
            for e in session.events]


def export_summary_csv(session: Session) -> str:
    """CSV: question_number,tag,A,B,C,D,unknown."""
    lines = ["question_number,tag,A,B,C,D,unknown"]
    for number in sorted(session.questions):
        q = session.questions[number]
        chart = summarize(session, q)
        c = chart.counts
        tag = q.tag or ""
        lines.append(f"{number},{tag},{c['A']},{c['B']},{c['C']},{c['D']},{c['UNKNOWN']}")
    return "\n".join(lines) + "\n"


def replay_log(lines: Iterable[str], clock: Clock = utc_now) -> Session:
    """Rebuild a session from an exported log."""
    session: Session | None = None
    for line in lines:
        line = line.strip()
        if not line:
            continue
        e = json.loads(line)
        kind = e["type"]
        if kind == "session":
            session = Session(
                session_id=e["session_id"],
                class_id=e["class_id"],
                roster={int(r["ordinal"]): r["name"] for r in e.get("roster", [])},
                clock=clock,
            )
            session.events.append(e)
        elif session is None:
            raise ValueError("log does not start with a session record")
        elif kind == "question":
            q = Question(number=int(e["question_number"]), tag=e.get("tag"))
            session.questions[q.number] = q
            session.events.append(e)
        elif kind == "answer":
            q = session.questions[int(e["question_number"])]
            raw = e["answer"]
            answer = None if raw == "UNKNOWN" else Answer(raw)
            q.answers[int(e["student_ordinal"])] = AnswerRecord(
                answer=answer,
                source=e["source"],
                timestamp=e["timestamp"],
                take_id=e.get("take_id"),
                unrostered=bool(e.get("unrostered", False)),
            )
            session.events.append(e)
        elif kind == "rollcall":
            rc = session.rollcall or RollCall()
            session.rollcall = rc
            ordinal = int(e["student_ordinal"])
            if e["present"]:
                rc.present.add(ordinal)
            else:
                rc.present.discard(ordinal)
            rc.source[ordinal] = e["source"]
            if e.get("unrostered"):
                rc.unrostered.add(ordinal)
            session.events.append(e)
        else:
            raise ValueError(f"unknown log record type {kind!r}")
    if session is None:
        raise ValueError("empty log")
    return session


def snapshot(session: Session) -> dict:
    """Comparable view of session state (excludes the event history)."""
    return {
        "session_id": session.session_id,
        "class_id": session.class_id,
        "roster": dict(session.roster),
        "questions": {
            n: {
                "tag": q.tag,
                "answers": {
                    o: (r.answer.value if r.answer else "UNKNOWN", r.source, r.timestamp)
                    for o, r in sorted(q.answers.items())
                },
            }
            for n, q in sorted(session.questions.items())
        },
        "rollcall": (None if session.rollcall is None else {
            "present": sorted(session.rollcall.present),
            "source": dict(sorted(session.rollcall.source.items())),
        }),
    }
