import pytest

from classcode import session as sess
from classcode.codec import Answer, code_for_ordinal
from classcode.errors import (
    BadOrdinal,
    BadQuestionNumber,
    InvalidRoster,
    QuestionClosed,
)
from classcode.temporal import AcceptedDetection


def accepted(ordinal: int, answer: Answer) -> AcceptedDetection:
    return AcceptedDetection(
        id=code_for_ordinal(ordinal), answer=answer, sightings=10,
        longest_run=10, last_center=(50.0, 60.0), last_seen_frame=9)


@pytest.fixture
def session(clock):
    return sess.start_session("physics-101", [(1, "Ada"), (2, "Grace"), (3, "Edsger"),
                                              (4, None)], clock=clock)


class TestStartSession:
    def test_empty_session_has_no_questions(self, session):
        assert session.questions == {}
        assert sess.start_question(session).number == 1

    def test_out_of_range_ordinal_rejected(self, clock):
        with pytest.raises(InvalidRoster):
            sess.start_session("c", [(100, "X")], clock=clock)

    def test_duplicate_ordinal_rejected(self, clock):
        with pytest.raises(InvalidRoster):
            sess.start_session("c", [(5, "X"), (5, "Y")], clock=clock)

    def test_empty_roster_is_anonymous_mode(self, clock):
        s = sess.start_session("c", [], clock=clock)
        assert s.anonymous
        q = sess.start_question(s)
        sess.apply_take(s, q, [accepted(9, Answer.B)])
        chart = sess.summarize(s, q)
        assert chart.counts["B"] == 1 and chart.total == 1


class TestQuestionNumbers:
    def test_auto_increment(self, session):
        assert sess.start_question(session).number == 1
        assert sess.start_question(session).number == 2

    def test_manual_override_then_continue(self, session):
        sess.start_question(session, number=10)
        assert sess.start_question(session).number == 11

    def test_existing_number_rejected(self, session):
        sess.start_question(session, number=2)
        with pytest.raises(BadQuestionNumber):
            sess.start_question(session, number=2)

    def test_nonpositive_rejected(self, session):
        with pytest.raises(BadQuestionNumber):
            sess.start_question(session, number=0)


class TestApplyTake:
    def test_last_take_wins(self, session):
        q = sess.start_question(session)
        sess.apply_take(session, q, [accepted(1, Answer.A)])
        sess.apply_take(session, q, [accepted(1, Answer.B)])
        assert q.answers[1].answer is Answer.B
        assert q.answers[1].source == "scan"

    def test_disjoint_union(self, session):
        q = sess.start_question(session)
        sess.apply_take(session, q, [accepted(1, Answer.A)])
        sess.apply_take(session, q, [accepted(2, Answer.C)])
        assert q.answers[1].answer is Answer.A
        assert q.answers[2].answer is Answer.C

    def test_scan_overrides_manual(self, session):
        q = sess.start_question(session)
        sess.set_manual_answer(session, q, 1, Answer.D)
        sess.apply_take(session, q, [accepted(1, Answer.A)])
        assert q.answers[1].answer is Answer.A
        assert q.answers[1].source == "scan"

    def test_closed_question_rejected(self, session):
        q = sess.start_question(session)
        sess.close_question(session, q)
        with pytest.raises(QuestionClosed):
            sess.apply_take(session, q, [accepted(1, Answer.A)])

    def test_unrostered_detection_flagged(self, session):
        q = sess.start_question(session)
        sess.apply_take(session, q, [accepted(77, Answer.B)])
        assert q.answers[77].unrostered is True
        # unrostered answers do not leak into the roster summary
        assert sess.summarize(session, q).counts["B"] == 0

    def test_idempotent_with_fixed_clock(self, session):
        q = sess.start_question(session)
        fixed = session.clock()
        session.clock = lambda: fixed
        sess.apply_take(session, q, [accepted(1, Answer.A)])
        snap1 = sess.snapshot(session)
        sess.apply_take(session, q, [accepted(1, Answer.A)])
        assert sess.snapshot(session) == snap1


class TestManualAnswer:
    def test_set_on_empty_question(self, session):
        q = sess.start_question(session)
        sess.set_manual_answer(session, q, 3, Answer.C)
        assert q.answers[3].answer is Answer.C
        assert q.answers[3].source == "manual"

    def test_toggle_replaces_record(self, session):
        q = sess.start_question(session)
        sess.apply_take(session, q, [accepted(1, Answer.A)])
        sess.set_manual_answer(session, q, 1, Answer.B)
        assert q.answers[1].answer is Answer.B
        assert q.answers[1].source == "manual"

    def test_bad_ordinal(self, session):
        q = sess.start_question(session)
        with pytest.raises(BadOrdinal):
            sess.set_manual_answer(session, q, 0, Answer.A)

    def test_clear_to_unknown(self, session):
        q = sess.start_question(session)
        sess.apply_take(session, q, [accepted(1, Answer.A)])
        sess.set_manual_answer(session, q, 1, None)
        assert q.answers[1].answer is None
        assert sess.summarize(session, q).counts["UNKNOWN"] == 4


class TestSummarize:
    def test_counts_and_fractions(self, session):
        q = sess.start_question(session)
        sess.apply_take(session, q, [accepted(1, Answer.A), accepted(2, Answer.A),
                                     accepted(3, Answer.B), accepted(4, Answer.C)])
        chart = sess.summarize(session, q)
        assert chart.counts == {"A": 2, "B": 1, "C": 1, "D": 0, "UNKNOWN": 0}
        assert chart.fractions["A"] == 0.5
        assert sum(chart.counts.values()) == len(session.roster)

    def test_empty_question_all_unknown(self, session):
        q = sess.start_question(session)
        chart = sess.summarize(session, q)
        assert chart.counts["UNKNOWN"] == 4
        assert chart.fractions["UNKNOWN"] == 1.0

    def test_half_answered(self, clock):
        s = sess.start_session("c", [(1, "a"), (2, "b")], clock=clock)
        q = sess.start_question(s)
        sess.apply_take(s, q, [accepted(1, Answer.A)])
        chart = sess.summarize(s, q)
        assert chart.fractions["A"] == 0.5
        assert chart.fractions["UNKNOWN"] == 0.5


class TestRollCall:
    def test_any_orientation_marks_present(self, session):
        rc = sess.roll_call_take(session, [accepted(3, Answer.C)])
        assert rc.present == {3}
        assert rc.source[3] == "scan"

    def test_manual_mark_after_empty_take(self, session):
        sess.roll_call_take(session, [])
        rc = sess.set_presence(session, 7, True)
        assert 7 in rc.present
        assert rc.source[7] == "manual"

    def test_unrostered_gets_warning(self, session):
        rc = sess.roll_call_take(session, [accepted(66, Answer.A)])
        assert 66 in rc.unrostered

    def test_manual_unmark(self, session):
        sess.roll_call_take(session, [accepted(1, Answer.A)])
        rc = sess.set_presence(session, 1, False)
        assert 1 not in rc.present


class TestLog:
    def test_empty_session_header_only(self, session):
        lines = sess.export_log(session)
        assert len(lines) == 1
        assert '"type":"session"' in lines[0]

    def test_question_with_two_answers(self, session):
        q = sess.start_question(session)
        sess.apply_take(session, q, [accepted(1, Answer.A), accepted(2, Answer.B)])
        lines = sess.export_log(session)
        # session header + question header + 2 answer records
        assert len(lines) == 4
        kinds = [__import__("json").loads(l)["type"] for l in lines]
        assert kinds == ["session", "question", "answer", "answer"]

    def test_override_keeps_both_events_in_order(self, session):
        q = sess.start_question(session)
        sess.apply_take(session, q, [accepted(1, Answer.A)])
        sess.set_manual_answer(session, q, 1, Answer.B)
        import json

        answers = [json.loads(l) for l in sess.export_log(session)
                   if json.loads(l)["type"] == "answer"]
        assert [a["answer"] for a in answers] == ["A", "B"]
        assert answers[0]["timestamp"] < answers[1]["timestamp"]

    def test_replay_reconstructs_state_exactly(self, session, clock):
        q1 = sess.start_question(session, tag="warmup")
        sess.apply_take(session, q1, [accepted(1, Answer.A), accepted(2, Answer.D)])
        sess.set_manual_answer(session, q1, 2, Answer.C)
        q2 = sess.start_question(session)
        sess.apply_take(session, q2, [accepted(3, Answer.B)])
        sess.roll_call_take(session, [accepted(1, Answer.A)])
        sess.set_presence(session, 4, True)

        replayed = sess.replay_log(sess.export_log(session))
        assert sess.snapshot(replayed) == sess.snapshot(session)
        assert sess.export_log(replayed) == sess.export_log(session)

    def test_summary_csv_shape(self, session):
        q = sess.start_question(session, tag="t1")
        sess.apply_take(session, q, [accepted(1, Answer.A)])
        csv_text = sess.export_summary_csv(session)
        lines = csv_text.strip().split("\n")
        assert lines[0] == "question_number,tag,A,B,C,D,unknown"
        assert lines[1] == "1,t1,1,0,0,0,3"
