import math

import pytest
from hypothesis import given, strategies as st

from classcode import codec
from classcode.errors import BadOrdinal, NotAValidCode


def brute_force_necklaces() -> list[int]:
    """Independent oracle: group all 8192 words by string rotation."""
    reps = set()
    for w in range(1 << 13):
        if bin(w).count("1") != 5:
            continue
        s = format(w, "013b")
        reps.add(min(s[i:] + s[:i] for i in range(13)))
    return sorted(int(s, 2) for s in reps)


def test_enumeration_matches_brute_force():
    expected = brute_force_necklaces()
    got = [c.canonical for c in codec.enumerate_valid_codes()]
    assert got == expected
    assert len(got) == 99


def test_ordinals_are_a_bijection_onto_1_99():
    ids = codec.enumerate_valid_codes()
    assert [c.ordinal for c in ids] == list(range(1, 100))
    assert len({c.canonical for c in ids}) == 99


def test_first_code_is_31():
    # the five lowest bits set is its own minimal rotation
    assert codec.enumerate_valid_codes()[0].canonical == 0b0000000011111


def test_every_code_is_minimal_and_five_ones():
    for c in codec.enumerate_valid_codes():
        assert bin(c.canonical).count("1") == 5
        assert all(c.canonical <= codec.rotate(c.canonical, r) for r in range(13))


def test_rotational_closure_partitions_all_five_ones_words():
    words = set()
    for c in codec.enumerate_valid_codes():
        for r in range(13):
            words.add(codec.rotate(c.canonical, r))
    assert len(words) == 1287  # C(13,5)


def test_canonicalize_examples():
    code, r = codec.canonicalize(codec.rotate(31, 3))
    assert code.canonical == 31 and r == 3
    code, r = codec.canonicalize(0b1111100000000)
    assert code.canonical == 31 and r == 8
    with pytest.raises(NotAValidCode):
        codec.canonicalize(0b0000000001111)


@given(st.integers(min_value=1, max_value=99), st.integers(min_value=0, max_value=12))
def test_canonicalize_inverts_rotation(ordinal, r):
    code = codec.code_for_ordinal(ordinal)
    got, offset = codec.canonicalize(codec.rotate(code.canonical, r))
    assert got == code
    assert offset == r


def test_code_for_ordinal_bounds():
    with pytest.raises(BadOrdinal):
        codec.code_for_ordinal(0)
    with pytest.raises(BadOrdinal):
        codec.code_for_ordinal(100)


def test_orientation_quadrants():
    assert codec.orientation_to_answer(0.0) is codec.Answer.A
    assert codec.orientation_to_answer(math.pi / 2) is codec.Answer.B
    assert codec.orientation_to_answer(math.pi) is codec.Answer.C
    assert codec.orientation_to_answer(3 * math.pi / 2) is codec.Answer.D
    # half-open boundary
    assert codec.orientation_to_answer(math.pi / 4) is codec.Answer.B
    assert codec.orientation_to_answer(-math.pi / 4) is codec.Answer.A
    assert codec.orientation_to_answer(7 * math.pi / 4) is codec.Answer.A


@given(st.floats(min_value=-20.0, max_value=20.0, allow_nan=False))
def test_orientation_period_and_quarter_steps(theta):
    order = "ABCD"
    base = codec.orientation_to_answer(theta)
    assert codec.orientation_to_answer(theta + 2 * math.pi) is base
    stepped = codec.orientation_to_answer(theta + math.pi / 2)
    assert order[(order.index(base.value) + 1) % 4] == stepped.value


@given(st.floats(min_value=-100.0, max_value=100.0, allow_nan=False))
def test_normalize_angle_range(theta):
    a = codec.normalize_angle(theta)
    assert 0.0 <= a < 2 * math.pi
