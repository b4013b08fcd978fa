"""Exception types shared across the package."""


class ClasscodeError(Exception):
    """Base class for all classcode errors."""


class NotAValidCode(ClasscodeError):
    """A 13-bit word is not a rotation of any valid code pattern."""


class BadOrdinal(ClasscodeError):
    """Student ordinal outside 1..99."""


class EmptyImage(ClasscodeError):
    """An image operation received a zero-dimension input."""


class OutOfOrderFrame(ClasscodeError):
    """Frame accumulated into a take out of sequence."""


class QuestionClosed(ClasscodeError):
    """Mutation attempted on a closed question."""


class BadQuestionNumber(ClasscodeError):
    """Manually assigned question number collides with an existing one."""


class InvalidRoster(ClasscodeError):
    """Roster contains duplicate or out-of-range ordinals."""


class PlacementOutOfBounds(ClasscodeError):
    """Scene placement (or defect location) falls outside the image."""
