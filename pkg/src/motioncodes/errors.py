"""Exception types shared across the package.

Everything raised for bad input derives from MotionCodeError so callers
(and the command line front end) can catch one base class.
"""


class MotionCodeError(Exception):
    """Base class for all validation and parse errors in this package."""


# code strings and bit patterns

class MalformedSyntaxError(MotionCodeError):
    """Code text does not match the 3-1-2-2-1 binary grammar."""


class InvalidInteractionError(MotionCodeError):
    """Interaction bits set engagement or duration without the contact flag."""


class InvalidDoFError(MotionCodeError):
    """A degree-of-freedom group is not one of 00, 01, 11."""


class ClassOutOfRangeError(MotionCodeError):
    """A component class index falls outside its component's range."""


class InconsistentAnswersError(MotionCodeError):
    """Decision-tree answers violate the contact dependency rule."""


# codebook files

class CodebookParseError(MotionCodeError):
    """Codebook JSON is malformed or holds an unparseable code string."""


class DuplicateCodeError(MotionCodeError):
    """Two codebook entries claim the same code."""


class EmptyEntryError(MotionCodeError):
    """A codebook entry has no verbs, or a verb label is blank."""


# datasets, embeddings and the predictor

class DatasetParseError(MotionCodeError):
    """A dataset line is not valid JSON or misses a required field."""


class DimensionMismatchError(MotionCodeError):
    """Vector lengths disagree with each other or with the model config."""


class EmptyBatchError(MotionCodeError):
    """An operation that needs samples received none."""


class EmptyInputError(MotionCodeError):
    """An evaluation received no prediction pairs."""


class UnlabeledRecordError(MotionCodeError):
    """Training or evaluation hit a record without a code label."""


class VocabularyTooSmallError(MotionCodeError):
    """Noun noise injection needs at least two distinct vocabulary tokens."""


class DimensionTooSmallError(MotionCodeError):
    """Synthetic generation needs room for one direction per component class."""


# interactive wizard

class InvalidAnswerError(MotionCodeError):
    """A scripted wizard answer is not an accepted token."""
