"""Nine-bit motion codes for manipulation actions.

A motion code packs five mechanical attributes of a manipulation into nine
bits: interaction type (3 bits), trajectory recurrence (1 bit), prismatic
and revolute degrees of freedom of the active object (2 bits each), and
whether the passive object moves relative to the active one (1 bit).  The
canonical text form groups the bits with hyphens, for example
``101-0-01-01-0`` for flipping something with a turner.

Within the interaction group the first bit is the contact flag; the
engagement bit (soft = 1) and the duration bit (continuous = 1) only carry
meaning under contact, so ``001``, ``010`` and ``011`` are unrepresentable.
Degree-of-freedom groups quantize to none (``00``), one (``01``) or many
(``11``); ``10`` is invalid.  That leaves 180 valid codes out of the 512
nine-bit patterns.
"""

from __future__ import annotations

import itertools
import operator
import re
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Optional, Sequence, Union

from .errors import (
    ClassOutOfRangeError,
    InconsistentAnswersError,
    InvalidDoFError,
    InvalidInteractionError,
    MalformedSyntaxError,
)


class Engagement(Enum):
    """How the objects engage under contact: rigid keeps shapes, soft deforms."""

    RIGID = "0"
    SOFT = "1"


class ContactDuration(Enum):
    """Whether contact persists through the motion or is made and broken."""

    DISCONTINUOUS = "0"
    CONTINUOUS = "1"


class Interaction(Enum):
    """Interaction type: non-contact, or contact qualified by engagement and duration.

    Enum values are the three interaction bits; declaration order is
    ascending bit value, which fixes the class indices 0 through 4.
    """

    NON_CONTACT = "000"
    RIGID_DISCONTINUOUS = "100"
    RIGID_CONTINUOUS = "101"
    SOFT_DISCONTINUOUS = "110"
    SOFT_CONTINUOUS = "111"

    @classmethod
    def contact(cls, engagement: Engagement, duration: ContactDuration) -> "Interaction":
        return cls("1" + engagement.value + duration.value)

    @property
    def is_contact(self) -> bool:
        return self is not Interaction.NON_CONTACT

    @property
    def engagement(self) -> Optional[Engagement]:
        return Engagement(self.value[1]) if self.is_contact else None

    @property
    def duration(self) -> Optional[ContactDuration]:
        return ContactDuration(self.value[2]) if self.is_contact else None


class Recurrence(Enum):
    ACYCLIC = "0"
    CYCLIC = "1"


class Dof(Enum):
    """Degrees of freedom of a trajectory, quantized to none, one or many."""

    NONE = "00"
    ONE = "01"
    MANY = "11"


class PassiveMotion(Enum):
    """Motion of the passive object relative to the active object."""

    STATIONARY = "0"
    MOVING = "1"


COMPONENT_NAMES = ("interaction", "recurrence", "prismatic", "revolute", "passive")
COMPONENT_SIZES = (5, 2, 3, 3, 2)

# Class indices follow ascending bit value inside each component, which is
# also the declaration order of each enum above.
_CLASS_LISTS = (
    tuple(Interaction),
    tuple(Recurrence),
    tuple(Dof),
    tuple(Dof),
    tuple(PassiveMotion),
)

_CODE_RE = re.compile(r"^([01]{3})-([01])-([01]{2})-([01]{2})-([01])$")
_VALID_INTERACTIONS = frozenset(i.value for i in Interaction)
_VALID_DOFS = frozenset(d.value for d in Dof)


class ComponentClasses(NamedTuple):
    """Per-component class indices of a code, in code order."""

    interaction: int
    recurrence: int
    prismatic: int
    revolute: int
    passive: int


@dataclass(frozen=True)
class MotionCode:
    """A structurally valid motion code."""

    interaction: Interaction
    recurrence: Recurrence
    prismatic: Dof
    revolute: Dof
    passive: PassiveMotion

    def __str__(self) -> str:
        return format_code(self)

    def components(self) -> tuple:
        return (self.interaction, self.recurrence, self.prismatic, self.revolute, self.passive)


def format_code(code: MotionCode) -> str:
    """Render the canonical hyphen-grouped form, e.g. ``101-0-01-01-0``."""
    return "-".join(part.value for part in code.components())


def to_bits(code: MotionCode) -> str:
    """Render the nine bits without separators, most significant group first."""
    return "".join(part.value for part in code.components())


def _build(interaction: str, recurrence: str, prismatic: str, revolute: str,
           passive: str, source: str) -> MotionCode:
    if interaction not in _VALID_INTERACTIONS:
        raise InvalidInteractionError(
            f"invalid interaction bits {interaction!r} in {source!r}: engagement and "
            "duration require the contact flag, so the group must be one of "
            "000, 100, 101, 110, 111")
    if prismatic not in _VALID_DOFS:
        raise InvalidDoFError(
            f"invalid prismatic group {prismatic!r} in {source!r}: "
            "degrees of freedom are encoded as 00, 01 or 11")
    if revolute not in _VALID_DOFS:
        raise InvalidDoFError(
            f"invalid revolute group {revolute!r} in {source!r}: "
            "degrees of freedom are encoded as 00, 01 or 11")
    return MotionCode(
        Interaction(interaction),
        Recurrence(recurrence),
        Dof(prismatic),
        Dof(revolute),
        PassiveMotion(passive),
    )


def parse_code(text: str) -> MotionCode:
    """Parse the hyphen-grouped text form.

    Leading and trailing whitespace is ignored; everything else must match
    the 3-1-2-2-1 grammar of binary groups exactly.
    """
    s = text.strip()
    match = _CODE_RE.match(s)
    if match is None:
        raise MalformedSyntaxError(
            f"malformed motion code {text!r}: expected five hyphen-separated "
            "binary groups of widths 3-1-2-2-1")
    return _build(*match.groups(), source=s)


def from_bits(bits: Union[str, Sequence[int]]) -> MotionCode:
    """Build a code from nine binary digits, given as a string or an int sequence."""
    if isinstance(bits, str):
        s = bits.strip()
    else:
        s = "".join(str(operator.index(b)) for b in bits)
    if len(s) != 9 or any(c not in "01" for c in s):
        raise MalformedSyntaxError(f"expected exactly nine binary digits, got {s!r}")
    return _build(s[0:3], s[3], s[4:6], s[6:8], s[8], source=s)


def to_classes(code: MotionCode) -> ComponentClasses:
    """Class index of every component, ascending-bit-value order within each."""
    return ComponentClasses(
        *(classes.index(part) for classes, part in zip(_CLASS_LISTS, code.components()))
    )


def from_classes(classes: Sequence[int]) -> MotionCode:
    """Inverse of to_classes; rejects indices outside each component's range."""
    if len(classes) != 5:
        raise ClassOutOfRangeError(f"expected five class indices, got {len(classes)}")
    parts = []
    for name, options, idx in zip(COMPONENT_NAMES, _CLASS_LISTS, classes):
        idx = operator.index(idx)
        if not 0 <= idx < len(options):
            raise ClassOutOfRangeError(
                f"{name} class {idx} outside the valid range 0..{len(options) - 1}")
        parts.append(options[idx])
    return MotionCode(*parts)


def enumerate_all() -> list[MotionCode]:
    """All 180 valid codes in ascending nine-bit integer order."""
    return [MotionCode(*combo) for combo in itertools.product(*_CLASS_LISTS)]


@dataclass(frozen=True)
class TaxonomyAnswers:
    """Answers collected by walking the attribute hierarchy as a decision tree.

    Engagement and duration must be present exactly when contact is true.
    """

    contact: bool
    recurrence: Recurrence
    prismatic: Dof
    revolute: Dof
    passive_moving: bool
    engagement: Optional[Engagement] = None
    duration: Optional[ContactDuration] = None


def encode_from_answers(answers: TaxonomyAnswers) -> MotionCode:
    """Assemble the unique code matching a complete, consistent answer set."""
    if answers.contact:
        if answers.engagement is None or answers.duration is None:
            raise InconsistentAnswersError(
                "contact motions need both an engagement and a duration answer")
        interaction = Interaction.contact(answers.engagement, answers.duration)
    else:
        if answers.engagement is not None or answers.duration is not None:
            raise InconsistentAnswersError(
                "non-contact motions take no engagement or duration answers")
        interaction = Interaction.NON_CONTACT
    return MotionCode(
        interaction,
        answers.recurrence,
        answers.prismatic,
        answers.revolute,
        PassiveMotion.MOVING if answers.passive_moving else PassiveMotion.STATIONARY,
    )
