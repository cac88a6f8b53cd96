"""Verb to motion-code mappings, with a built-in book of household manipulations."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import IO, Iterable, List, Optional, Tuple, Union

from .errors import (
    CodebookParseError,
    DuplicateCodeError,
    EmptyEntryError,
    MotionCodeError,
)
from .metrics import hamming
from .taxonomy import MotionCode, format_code, parse_code, to_bits

# A trailing parenthesized, comma-free qualifier is a sense note; anything
# else, such as "put/take (in, out)", stays part of the label.
_NOTE_RE = re.compile(r"^(?P<label>.*\S)\s+\((?P<note>[^(),]+)\)$")


@dataclass(frozen=True)
class Verb:
    """A verb label with an optional sense note, e.g. shake (prismatic)."""

    label: str
    note: Optional[str] = None

    def display(self) -> str:
        return f"{self.label} ({self.note})" if self.note else self.label

    @classmethod
    def from_string(cls, text: str) -> "Verb":
        s = " ".join(text.split()).lower()
        match = _NOTE_RE.match(s)
        if match:
            return cls(match.group("label"), match.group("note"))
        return cls(s)


@dataclass(frozen=True)
class CodebookEntry:
    code: MotionCode
    verbs: Tuple[Verb, ...]


class Codebook:
    """Immutable verb lookup over motion codes.

    Codes are unique per book; several verbs may share a code and one verb
    may appear under several codes.
    """

    def __init__(self, entries: Iterable[CodebookEntry]):
        entries = tuple(entries)
        by_code = {}
        for entry in entries:
            key = format_code(entry.code)
            if key in by_code:
                raise DuplicateCodeError(f"code {key} appears in more than one entry")
            if not entry.verbs:
                raise EmptyEntryError(f"entry {key} lists no verbs")
            for verb in entry.verbs:
                if not verb.label.strip():
                    raise EmptyEntryError(f"entry {key} has a blank verb label")
            by_code[key] = entry
        self._entries = entries
        self._by_code = by_code

    @property
    def entries(self) -> Tuple[CodebookEntry, ...]:
        return self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def codes_for(self, verb: str) -> List[Tuple[MotionCode, Optional[str]]]:
        """Codes of every entry listing the label, with each match's sense note.

        Matching is exact on the label, case-insensitively, so "shake"
        finds shake (prismatic) but "shak" finds nothing.
        """
        wanted = " ".join(verb.split()).lower()
        matches = []
        for entry in self._entries:
            for v in entry.verbs:
                if v.label == wanted:
                    matches.append((entry.code, v.note))
                    break
        return matches

    def verbs_for(self, code: MotionCode) -> List[str]:
        """Verb labels of the entry holding the code; empty when absent."""
        entry = self._by_code.get(format_code(code))
        return [v.label for v in entry.verbs] if entry else []

    def nearest_verbs(self, query: MotionCode, k: int) -> List[Tuple[str, MotionCode, int]]:
        """The k verb rows closest to the query by bit-level Hamming distance.

        Entries expand to one row per verb before truncation.  Ties order
        by the code's nine-bit integer value and then the label, so output
        is reproducible.
        """
        if k < 1:
            raise ValueError("k must be at least 1")
        rows = []
        for entry in self._entries:
            distance = hamming(query, entry.code)
            value = int(to_bits(entry.code), 2)
            for verb in entry.verbs:
                rows.append((distance, value, verb.label, entry.code))
        rows.sort(key=lambda row: row[:3])
        return [(label, code, distance) for distance, _, label, code in rows[:k]]


def load_codebook(source: Union[str, bytes, IO]) -> Codebook:
    """Load a book from JSON text, bytes, or a readable stream.

    The format is a top-level array of ``{"code": ..., "verbs": [...]}``
    objects; a trailing parenthesized qualifier in a verb string becomes
    that verb's sense note.
    """
    raw = source.read() if hasattr(source, "read") else source
    if isinstance(raw, bytes):
        try:
            raw = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise CodebookParseError(f"codebook is not valid UTF-8: {exc}") from exc
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise CodebookParseError(f"codebook is not valid JSON: {exc}") from exc
    if not isinstance(data, list):
        raise CodebookParseError("codebook JSON must be a top-level array of entries")
    entries = []
    for i, item in enumerate(data):
        if not isinstance(item, dict):
            raise CodebookParseError(f"entry {i} is not an object")
        if not isinstance(item.get("code"), str):
            raise CodebookParseError(f"entry {i} misses a string \"code\" field")
        verbs = item.get("verbs")
        if not isinstance(verbs, list) or any(not isinstance(v, str) for v in verbs):
            raise CodebookParseError(f"entry {i} needs a \"verbs\" array of strings")
        try:
            code = parse_code(item["code"])
        except MotionCodeError as exc:
            raise CodebookParseError(f"entry {i}: {exc}") from exc
        entries.append(CodebookEntry(code, tuple(Verb.from_string(v) for v in verbs)))
    return Codebook(entries)


def dump_codebook(book: Codebook) -> str:
    """Serialize a book to the JSON format accepted by load_codebook."""
    data = [
        {"code": format_code(entry.code), "verbs": [v.display() for v in entry.verbs]}
        for entry in book.entries
    ]
    return json.dumps(data, indent=2) + "\n"


# Verb assignments for twenty common household manipulations.  Parenthesized
# qualifiers mark distinct senses of a verb; "put/take (in, out)" is one
# compound label.
_BUILTIN = (
    ("000-0-00-01-0", ("pour",)),
    ("000-0-01-00-0", ("sprinkle",)),
    ("100-0-00-01-0", ("rotate",)),
    ("100-0-01-00-1", ("switch", "press", "turn on (button)")),
    ("100-0-11-01-1", ("turn on", "switch (knob)")),
    ("101-0-01-00-0", ("pull", "push", "move", "wipe", "spread")),
    ("101-0-01-01-0", ("turn over", "flip")),
    ("101-0-11-00-0", ("put/take (in, out)", "remove", "pick", "place")),
    ("101-0-11-00-1", ("open", "close (door)")),
    ("101-1-00-01-0", ("shake (revolute)",)),
    ("101-1-01-00-0", ("shake (prismatic)",)),
    ("101-1-11-01-1", ("shake", "wash", "move")),
    ("110-0-11-01-0", ("dry", "shake (drying)")),
    ("111-0-00-00-0", ("squeeze (in hand)",)),
    ("111-0-01-00-0", ("dip", "insert", "pierce", "crack (egg)")),
    ("111-0-01-00-1", ("peel", "break", "cut", "chop", "slice", "scrape")),
    ("111-0-01-01-0", ("squeeze",)),
    ("111-0-01-01-1", ("dry (hands)",)),
    ("111-0-11-00-0", ("fold", "break", "spread", "squeeze")),
    ("111-1-11-00-0", ("mix", "stir", "beat", "whisk")),
)

_default: Optional[Codebook] = None


def default_codebook() -> Codebook:
    """The built-in book of twenty household manipulation entries."""
    global _default
    if _default is None:
        _default = Codebook(
            CodebookEntry(parse_code(code), tuple(Verb.from_string(v) for v in verbs))
            for code, verbs in _BUILTIN
        )
    return _default
