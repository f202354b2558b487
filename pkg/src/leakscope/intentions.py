"""Formal resource-oriented intention expressions.

An intention states that one source line acquires, releases, or validates
reachability of a resource variable.  Provider answers are free text; the
three canonical pattern lines below are the only machine-readable part:

    line <N>: <text> acquires <var> resource
    line <N>: <text> releases <var> resource
    line <N>: <text> validates reachability of <var> resource
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator


class IntentionKind(Enum):
    ACQUIRE = "acquire"
    RELEASE = "release"
    VALIDATE = "validate"

    def __repr__(self) -> str:  # keeps test diffs short
        return self.name


_KIND_ORDER = {IntentionKind.ACQUIRE: 0, IntentionKind.RELEASE: 1, IntentionKind.VALIDATE: 2}


def normalize_var(var: str) -> str:
    """Strip a leading ``this.`` qualifier; intention identity ignores it."""
    if var.startswith("this.") and len(var) > len("this."):
        return var[len("this."):]
    return var


@dataclass(frozen=True)
class Intention:
    """One (kind, variable, line) fact.  ``call_text`` is informational only."""

    kind: IntentionKind
    var: str
    lineno: int
    call_text: str | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "var", normalize_var(self.var))
        if not self.var or any(c.isspace() for c in self.var):
            raise ValueError(f"resource variable must be a non-empty token: {self.var!r}")
        if self.lineno < 1:
            raise ValueError(f"line number must be >= 1: {self.lineno}")

    def canonical_line(self) -> str:
        text = (self.call_text or _DEFAULT_TEXT[self.kind]).replace("\n", " ")
        if self.kind is IntentionKind.VALIDATE:
            return f"line {self.lineno}: {text} validates reachability of {self.var} resource"
        verb = "acquires" if self.kind is IntentionKind.ACQUIRE else "releases"
        return f"line {self.lineno}: {text} {verb} {self.var} resource"


_DEFAULT_TEXT = {
    IntentionKind.ACQUIRE: "acquire()",
    IntentionKind.RELEASE: "close()",
    IntentionKind.VALIDATE: "if-condition",
}


def acquire(var: str, lineno: int, call_text: str | None = None) -> Intention:
    return Intention(IntentionKind.ACQUIRE, var, lineno, call_text)


def release(var: str, lineno: int, call_text: str | None = None) -> Intention:
    return Intention(IntentionKind.RELEASE, var, lineno, call_text)


def validate(var: str, lineno: int, call_text: str | None = None) -> Intention:
    return Intention(IntentionKind.VALIDATE, var, lineno, call_text)


class IntentionSet:
    """Duplicate-free collection of intentions with deterministic iteration.

    Immutable after construction; safe to share between concurrent analyses.
    Iteration order is (lineno, kind, var).
    """

    __slots__ = ("_items",)

    def __init__(self, items: Iterable[Intention] = ()):
        self._items = frozenset(items)

    def __iter__(self) -> Iterator[Intention]:
        return iter(sorted(self._items, key=lambda i: (i.lineno, _KIND_ORDER[i.kind], i.var)))

    def __len__(self) -> int:
        return len(self._items)

    def __contains__(self, item: Intention) -> bool:
        return item in self._items

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntentionSet):
            return NotImplemented
        return self._items == other._items

    def __hash__(self) -> int:
        return hash(self._items)

    def __or__(self, other: "IntentionSet") -> "IntentionSet":
        return IntentionSet(self._items | other._items)

    def __repr__(self) -> str:
        return f"IntentionSet({list(self)!r})"

    def query(self, kind: IntentionKind, var: str, lineno: int) -> bool:
        """Membership test under (kind, var, lineno) identity."""
        return Intention(kind, var, lineno) in self._items

    def of_kind(self, kind: IntentionKind) -> Iterator[Intention]:
        return (i for i in self if i.kind is kind)

    def vars_of_kind(self, kind: IntentionKind) -> list[str]:
        """Distinct variables carrying ``kind``, sorted."""
        return sorted({i.var for i in self._items if i.kind is kind})


def query(intents: IntentionSet, kind: IntentionKind, var: str, lineno: int) -> bool:
    return intents.query(kind, var, lineno)


# Greedy ``(.*)`` pins the verb to its rightmost occurrence, so call text that
# itself contains a verb phrase cannot shift the variable capture.  End anchors
# keep the three patterns mutually exclusive.
_ACQUIRE_RE = re.compile(
    r"^\s*(?:[-*]\s*)?line\s+(\d+)\s*:\s*(.*)\s+(?i:acquires)\s+(\S+)\s+resource\s*\.?\s*$"
)
_RELEASE_RE = re.compile(
    r"^\s*(?:[-*]\s*)?line\s+(\d+)\s*:\s*(.*)\s+(?i:releases)\s+(\S+)\s+resource\s*\.?\s*$"
)
_VALIDATE_RE = re.compile(
    r"^\s*(?:[-*]\s*)?line\s+(\d+)\s*:\s*(.*)\s+(?i:validates\s+reachability\s+of)\s+(\S+)\s+resource\s*\.?\s*$"
)

_PATTERNS = (
    (_VALIDATE_RE, IntentionKind.VALIDATE),
    (_ACQUIRE_RE, IntentionKind.ACQUIRE),
    (_RELEASE_RE, IntentionKind.RELEASE),
)


def parse_answer(answer_text: str) -> IntentionSet:
    """Extract every canonical pattern line from free-form provider output.

    Non-matching lines are ignored; malformed content never raises.  Lines
    whose captured variable fails intention validation are skipped too.
    """
    found = []
    for line in answer_text.splitlines():
        for pattern, kind in _PATTERNS:
            m = pattern.match(line)
            if m is None:
                continue
            lineno, call_text, var = int(m.group(1)), m.group(2), m.group(3)
            try:
                found.append(Intention(kind, var, lineno, call_text))
            except ValueError:
                pass
            break
    return IntentionSet(found)


def render_answer(intents: IntentionSet) -> str:
    """One canonical pattern line per intention, in iteration order.

    Inverse of :func:`parse_answer` up to intention identity:
    ``parse_answer(render_answer(s)) == s``.
    """
    return "\n".join(i.canonical_line() for i in intents)
