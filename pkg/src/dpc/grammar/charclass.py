"""Character classes over Unicode codepoints."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

MAX_CODEPOINT = 0x10FFFF

# escapes accepted inside [...]; the printer emits the same set
_ESCAPES = {" ": " ", "t": "\t", "n": "\n", "r": "\r", "\\": "\\", "]": "]", "-": "-", "[": "["}
_PRINT_ESCAPES = {" ": "\\ ", "\t": "\\t", "\n": "\\n", "\r": "\\r", "\\": "\\\\", "]": "\\]", "-": "\\-", "[": "\\["}


def _normalize(ranges: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    out: list[list[int]] = []
    for lo, hi in sorted(ranges):
        if lo > hi:
            raise ValueError(f"empty range {lo}-{hi}")
        if out and lo <= out[-1][1] + 1:
            out[-1][1] = max(out[-1][1], hi)
        else:
            out.append([lo, hi])
    return tuple((lo, hi) for lo, hi in out)


@dataclass(frozen=True, order=True)
class CharClass:
    """A set of codepoints stored as sorted, disjoint, non-adjacent inclusive ranges."""

    ranges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "ranges", _normalize(self.ranges))

    @classmethod
    def of(cls, chars: str) -> CharClass:
        return cls(tuple((ord(c), ord(c)) for c in chars))

    @classmethod
    def single(cls, cp: int) -> CharClass:
        return cls(((cp, cp),))

    def __contains__(self, cp: int) -> bool:
        for lo, hi in self.ranges:
            if cp < lo:
                return False
            if cp <= hi:
                return True
        return False

    def __bool__(self) -> bool:
        return bool(self.ranges)

    def union(self, other: CharClass) -> CharClass:
        return CharClass(self.ranges + other.ranges)

    def __str__(self) -> str:
        parts = []
        for lo, hi in self.ranges:
            if lo == hi:
                parts.append(_char(lo))
            elif hi == lo + 1:
                parts.append(_char(lo) + _char(hi))
            else:
                parts.append(f"{_char(lo)}-{_char(hi)}")
        return "[" + "".join(parts) + "]"


def _char(cp: int) -> str:
    c = chr(cp)
    return _PRINT_ESCAPES.get(c, c)


def parse_charclass(text: str, start: int = 0) -> tuple[CharClass, int]:
    """Parse ``[...]`` beginning at ``text[start]``; return the class and the index after ``]``."""
    if text[start] != "[":
        raise ValueError("character class must start with '['")
    i = start + 1
    chars: list[int] = []
    ranges: list[tuple[int, int]] = []
    pending_dash = False
    while True:
        if i >= len(text):
            raise ValueError("unterminated character class")
        c = text[i]
        if c == "]":
            break
        if c == "\\":
            if i + 1 >= len(text) or text[i + 1] not in _ESCAPES:
                raise ValueError(f"bad escape in character class at offset {i}")
            cp = ord(_ESCAPES[text[i + 1]])
            i += 2
        elif c == "-" and chars and not pending_dash:
            pending_dash = True
            i += 1
            continue
        else:
            cp = ord(c)
            i += 1
        if pending_dash:
            lo = chars.pop()
            if lo > cp:
                raise ValueError(f"inverted range in character class at offset {i}")
            ranges.append((lo, cp))
            pending_dash = False
        else:
            chars.append(cp)
    if pending_dash:
        chars.append(ord("-"))
    ranges.extend((cp, cp) for cp in chars)
    return CharClass(tuple(ranges)), i + 1


def partition(classes: Iterable[CharClass]) -> list[int]:
    """Split the codepoint space into atoms on which every class is constant.

    Returns the sorted list of atom start points; atom ``k`` covers
    ``[starts[k], starts[k+1] - 1]`` (the last one runs to MAX_CODEPOINT).
    """
    cuts = {0}
    for cc in classes:
        for lo, hi in cc.ranges:
            cuts.add(lo)
            if hi < MAX_CODEPOINT:
                cuts.add(hi + 1)
    return sorted(cuts)
