"""Parsing of captured system-call trace text.

A trace is line oriented.  A line is a call line when it starts (after optional
whitespace) with ``Nt<word>(``; every other line (process headers, DLL loads,
``...`` elisions, blank lines) is metadata and only counted.  Argument lists
are split on top-level commas, elided ``...`` arguments are dropped and
anything after the closing parenthesis (return status) is ignored.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .errors import EmptyTrace, MalformedLine, ParseError

_CALL_START = re.compile(r"^\s*(Nt\w+)\(")
_NAME = re.compile(r"Nt[A-Za-z0-9]+")
_OPEN = {"(": ")", "[": "]", "{": "}"}
_CLOSE = {v: k for k, v in _OPEN.items()}
ELLIPSIS = "..."


@dataclass(frozen=True)
class SyscallEvent:
    index: int
    name: str
    args: tuple[str, ...] = ()


@dataclass(frozen=True)
class CallSequence:
    sample_id: str
    events: tuple[SyscallEvent, ...]
    skipped_lines: int = 0

    def __len__(self):
        return len(self.events)

    @property
    def names(self) -> list[str]:
        return [e.name for e in self.events]

    @classmethod
    def from_names(cls, names: Iterable[str], sample_id: str = "synthetic") -> "CallSequence":
        events = tuple(SyscallEvent(i, n) for i, n in enumerate(names))
        return cls(sample_id, events, 0)


def _split_arguments(body: str) -> list[str] | None:
    """Split ``body`` (text right after the opening parenthesis) into arguments.

    Returns None when the parentheses never balance.
    """
    stack = ["("]
    args = []
    current = []
    in_quote = False
    for ch in body:
        if in_quote:
            current.append(ch)
            if ch == '"':
                in_quote = False
            continue
        if ch == '"':
            in_quote = True
            current.append(ch)
        elif ch in _OPEN:
            stack.append(ch)
            current.append(ch)
        elif ch in _CLOSE:
            if stack[-1] != _CLOSE[ch]:
                return None
            stack.pop()
            if not stack:
                args.append("".join(current))
                break
            current.append(ch)
        elif ch == "," and len(stack) == 1:
            args.append("".join(current))
            current = []
        else:
            current.append(ch)
    if stack:
        return None
    out = []
    for a in args:
        a = a.strip()
        if a and a != ELLIPSIS:
            out.append(a)
    return out


def parse_line(line: str) -> tuple[str, list[str]] | None:
    """Parse one line.

    Returns ``(name, args)`` for a call line, None for a metadata line, and
    raises :class:`MalformedLine` (with ``lineno=0``) for a line that looks
    like a call but cannot be parsed.
    """
    m = _CALL_START.match(line)
    if m is None:
        return None
    name = m.group(1)
    if not _NAME.fullmatch(name):
        raise MalformedLine(0, line, "invalid system call name")
    args = _split_arguments(line[m.end():])
    if args is None:
        raise MalformedLine(0, line, "unbalanced argument list")
    return name, args


def parse_trace(text, sample_id: str = "trace", strict: bool = False) -> CallSequence:
    """Parse trace text into a :class:`CallSequence`.

    Parameters
    ----------
    text : str, bytes or iterable of lines
        Raw trace.  Bytes are decoded as UTF-8 with replacement, so arbitrary
        input never raises anything but :class:`EmptyTrace` in lenient mode.
    sample_id : str
    strict : bool
        Raise :class:`MalformedLine` instead of skipping unparseable call lines.
    """
    if isinstance(text, (bytes, bytearray)):
        text = bytes(text).decode("utf-8", errors="replace")
    if isinstance(text, str):
        lines = text.lstrip("﻿").splitlines()
    else:
        lines = [l.rstrip("\r\n") for l in text]

    events = []
    skipped = 0
    for lineno, line in enumerate(lines, start=1):
        try:
            parsed = parse_line(line)
        except MalformedLine as exc:
            if strict:
                raise MalformedLine(lineno, line, exc.reason) from None
            skipped += 1
            continue
        if parsed is None:
            skipped += 1
            continue
        name, args = parsed
        events.append(SyscallEvent(len(events), name, tuple(args)))
    if not events:
        raise EmptyTrace(f"no system call lines in trace {sample_id!r}")
    return CallSequence(sample_id, tuple(events), skipped)


def read_trace(path, sample_id: str | None = None, strict: bool = False) -> CallSequence:
    path = Path(path)
    if sample_id is None:
        sample_id = path.stem
    return parse_trace(path.read_bytes(), sample_id, strict=strict)


def format_trace(seq: CallSequence) -> str:
    """Render a sequence back into trace text that :func:`parse_trace` accepts."""
    return "".join(f"{e.name}({', '.join(e.args)})\n" for e in seq.events)


# Tab separated canonical form: "<index>\t<name>\t<arg>;<arg>..."
_TSV_ESCAPES = {"\\": "\\\\", "\t": "\\t", "\n": "\\n", "\r": "\\r", ";": "\\;"}
_TSV_UNESCAPES = {"\\": "\\", "t": "\t", "n": "\n", "r": "\r", ";": ";"}


def _escape(s: str) -> str:
    return "".join(_TSV_ESCAPES.get(c, c) for c in s)


def _split_escaped(field_text: str) -> list[str]:
    parts, cur, i = [], [], 0
    while i < len(field_text):
        c = field_text[i]
        if c == "\\" and i + 1 < len(field_text):
            cur.append(_TSV_UNESCAPES.get(field_text[i + 1], field_text[i + 1]))
            i += 2
            continue
        if c == ";":
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(c)
        i += 1
    parts.append("".join(cur))
    return parts


def to_tsv(seq: CallSequence) -> str:
    return "".join(
        f"{e.index}\t{e.name}\t{';'.join(_escape(a) for a in e.args)}\n" for e in seq.events
    )


def from_tsv(text: str, sample_id: str = "trace") -> CallSequence:
    events = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line:
            continue
        cols = line.split("\t")
        if len(cols) != 3:
            raise ParseError(f"line {lineno}: expected 3 tab separated columns")
        idx, name, argtext = cols
        try:
            idx = int(idx)
        except ValueError:
            raise ParseError(f"line {lineno}: bad index {idx!r}") from None
        if events and idx <= events[-1].index:
            raise ParseError(f"line {lineno}: index not increasing")
        if not _NAME.fullmatch(name):
            raise ParseError(f"line {lineno}: bad name {name!r}")
        args = tuple(_split_escaped(argtext)) if argtext else ()
        events.append(SyscallEvent(idx, name, args))
    if not events:
        raise EmptyTrace("empty sequence file")
    return CallSequence(sample_id, tuple(events), 0)


def to_json(seq: CallSequence) -> str:
    doc = {
        "sample_id": seq.sample_id,
        "events": [{"name": e.name, "args": list(e.args)} for e in seq.events],
        "skipped_lines": seq.skipped_lines,
    }
    return json.dumps(doc, indent=1)


def from_json(text: str) -> CallSequence:
    try:
        doc = json.loads(text)
        events = tuple(
            SyscallEvent(i, ev["name"], tuple(ev.get("args", ()))) for i, ev in enumerate(doc["events"])
        )
        return CallSequence(doc["sample_id"], events, int(doc.get("skipped_lines", 0)))
    except (ValueError, KeyError, TypeError) as exc:
        raise ParseError(f"bad sequence JSON: {exc}") from exc
