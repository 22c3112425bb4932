"""Malicious system-call dictionaries, one per malware class.

The three built-in dictionaries (adware, Trojan, worm) list the calls grouped
by functionality.  Custom dictionaries are loaded from JSON::

    {"class": "custom", "entries": [{"group": "Object", "name": "NtClose"}]}
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable

from .errors import EmptyDictionary, ParseError, UnknownClass

BUILTIN_CLASSES = ("adware", "trojan", "worm")

_TABLES = {
    "adware": [
        ("Local procedure call", ["NtAlpcAcceptConnectPort", "NtAlpcConnectPort",
                                  "NtAlpcCreatePort", "NtAlpcSendWaitReceivePort"]),
        ("File & general I/O", ["NtCreateIoCompletion"]),
        ("Object", ["NtClose"]),
        ("Atoms", ["NtFindAtom"]),
        ("Processes & thread", ["NtResumeThread", "NtCreateUserProcess", "NtCreateWorkerFactory"]),
        ("Synchronization", ["NtCreateKeyedEvent", "NtReleaseMutant"]),
        ("Timers & system time", ["NtSetTimer", "NtCreateTimer"]),
    ],
    "trojan": [
        ("Processor & bus", ["NtFlushInstructionCache"]),
        ("Local procedure call", ["NtConnectPort", "NtRequestWaitReplyPort",
                                  "NtAlpcConnectPort", "NtAlpcSendWaitReceivePort"]),
        ("Memory", ["NtMapViewOfSection"]),
        ("File & general I/O", ["NtCreateFile", "NtQueryInformationFile", "NtCreateIoCompletion"]),
        ("Object", ["NtClose"]),
        ("Atoms", ["NtAddAtom"]),
        ("Processes & thread", ["NtCreateThread", "NtResumeThread", "NtCreateProcessEx",
                                "NtQuerySystemInformation", "NtCreateWorkerFactory",
                                "NtQueryInformationProcess"]),
        ("Synchronization", ["NtCreateKeyedEvent", "NtCreateMutant"]),
        ("Timers & system time", ["NtCreateTimer"]),
    ],
    "worm": [
        ("Processor & bus", ["NtFlushInstructionCache"]),
        ("Local procedure call", ["NtAlpcCreateSecurityContext", "NtAlpcSetInformation"]),
        ("Memory", ["NtMapViewOfSection"]),
        ("Registry", ["NtEnumerateKey", "NtEnumerateValueKey"]),
        ("Miscellaneous", ["NtQuerySystemInformation"]),
        ("File & general I/O", ["NtCreateFile", "NtDeviceIoControlFile"]),
        ("Object", ["NtClose"]),
        ("Atoms", ["NtAddAtom"]),
        ("Processes & thread", ["NtCreateThread", "NtResumeThread", "NtCreateProcessEx",
                                "NtQueryInformationProcess"]),
        ("Synchronization", ["NtReleaseMutant"]),
        ("Timers & system time", ["NtSetTimer", "NtQueryPerformanceCounter"]),
    ],
}


class SyscallDictionary:
    """Immutable set of ``(group, name)`` entries with name lookup.

    Names are unique; when the same name is given twice the first group wins.
    Equality ignores entry order.
    """

    __slots__ = ("malware_class", "entries", "_names")

    def __init__(self, malware_class: str, entries: Iterable[tuple[str, str]]):
        seen = {}
        for group, name in entries:
            if name not in seen:
                seen[name] = (group, name)
        if not seen:
            raise EmptyDictionary(f"dictionary {malware_class!r} has no entries")
        object.__setattr__(self, "malware_class", malware_class)
        object.__setattr__(self, "entries", tuple(seen.values()))
        object.__setattr__(self, "_names", frozenset(seen))

    def __setattr__(self, key, value):
        raise AttributeError("SyscallDictionary is immutable")

    def __reduce__(self):
        return (SyscallDictionary, (self.malware_class, self.entries))

    @property
    def names(self) -> frozenset[str]:
        return self._names

    @property
    def groups(self) -> list[str]:
        return list(dict.fromkeys(g for g, _ in self.entries))

    def __contains__(self, name) -> bool:
        return name in self._names

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __eq__(self, other):
        if not isinstance(other, SyscallDictionary):
            return NotImplemented
        return self.malware_class == other.malware_class and set(self.entries) == set(other.entries)

    def __hash__(self):
        return hash((self.malware_class, frozenset(self.entries)))

    def __repr__(self):
        return f"SyscallDictionary({self.malware_class!r}, {len(self)} entries)"

    def to_dict(self) -> dict:
        return {
            "class": self.malware_class,
            "entries": [{"group": g, "name": n} for g, n in self.entries],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_names(cls, names: Iterable[str], malware_class: str = "custom", group: str = "custom"):
        return cls(malware_class, ((group, n) for n in names))


def contains(dictionary: SyscallDictionary, name: str) -> bool:
    """Exact, case-sensitive membership."""
    return name in dictionary


def builtin_dictionary(malware_class: str) -> SyscallDictionary:
    try:
        table = _TABLES[malware_class]
    except (KeyError, TypeError):
        raise UnknownClass(
            f"no built-in dictionary for {malware_class!r}; expected one of {BUILTIN_CLASSES}"
        ) from None
    return SyscallDictionary(malware_class, ((g, n) for g, names in table for n in names))


def parse_dictionary(text: str) -> SyscallDictionary:
    try:
        doc = json.loads(text)
    except ValueError as exc:
        raise ParseError(f"dictionary is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("entries"), list):
        raise ParseError("dictionary JSON must be an object with an 'entries' list")
    entries = []
    for item in doc["entries"]:
        if not isinstance(item, dict) or not isinstance(item.get("name"), str):
            raise ParseError(f"bad dictionary entry: {item!r}")
        entries.append((str(item.get("group", "")), item["name"]))
    return SyscallDictionary(str(doc.get("class", "custom")), entries)


def load_dictionary(path) -> SyscallDictionary:
    return parse_dictionary(Path(path).read_text(encoding="utf-8"))


def resolve_dictionary(spec) -> SyscallDictionary:
    """Accept a dictionary, a built-in class name or a path to a JSON file."""
    if isinstance(spec, SyscallDictionary):
        return spec
    if spec in BUILTIN_CLASSES:
        return builtin_dictionary(spec)
    return load_dictionary(spec)
