import json
import re

import pytest

from syscallnet.dictionary import (
    BUILTIN_CLASSES,
    SyscallDictionary,
    builtin_dictionary,
    contains,
    load_dictionary,
    parse_dictionary,
    resolve_dictionary,
)
from syscallnet.errors import EmptyDictionary, ParseError, UnknownClass


def read_golden(path):
    """Golden table rows: ``group<TAB>name, name, and name``."""
    entries = []
    for line in path.read_text(encoding="utf-8").splitlines():
        group, names = line.split("\t")
        for name in re.split(r",\s*(?:and\s+)?|\s+and\s+", names):
            entries.append((group, name.strip()))
    return entries


@pytest.mark.parametrize("cls", BUILTIN_CLASSES)
def test_builtin_matches_golden_table(cls, data_dir):
    golden = read_golden(data_dir / f"dictionary_{cls}.tsv")
    d = builtin_dictionary(cls)
    assert list(d.entries) == golden
    assert d.groups == list(dict.fromkeys(g for g, _ in golden))


def test_table_sizes():
    assert len(builtin_dictionary("adware")) == 14
    assert len(builtin_dictionary("adware").groups) == 7
    assert len(builtin_dictionary("trojan")) == 20
    assert len(builtin_dictionary("worm")) == 18


def test_examples_from_tables():
    adware = builtin_dictionary("adware")
    assert ("Local procedure call", "NtAlpcConnectPort") in adware.entries
    assert ("Synchronization", "NtReleaseMutant") in adware.entries
    assert ("Registry", "NtEnumerateKey") in builtin_dictionary("worm").entries
    assert contains(adware, "NtClose")
    assert not contains(adware, "ntclose")
    assert not contains(adware, "NtFlushInstructionCache")


def test_unknown_class():
    with pytest.raises(UnknownClass):
        builtin_dictionary("custom")


def test_load_two_entries_and_dedup(tmp_path):
    p = tmp_path / "d.json"
    p.write_text(json.dumps({"class": "custom", "entries": [
        {"group": "Object", "name": "NtClose"}, {"group": "Memory", "name": "NtMapViewOfSection"}]}))
    assert len(load_dictionary(p)) == 2
    p.write_text(json.dumps({"class": "custom", "entries": [
        {"group": "Object", "name": "NtClose"}, {"group": "Other", "name": "NtClose"}]}))
    d = load_dictionary(p)
    assert len(d) == 1 and d.entries == (("Object", "NtClose"),)


@pytest.mark.parametrize("cls", BUILTIN_CLASSES)
def test_serialization_round_trip(cls, tmp_path):
    d = builtin_dictionary(cls)
    p = tmp_path / f"{cls}.json"
    p.write_text(d.to_json())
    assert load_dictionary(p) == d
    assert resolve_dictionary(str(p)) == d
    assert resolve_dictionary(cls) == d


def test_load_errors():
    with pytest.raises(ParseError):
        parse_dictionary("{not json")
    with pytest.raises(ParseError):
        parse_dictionary('{"entries": [{"group": "x"}]}')
    with pytest.raises(EmptyDictionary):
        parse_dictionary('{"class": "c", "entries": []}')


def test_immutable_and_hashable():
    d = builtin_dictionary("worm")
    with pytest.raises(AttributeError):
        d.malware_class = "x"
    assert hash(d) == hash(builtin_dictionary("worm"))
    assert SyscallDictionary.from_names(["NtA", "NtB"]) == SyscallDictionary.from_names(["NtB", "NtA"])
