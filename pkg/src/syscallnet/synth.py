"""Synthetic call traces with controllable graph statistics.

Each trace is a biased random walk over two disjoint pools of call names.
At every step the walk either repeats the previous call (``self_loop_rate``),
emits a uniformly chosen neighbour-pool call (``noise_rate``), or emits a
dictionary call chosen with probability proportional to
``1 + hub_bias * (times that call was already emitted)``.  Large
``hub_bias`` concentrates traffic on a few hubs and skews the degree
distribution to the right.
"""

from __future__ import annotations

import json
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .trace import CallSequence, SyscallEvent, format_trace


@dataclass(frozen=True)
class FamilyProfile:
    name: str
    dictionary_call_pool: tuple
    neighbor_pool: tuple
    hub_bias: float = 1.0
    sequence_length: tuple = (200, 400)      # inclusive range
    self_loop_rate: float = 0.0
    noise_rate: float = 0.3

    def __post_init__(self):
        object.__setattr__(self, "dictionary_call_pool", tuple(self.dictionary_call_pool))
        object.__setattr__(self, "neighbor_pool", tuple(self.neighbor_pool))
        object.__setattr__(self, "sequence_length", tuple(int(v) for v in self.sequence_length))
        self.validate()

    def validate(self) -> None:
        if not self.dictionary_call_pool:
            raise ValueError(f"profile {self.name!r}: empty dictionary call pool")
        if set(self.dictionary_call_pool) & set(self.neighbor_pool):
            raise ValueError(f"profile {self.name!r}: call pools overlap")
        if len(set(self.dictionary_call_pool)) + len(set(self.neighbor_pool)) < 2:
            raise ValueError(f"profile {self.name!r}: need at least two distinct calls")
        lo, hi = self.sequence_length
        if lo < 10 or hi < lo:
            raise ValueError(f"profile {self.name!r}: sequence_length must satisfy 10 <= min <= max")
        if self.hub_bias < 0:
            raise ValueError(f"profile {self.name!r}: hub_bias must be >= 0")
        for rate in ("self_loop_rate", "noise_rate"):
            if not 0.0 <= getattr(self, rate) <= 1.0:
                raise ValueError(f"profile {self.name!r}: {rate} must lie in [0, 1]")
        if self.noise_rate > 0 and not self.neighbor_pool:
            raise ValueError(f"profile {self.name!r}: noise_rate > 0 needs a neighbour pool")

    def to_dict(self) -> dict:
        d = asdict(self)
        for k in ("dictionary_call_pool", "neighbor_pool", "sequence_length"):
            d[k] = list(d[k])
        return d

    @classmethod
    def from_dict(cls, doc: dict) -> "FamilyProfile":
        return cls(**doc)


def dump_profiles(profiles) -> str:
    """``profiles`` is a list of ``(FamilyProfile, count)``."""
    doc = [{"profile": p.to_dict(), "count": int(c)} for p, c in profiles]
    return json.dumps(doc, indent=2) + "\n"


def load_profiles(text: str) -> list[tuple[FamilyProfile, int]]:
    out = []
    for item in json.loads(text):
        if "profile" in item:
            out.append((FamilyProfile.from_dict(item["profile"]), int(item.get("count", 1))))
        else:
            item = dict(item)
            count = int(item.pop("count", 1))
            out.append((FamilyProfile.from_dict(item), count))
    return out


def generate_trace(profile: FamilyProfile, seed, sample_id: str | None = None) -> CallSequence:
    """Sample one call sequence; identical for identical ``(profile, seed)``.

    The first call is a dictionary call and the second never repeats it, so
    the built graph always has at least one non-loop edge.
    """
    rng = np.random.default_rng(seed)
    pool = profile.dictionary_call_pool
    noise = profile.neighbor_pool
    lo, hi = profile.sequence_length
    length = int(rng.integers(lo, hi + 1))
    targeted = np.zeros(len(pool))

    def pick_dictionary(exclude=None):
        w = 1.0 + profile.hub_bias * targeted
        if exclude is not None:
            w[exclude] = 0.0
        cw = np.cumsum(w)
        i = min(int(np.searchsorted(cw, rng.random() * cw[-1], side="right")), len(pool) - 1)
        targeted[i] += 1
        return pool[i], i

    name, last_i = pick_dictionary()
    names = [name]
    for step in range(1, length):
        if step > 1 and rng.random() < profile.self_loop_rate:
            if last_i is not None:
                targeted[last_i] += 1
            names.append(names[-1])
            continue
        use_noise = bool(noise) and rng.random() < profile.noise_rate
        if step == 1 and not use_noise and len(pool) == 1:
            use_noise = True                   # the only dictionary call is taken
        if use_noise:
            names.append(noise[int(rng.integers(len(noise)))])
            last_i = None
        else:
            name, last_i = pick_dictionary(exclude=last_i if step == 1 else None)
            names.append(name)
    sid = sample_id if sample_id is not None else f"{profile.name}-{seed}"
    return CallSequence(sid, tuple(SyscallEvent(i, n, ()) for i, n in enumerate(names)))


def sample_seed(seed: int, family: str, index: int) -> list[int]:
    """Seed material for one sample; a stable hash of the family name keeps streams apart."""
    return [int(seed), zlib.crc32(family.encode("utf-8")), int(index)]


def _generate_one(args):
    profile, seed, index = args
    sid = f"{profile.name}-{index:04d}"
    return generate_trace(profile, sample_seed(seed, profile.name, index), sid)


def generate_corpus(profiles, seed: int = 0, jobs: int = 1) -> list[tuple[str, CallSequence, str]]:
    """``profiles`` is a list of ``(FamilyProfile, count)``; returns ``(sample_id, sequence, label)``."""
    tasks = []
    for profile, count in profiles:
        if count < 1:
            raise ValueError(f"profile {profile.name!r}: count must be >= 1")
        tasks += [(profile, seed, i) for i in range(count)]
    if len(set(p.name for p, _ in profiles)) != len(profiles):
        raise ValueError("profile names must be unique")
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            seqs = list(pool.map(_generate_one, tasks, chunksize=16))
    else:
        seqs = [_generate_one(t) for t in tasks]
    return [(s.sample_id, s, t[0].name) for s, t in zip(seqs, tasks)]


def write_corpus(corpus, out_dir) -> Path:
    """Write one ``<sample_id>.trace`` per sample plus ``manifest.csv``; returns the manifest path."""
    from .features import write_manifest

    out_dir = Path(out_dir)
    (out_dir / "traces").mkdir(parents=True, exist_ok=True)
    rows = []
    for sid, seq, label in corpus:
        rel = Path("traces") / f"{sid}.trace"
        (out_dir / rel).write_text(format_trace(seq), encoding="utf-8")
        rows.append((sid, rel.as_posix(), label))
    manifest = out_dir / "manifest.csv"
    write_manifest(manifest, rows)
    return manifest


# ------------------------------------------------------------------ reference profiles

_ADWARE = ("NtAlpcAcceptConnectPort", "NtAlpcConnectPort", "NtAlpcCreatePort",
           "NtAlpcSendWaitReceivePort", "NtCreateIoCompletion", "NtClose", "NtFindAtom",
           "NtResumeThread", "NtCreateUserProcess", "NtCreateWorkerFactory",
           "NtCreateKeyedEvent", "NtReleaseMutant", "NtSetTimer", "NtCreateTimer")
_NEIGHBORS = ("NtQueryValueKey", "NtOpenKey", "NtReadFile", "NtWriteFile", "NtQueryAttributesFile",
              "NtOpenFile", "NtAllocateVirtualMemory", "NtFreeVirtualMemory", "NtProtectVirtualMemory",
              "NtQueryVirtualMemory", "NtWaitForSingleObject", "NtSetEvent", "NtOpenProcessToken",
              "NtQueryInformationToken", "NtDuplicateObject", "NtOpenSection", "NtUnmapViewOfSection",
              "NtOpenThreadToken", "NtQueryKey", "NtSetInformationThread")


def default_profiles(count: int = 100) -> list[tuple[FamilyProfile, int]]:
    """Three malware families and a benign profile over the adware dictionary."""
    return [
        (FamilyProfile("FamilyA", _ADWARE, _NEIGHBORS, hub_bias=8.0, sequence_length=(300, 500),
                       self_loop_rate=0.05, noise_rate=0.1), count),
        (FamilyProfile("FamilyB", _ADWARE, _NEIGHBORS, hub_bias=0.3, sequence_length=(300, 500),
                       self_loop_rate=0.05, noise_rate=0.1), count),
        (FamilyProfile("FamilyC", _ADWARE, _NEIGHBORS, hub_bias=2.0, sequence_length=(300, 500),
                       self_loop_rate=0.3, noise_rate=0.5), count),
        (FamilyProfile("benign", _ADWARE[:4], _NEIGHBORS, hub_bias=0.0, sequence_length=(300, 500),
                       self_loop_rate=0.1, noise_rate=0.9), count),
    ]
