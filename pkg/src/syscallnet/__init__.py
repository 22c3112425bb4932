"""Malware analysis with system call graphs.

Pipeline: parse a call trace, keep the transitions that touch a malicious
call dictionary, build a weighted directed graph, measure it with social
network analysis metrics, and classify the resulting feature vectors.
"""

__version__ = "0.1.0"

from .callgraph import SystemCallGraph, build_graph, export_graph, import_graph, refine_sequence
from .dictionary import SyscallDictionary, builtin_dictionary, load_dictionary, resolve_dictionary
from .errors import (
    AllRoundsDiscarded, AllSamplesDropped, ClassTooSmall, DegenerateClass, DegenerateNormalization,
    DomainError, EmptyDictionary, EmptyGraph, EmptyTrace, InsufficientTail, MalformedLine,
    MissingMetric, NoFinitePairs, NoValidClass, ParseError, SyscallNetError, TooSmall, UnknownClass,
)
from .features import FeatureVector, LabeledDataset, build_dataset, featurize, read_manifest
from .metrics import MetricReport, compute_metrics
from .powerlaw import PowerLawFit, degree_sample, fit_power_law, power_law_test
from .synth import FamilyProfile, generate_corpus, generate_trace
from .trace import CallSequence, SyscallEvent, parse_trace, read_trace

__all__ = [
    "AllRoundsDiscarded", "AllSamplesDropped", "ClassTooSmall", "DegenerateClass",
    "DegenerateNormalization", "DomainError", "EmptyDictionary", "EmptyGraph", "EmptyTrace",
    "InsufficientTail", "MalformedLine", "MissingMetric", "NoFinitePairs", "NoValidClass",
    "ParseError", "SyscallNetError", "TooSmall", "UnknownClass",
    "CallSequence", "FamilyProfile", "FeatureVector", "LabeledDataset", "MetricReport",
    "PowerLawFit", "SyscallDictionary", "SyscallEvent", "SystemCallGraph", "build_dataset",
    "build_graph", "builtin_dictionary", "compute_metrics", "degree_sample", "export_graph",
    "featurize", "fit_power_law", "generate_corpus", "generate_trace", "import_graph",
    "load_dictionary", "parse_trace", "power_law_test", "read_manifest", "read_trace",
    "refine_sequence", "resolve_dictionary",
]
