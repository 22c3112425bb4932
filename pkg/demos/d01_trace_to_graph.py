"""
From a call trace to a system call graph
========================================

Parse an NtTrace-style log, keep the transitions that touch a malicious
call dictionary, and export the weighted directed graph.
"""

from syscallnet import SyscallDictionary, build_graph, parse_trace, refine_sequence
from syscallnet.callgraph import export_graph

TRACE = """\
Process 2160 starting at 00402264
NtCreateFile(FileHandle = A, ..., ObjectAttributes = "Sample.exe")
NtCreateFile(FileHandle = B, ..., ObjectAttributes = "1111.exe")
NtCreateSection(SectionHandle = C, ..., FileHandle = B)
NtMapViewOfSection(SectionHandle = C, ...)
NtWriteFile(FileHandle = B, ...)
NtQueryInformationFile(FileHandle = A, IoStatusBlock = ...)
"""

seq = parse_trace(TRACE, "sample")
print("calls:", seq.names)

# a one-entry dictionary: only transitions into or out of NtCreateSection survive
d = SyscallDictionary.from_names(["NtCreateSection"])
print("kept transitions:", refine_sequence(seq, d))

g = build_graph(seq, d)
print(export_graph(g, "edge-list").decode())
print(export_graph(g, "dot").decode())

# the built-in class dictionaries give larger graphs on real traces
from syscallnet import builtin_dictionary
adware = builtin_dictionary("adware")
print(len(adware), "adware calls, e.g.", sorted(adware.names)[:3])
