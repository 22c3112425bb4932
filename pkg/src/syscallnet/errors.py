"""Exception hierarchy shared by every stage of the pipeline."""


class SyscallNetError(Exception):
    """Base class for all library errors."""


class ParseError(SyscallNetError):
    """Input text or bytes could not be decoded into the expected structure."""


class EmptyTrace(ParseError):
    pass


class MalformedLine(ParseError):
    def __init__(self, lineno, line, reason):
        super().__init__(f"line {lineno}: {reason}: {line!r}")
        self.lineno = lineno
        self.line = line
        self.reason = reason


class UnknownClass(SyscallNetError):
    pass


class EmptyDictionary(SyscallNetError):
    pass


class DomainError(SyscallNetError):
    """A well-formed input on which the requested quantity is undefined."""


class EmptyGraph(DomainError):
    pass


class NoFinitePairs(DomainError):
    pass


class TooSmall(DomainError):
    pass


class DegenerateNormalization(DomainError):
    pass


class InsufficientTail(DomainError):
    pass


class MissingMetric(DomainError):
    pass


class AllSamplesDropped(DomainError):
    pass


class DegenerateClass(DomainError):
    pass


class AllRoundsDiscarded(DomainError):
    pass


class ClassTooSmall(DomainError):
    pass


class NoValidClass(DomainError):
    pass
