"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class FoliationError(Exception):
    """Base class for all refusals raised by the kernel."""


class InvalidAssembly(FoliationError):
    def __init__(self, report):
        self.report = tuple(report)
        super().__init__("; ".join(str(v) for v in self.report[:5]))


class NotClosed(InvalidAssembly):
    pass


class UnsupportedAmbient(FoliationError):
    pass


class InvalidSite(FoliationError):
    pass


class InvalidLevel(FoliationError):
    pass


class NothingToSplit(FoliationError):
    pass


class OrientationMismatch(FoliationError):
    pass


class DuplicateId(FoliationError):
    pass


class NotATrivialPair(FoliationError):
    pass


class CannotComplete(FoliationError):
    pass


class NotNormalized(FoliationError):
    pass


class CannotExpand(FoliationError):
    pass


class TrichotomyViolation(FoliationError):
    """An expansion step escaped the three admissible spot-count outcomes."""


class MultiSingularLeaf(FoliationError):
    pass


class TheoremViolation(FoliationError):
    """Classification found a non-simply-connected leaf but no component.

    Never expected on well-formed input; property tests treat it as a bug.
    """


class InvalidSpec(FoliationError):
    pass


class ParseError(FoliationError):
    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")
