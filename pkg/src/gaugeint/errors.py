"""Exception hierarchy.

Every library error carries a stable ``code`` string; the CLI maps these to
exit status 2 and echoes the code in its error document.
"""

from __future__ import annotations


class GaugeError(Exception):
    code = "gauge_error"


class EmptyPartitionError(GaugeError):
    code = "empty_partition"


class MalformedPartitionError(GaugeError):
    code = "malformed_partition"


class DepthCapError(GaugeError):
    code = "depth_cap"


class UndefinedValueError(GaugeError):
    code = "undefined_value"


class DomainError(GaugeError):
    code = "domain"


class UnverifiedCoverError(GaugeError):
    code = "unverified_cover"


class BoundsError(GaugeError):
    code = "bounds"


class EffectivityError(GaugeError):
    code = "effectivity"


class UnknownNameError(GaugeError):
    code = "unknown_name"


class PreconditionError(GaugeError):
    code = "precondition"


class ParseError(ValueError):
    """Syntax error in an expression, with the byte offset of the failure."""

    code = "parse"

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset
