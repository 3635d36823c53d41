"""Exception taxonomy for the tsokey package.

Every error raised on a user-facing path derives from TsokeyError.  The CLI
maps ordinary input problems (bad tree, bad element, bad syntax) to exit code
1 and internal invariant failures (counter underflow and friends, which would
mean validation let a bad tree through) to exit code 2.
"""

from __future__ import annotations


class TsokeyError(Exception):
    """Base class for all package errors."""


# ---------------------------------------------------------------------------
# Order model / validation


class ValidationError(TsokeyError):
    """An order tree violates a structural invariant."""


class MalformedNode(ValidationError):
    """A node has fields that make no sense (bad bounds, bad collation, ...).

    Carries the path of the offending node, e.g. "$.period[0].cases[2]".
    """

    def __init__(self, path: str, reason: str):
        super().__init__(f"{path}: {reason}")
        self.path = path
        self.reason = reason


class OrderTooDeep(ValidationError):
    """Nesting exceeds what the padding counters / depth nibble can express."""


class PeriodMissing(ValidationError):
    """An unbounded sequence node has no period to draw item orders from."""


class AntiNotUniform(ValidationError):
    """An anti* node is not of the uniform bounded shape they require."""


class NextNotFixedLength(ValidationError):
    """A next node does not have max_len == min_len + 1."""


class RankOutOfRange(TsokeyError):
    """item_order_at was asked for a rank the node cannot supply."""


# ---------------------------------------------------------------------------
# Elements


class ElementError(TsokeyError):
    """Base class for element-vs-tree mismatches."""


class ElementMismatch(ElementError):
    """An element value does not conform to the order tree (encoder side)."""


class IncompatibleElements(ElementError):
    """compare() was handed values that do not fit the node being compared."""


class NaNRejected(ElementError):
    """A float NaN was seen and the nan_high policy is not enabled."""


class DomainError(ElementError):
    """A numeric value falls outside the leaf's representable domain."""


class ZeroDenominator(ElementError):
    """A rational with denominator zero."""


# ---------------------------------------------------------------------------
# Encoding


class EncodingError(TsokeyError):
    """Base class for key-construction failures."""


class CounterUnderflow(EncodingError):
    """A lex padding nibble would drop below zero (internal invariant)."""


class CounterOverflow(EncodingError):
    """A contrelex padding nibble would exceed fifteen (internal invariant)."""


class DepthOverflow(EncodingError):
    """An empty-sequence marker would need a depth nibble above fourteen."""


class CountTooLarge(EncodingError):
    """A sequence count or continued-fraction term at or above 2**64."""


class PackedModeUnavailable(EncodingError):
    """Packed keys were requested for a tree that is not fixed-length."""


class PrefixAnomaly(EncodingError):
    """One key is a strict prefix of another (internal invariant, debug only)."""


# ---------------------------------------------------------------------------
# Sorting


class MixedCellKinds(TsokeyError):
    """sort_cells was given short and long cells in the same array."""


# ---------------------------------------------------------------------------
# Order definition language


class SourceSpan:
    """Position of a token in a definition file: 1-based line and column."""

    __slots__ = ("line", "column", "offset")

    def __init__(self, line: int, column: int, offset: int):
        self.line = line
        self.column = column
        self.offset = offset

    def __repr__(self) -> str:
        return f"SourceSpan(line={self.line}, column={self.column}, offset={self.offset})"

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SourceSpan):
            return NotImplemented
        return (self.line, self.column, self.offset) == (other.line, other.column, other.offset)

    def __hash__(self) -> int:
        return hash((self.line, self.column, self.offset))


class TsodlSyntaxError(TsokeyError):
    """A .tsodl file failed to tokenize or parse.

    Named to avoid shadowing the Python builtin.  `span` points inside the
    offending token; `expected` and `found` describe the mismatch.
    """

    def __init__(self, span: SourceSpan, expected: str, found: str):
        super().__init__(f"{span}: expected {expected}, found {found}")
        self.span = span
        self.expected = expected
        self.found = found
