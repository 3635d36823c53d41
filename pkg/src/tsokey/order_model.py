"""Labelled trees describing tree structured orders.

A tree's leaves are finite orders or builtin scalar orders; internal nodes
combine the orders of their children into an order on longer values:

* ``Finite(k)``      -- the first k naturals, optionally re-enumerated by a
                        collation table.
* ``Builtin(kind)``  -- machine scalars (uintN / intN / floatN / bool),
                        byte strings, exact rationals.
* ``Inv(child)``     -- the reversed order.
* ``SeqOp(...)``     -- an order on sequences whose items are drawn from a
                        prelude followed by a cyclic period of item orders.
                        Nine operators are supported: next, lex, contrelex,
                        hierar, contrehierar, and the four anti* variants
                        that read items from the right end.
* ``Sum(master, cases)`` -- a tagged union ordered by master rank first.

Elements of an order are plain Python values: ints for Finite ranks and
integer leaves, floats, bools, bytes, Fraction or (num, den) pairs for
rationals, lists/tuples for sequence nodes and (master_rank, sub) pairs for
Sum nodes.  ``check_element`` spells out the exact conformance rules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterator, Union

from .errors import (
    AntiNotUniform,
    ElementMismatch,
    MalformedNode,
    NaNRejected,
    NextNotFixedLength,
    OrderTooDeep,
    PeriodMissing,
    RankOutOfRange,
)

__all__ = [
    "OMEGA",
    "SeqKind",
    "BuiltinKind",
    "Finite",
    "Builtin",
    "Inv",
    "SeqOp",
    "Sum",
    "OrderNode",
    "PathStats",
    "finite",
    "inv",
    "next_",
    "lex",
    "contrelex",
    "hierar",
    "contrehierar",
    "antilex",
    "anticontrelex",
    "antihierar",
    "anticontrehierar",
    "sum_of",
    "UINT8",
    "UINT16",
    "UINT32",
    "UINT64",
    "INT8",
    "INT16",
    "INT32",
    "INT64",
    "FLOAT32",
    "FLOAT64",
    "BOOL",
    "BYTES",
    "RATIONAL",
    "validate",
    "item_order_at",
    "contre_rewrite",
    "push_inv_to_leaves",
    "expand_builtins",
    "check_element",
    "element_length_bounds",
]

# Budgets imposed by the key format: padding nibbles hold 0..15 and the
# empty-sequence marker stores the node depth in one nibble.
MAX_DEPTH = 14
MAX_LEX_PATH = 14  # one decrement is reserved for the leaf itself
MAX_CONTRELEX_PATH = 15

COUNT_CAP = 1 << 64  # sequence counts, ranks and CF terms must stay below this


class _Omega:
    """Sentinel upper bound meaning "any finite length is allowed"."""

    _singleton = None

    def __new__(cls):
        if cls._singleton is None:
            cls._singleton = super().__new__(cls)
        return cls._singleton

    def __repr__(self):
        return "OMEGA"

    # OMEGA compares greater than every integer.
    def __gt__(self, other):
        if isinstance(other, int):
            return True
        return NotImplemented

    def __ge__(self, other):
        if isinstance(other, int):
            return True
        return other is self

    def __lt__(self, other):
        if isinstance(other, int):
            return False
        return NotImplemented

    def __le__(self, other):
        if isinstance(other, int):
            return False
        return other is self


OMEGA = _Omega()


class SeqKind(str, Enum):
    NEXT = "next"
    LEX = "lex"
    CONTRELEX = "contrelex"
    HIERAR = "hierar"
    CONTREHIERAR = "contrehierar"
    ANTILEX = "antilex"
    ANTICONTRELEX = "anticontrelex"
    ANTIHIERAR = "antihierar"
    ANTICONTREHIERAR = "anticontrehierar"

    @property
    def is_anti(self) -> bool:
        return self.value.startswith("anti")

    @property
    def is_hierar_family(self) -> bool:
        """Length beats content for these; keys carry a count header."""
        return self in (
            SeqKind.HIERAR,
            SeqKind.CONTREHIERAR,
            SeqKind.ANTIHIERAR,
            SeqKind.ANTICONTREHIERAR,
        )

    @property
    def shorter_sorts_first(self) -> bool:
        """How a length tie-break resolves when no question exists."""
        return self not in (
            SeqKind.CONTRELEX,
            SeqKind.CONTREHIERAR,
            SeqKind.ANTICONTRELEX,
            SeqKind.ANTICONTREHIERAR,
        )


# Swapping an operator with its partner and inverting every item order
# inverts the whole order; next is its own partner.
_CONTRE_PARTNER = {
    SeqKind.NEXT: SeqKind.NEXT,
    SeqKind.LEX: SeqKind.CONTRELEX,
    SeqKind.CONTRELEX: SeqKind.LEX,
    SeqKind.HIERAR: SeqKind.CONTREHIERAR,
    SeqKind.CONTREHIERAR: SeqKind.HIERAR,
    SeqKind.ANTILEX: SeqKind.ANTICONTRELEX,
    SeqKind.ANTICONTRELEX: SeqKind.ANTILEX,
    SeqKind.ANTIHIERAR: SeqKind.ANTICONTREHIERAR,
    SeqKind.ANTICONTREHIERAR: SeqKind.ANTIHIERAR,
}


class BuiltinKind(str, Enum):
    UINT8 = "uint8"
    UINT16 = "uint16"
    UINT32 = "uint32"
    UINT64 = "uint64"
    INT8 = "int8"
    INT16 = "int16"
    INT32 = "int32"
    INT64 = "int64"
    FLOAT32 = "float32"
    FLOAT64 = "float64"
    BOOL = "bool"
    BYTES = "bytes"
    RATIONAL = "rational"

    @property
    def bit_width(self) -> int | None:
        for prefix in ("uint", "int", "float"):
            if self.value.startswith(prefix):
                return int(self.value[len(prefix):])
        return None

    @property
    def is_unsigned_int(self) -> bool:
        return self.value.startswith("uint")

    @property
    def is_signed_int(self) -> bool:
        return self.value.startswith("int")

    @property
    def is_float(self) -> bool:
        return self.value.startswith("float")


@dataclass(frozen=True, slots=True)
class Finite:
    """The naturals 0 .. cardinality-1.

    ``collation`` optionally re-enumerates the raw values: it maps a raw
    value to its rank, must be a bijection on 0..cardinality-1 and is only
    allowed for cardinality <= 256 (one data byte).
    """

    cardinality: int
    collation: tuple[int, ...] | None = None


@dataclass(frozen=True, slots=True)
class Builtin:
    """A scalar leaf with a dedicated key encoder.

    ``collation`` applies to BYTES leaves only.  ``inverted`` marks a
    descending leaf; push_inv_to_leaves produces it and the encoder consumes
    it by flipping the key bits.
    """

    kind: BuiltinKind
    collation: tuple[int, ...] | None = None
    inverted: bool = False


@dataclass(frozen=True, slots=True)
class Inv:
    """The child order reversed."""

    child: "OrderNode"


@dataclass(frozen=True, slots=True)
class SeqOp:
    """An order on sequences of length L with min_len <= L < max_len.

    The item order at rank r is prelude[r] while r falls inside the prelude,
    then the period repeats cyclically.  max_len may be OMEGA (any finite
    length) provided the period is non-empty.
    """

    kind: SeqKind
    min_len: int
    max_len: Union[int, _Omega]
    prelude: tuple["OrderNode", ...] = ()
    period: tuple["OrderNode", ...] = ()


@dataclass(frozen=True, slots=True)
class Sum:
    """Disjoint union tagged by a Finite master order.

    Elements are (master_rank, sub) pairs; master_rank picks the case the
    sub-value lives in, and the master order decides first.
    """

    master: Finite
    cases: tuple["OrderNode", ...]


OrderNode = Union[Finite, Builtin, Inv, SeqOp, Sum]


@dataclass(frozen=True, slots=True)
class PathStats:
    """What validate() learned while walking a tree.

    depth counts operator nodes (SeqOp / Sum) on the deepest root-leaf path;
    max_lex_path and max_contrelex_path count decrementing respectively
    incrementing operators on any single path, byte-string leaves included
    since they expand to a lex node.  has_variable_length is True as soon as
    any node can produce elements of more than one encoded length.
    """

    depth: int
    max_lex_path: int
    max_contrelex_path: int
    has_variable_length: bool


# ---------------------------------------------------------------------------
# Constructors.  They only normalise argument types; validate() does the
# real checking.


def finite(cardinality: int, collation=None) -> Finite:
    return Finite(cardinality, None if collation is None else tuple(collation))


def inv(child: OrderNode) -> Inv:
    return Inv(child)


def _seq(kind: SeqKind, min_len, max_len, prelude, period) -> SeqOp:
    return SeqOp(kind, min_len, max_len, tuple(prelude), tuple(period))


def next_(min_len, max_len, prelude=(), period=()) -> SeqOp:
    """Fixed-length sequence order (max_len must be min_len + 1)."""
    return _seq(SeqKind.NEXT, min_len, max_len, prelude, period)


def lex(min_len, max_len, prelude=(), period=()) -> SeqOp:
    return _seq(SeqKind.LEX, min_len, max_len, prelude, period)


def contrelex(min_len, max_len, prelude=(), period=()) -> SeqOp:
    return _seq(SeqKind.CONTRELEX, min_len, max_len, prelude, period)


def hierar(min_len, max_len, prelude=(), period=()) -> SeqOp:
    return _seq(SeqKind.HIERAR, min_len, max_len, prelude, period)


def contrehierar(min_len, max_len, prelude=(), period=()) -> SeqOp:
    return _seq(SeqKind.CONTREHIERAR, min_len, max_len, prelude, period)


def antilex(min_len, max_len, prelude=(), period=()) -> SeqOp:
    return _seq(SeqKind.ANTILEX, min_len, max_len, prelude, period)


def anticontrelex(min_len, max_len, prelude=(), period=()) -> SeqOp:
    return _seq(SeqKind.ANTICONTRELEX, min_len, max_len, prelude, period)


def antihierar(min_len, max_len, prelude=(), period=()) -> SeqOp:
    return _seq(SeqKind.ANTIHIERAR, min_len, max_len, prelude, period)


def anticontrehierar(min_len, max_len, prelude=(), period=()) -> SeqOp:
    return _seq(SeqKind.ANTICONTREHIERAR, min_len, max_len, prelude, period)


def sum_of(master: Finite, cases) -> Sum:
    return Sum(master, tuple(cases))


UINT8 = Builtin(BuiltinKind.UINT8)
UINT16 = Builtin(BuiltinKind.UINT16)
UINT32 = Builtin(BuiltinKind.UINT32)
UINT64 = Builtin(BuiltinKind.UINT64)
INT8 = Builtin(BuiltinKind.INT8)
INT16 = Builtin(BuiltinKind.INT16)
INT32 = Builtin(BuiltinKind.INT32)
INT64 = Builtin(BuiltinKind.INT64)
FLOAT32 = Builtin(BuiltinKind.FLOAT32)
FLOAT64 = Builtin(BuiltinKind.FLOAT64)
BOOL = Builtin(BuiltinKind.BOOL)
BYTES = Builtin(BuiltinKind.BYTES)
RATIONAL = Builtin(BuiltinKind.RATIONAL)


# ---------------------------------------------------------------------------
# Validation


def _check_collation(table: tuple[int, ...], size: int, path: str) -> None:
    if len(table) != size:
        raise MalformedNode(path, f"collation has {len(table)} entries, expected {size}")
    seen = [False] * size
    for value in table:
        if not isinstance(value, int) or isinstance(value, bool) or not 0 <= value < size:
            raise MalformedNode(path, f"collation entry {value!r} outside 0..{size - 1}")
        if seen[value]:
            raise MalformedNode(path, f"collation repeats rank {value}")
        seen[value] = True


def _walk_stats(node: OrderNode, path: str) -> tuple[int, int, int, bool]:
    """Return (depth, lex_path, contrelex_path, variable_length) for node.

    Byte-string leaves are charged as one lex level because they expand to
    lex(0, OMEGA, [finite(256)]) before encoding; anything else would let a
    deep tree pass validation and then underflow a padding counter.
    """
    if isinstance(node, Finite):
        if not isinstance(node.cardinality, int) or isinstance(node.cardinality, bool):
            raise MalformedNode(path, "cardinality must be an integer")
        if node.cardinality < 1:
            raise MalformedNode(path, f"cardinality {node.cardinality} < 1")
        if node.cardinality > COUNT_CAP:
            raise MalformedNode(path, f"cardinality {node.cardinality} above 2**64")
        if node.collation is not None:
            if node.cardinality > 256:
                raise MalformedNode(path, "collation requires cardinality <= 256")
            _check_collation(node.collation, node.cardinality, path)
        return 0, 0, 0, False

    if isinstance(node, Builtin):
        if node.collation is not None:
            if node.kind is not BuiltinKind.BYTES:
                raise MalformedNode(path, f"collation not allowed on {node.kind.value}")
            _check_collation(node.collation, 256, path)
        if node.kind is BuiltinKind.BYTES:
            return 1, 1, 0, True
        if node.kind is BuiltinKind.RATIONAL:
            return 0, 0, 0, True
        return 0, 0, 0, False

    if isinstance(node, Inv):
        return _walk_stats(node.child, path + ".child")

    if isinstance(node, Sum):
        if not isinstance(node.master, Finite):
            raise MalformedNode(path, "sum master must be a finite order")
        _walk_stats(node.master, path + ".master")
        if len(node.cases) != node.master.cardinality:
            raise MalformedNode(
                path,
                f"sum has {len(node.cases)} cases for master cardinality {node.master.cardinality}",
            )
        depth = lex_n = contre_n = 0
        varlen = False
        for index, case in enumerate(node.cases):
            d, l, c, v = _walk_stats(case, f"{path}.cases[{index}]")
            depth = max(depth, d)
            lex_n = max(lex_n, l)
            contre_n = max(contre_n, c)
            varlen = varlen or v
        return depth + 1, lex_n, contre_n, varlen

    if isinstance(node, SeqOp):
        if not isinstance(node.min_len, int) or isinstance(node.min_len, bool) or node.min_len < 0:
            raise MalformedNode(path, f"min_len {node.min_len!r} must be a non-negative integer")
        bounded = node.max_len is not OMEGA
        if bounded and (not isinstance(node.max_len, int) or isinstance(node.max_len, bool)):
            raise MalformedNode(path, f"max_len {node.max_len!r} must be an integer or OMEGA")
        if bounded and node.max_len > COUNT_CAP:
            raise MalformedNode(path, f"max_len {node.max_len} above 2**64")
        if not node.max_len > node.min_len:
            raise MalformedNode(path, f"bounds require min_len < max_len, got {node.min_len} and {node.max_len}")
        if not bounded and not node.period:
            raise PeriodMissing(f"{path}: unbounded {node.kind.value} node needs a period")
        if bounded and not node.period and len(node.prelude) < node.max_len - 1:
            raise PeriodMissing(
                f"{path}: {node.kind.value} node with empty period needs at least "
                f"{node.max_len - 1} prelude orders, has {len(node.prelude)}"
            )
        if node.kind is SeqKind.NEXT and node.max_len != node.min_len + 1:
            raise NextNotFixedLength(
                f"{path}: next requires max_len == min_len + 1, got {node.min_len} and {node.max_len}"
            )
        if node.kind.is_anti:
            if not bounded:
                raise AntiNotUniform(f"{path}: {node.kind.value} requires a finite max_len")
            if node.prelude or len(node.period) != 1:
                raise AntiNotUniform(
                    f"{path}: {node.kind.value} requires an empty prelude and a one-order period"
                )

        depth = lex_n = contre_n = 0
        varlen = node.max_len != node.min_len + 1
        for index, child in enumerate(node.prelude):
            d, l, c, v = _walk_stats(child, f"{path}.prelude[{index}]")
            depth = max(depth, d)
            lex_n = max(lex_n, l)
            contre_n = max(contre_n, c)
            varlen = varlen or v
        for index, child in enumerate(node.period):
            d, l, c, v = _walk_stats(child, f"{path}.period[{index}]")
            depth = max(depth, d)
            lex_n = max(lex_n, l)
            contre_n = max(contre_n, c)
            varlen = varlen or v

        if node.kind in (SeqKind.LEX, SeqKind.ANTILEX):
            lex_n += 1
        elif node.kind in (SeqKind.CONTRELEX, SeqKind.ANTICONTRELEX):
            contre_n += 1
        return depth + 1, lex_n, contre_n, varlen

    raise MalformedNode(path, f"not an order node: {type(node).__name__}")


def validate(tree: OrderNode) -> PathStats:
    """Check every structural invariant of a tree and return its PathStats.

    Raises a ValidationError subclass naming the offending node path.  The
    depth and counter budgets come from the key format: padding nibbles hold
    0..15, one lex decrement is reserved for the leaf wrapping itself, and
    empty-sequence markers store the node depth in one nibble.
    """
    depth, lex_n, contre_n, varlen = _walk_stats(tree, "$")
    if depth > MAX_DEPTH:
        raise OrderTooDeep(f"operator nesting {depth} exceeds the maximum of {MAX_DEPTH}")
    if lex_n > MAX_LEX_PATH:
        raise OrderTooDeep(
            f"{lex_n} decrementing operators on one path exceed the budget of "
            f"{MAX_LEX_PATH} (one decrement is reserved for the leaf)"
        )
    if contre_n > MAX_CONTRELEX_PATH:
        raise OrderTooDeep(
            f"{contre_n} incrementing operators on one path exceed the budget of {MAX_CONTRELEX_PATH}"
        )
    return PathStats(depth, lex_n, contre_n, varlen)


# ---------------------------------------------------------------------------
# Tree operations


def item_order_at(node: SeqOp, rank: int) -> OrderNode:
    """The order governing the item at ``rank`` in elements of ``node``."""
    if not isinstance(node, SeqOp):
        raise TypeError(f"item_order_at needs a SeqOp node, got {type(node).__name__}")
    if rank < 0 or not node.max_len > rank:
        raise RankOutOfRange(f"rank {rank} outside 0..{node.max_len}-1")
    if rank < len(node.prelude):
        return node.prelude[rank]
    if not node.period:
        raise RankOutOfRange(f"rank {rank} beyond the prelude and the period is empty")
    return node.period[(rank - len(node.prelude)) % len(node.period)]


def _reversed_finite(node: Finite) -> Finite:
    table = node.collation or tuple(range(node.cardinality))
    top = node.cardinality - 1
    return Finite(node.cardinality, tuple(top - r for r in table))


def contre_rewrite(node: SeqOp | Sum) -> OrderNode:
    """One inversion step: returns a node order-equivalent to Inv(node).

    The operator is swapped with its contre partner and every child order is
    wrapped in Inv (the Finite master of a Sum absorbs its inversion
    directly, staying a Finite).
    """
    if isinstance(node, SeqOp):
        return SeqOp(
            _CONTRE_PARTNER[node.kind],
            node.min_len,
            node.max_len,
            tuple(Inv(child) for child in node.prelude),
            tuple(Inv(child) for child in node.period),
        )
    if isinstance(node, Sum):
        return Sum(_reversed_finite(node.master), tuple(Inv(case) for case in node.cases))
    raise TypeError(f"contre_rewrite needs a SeqOp or Sum node, got {type(node).__name__}")


def _push_inv(node: OrderNode, negate: bool) -> OrderNode:
    if isinstance(node, Inv):
        return _push_inv(node.child, not negate)
    if not negate:
        if isinstance(node, SeqOp):
            return SeqOp(
                node.kind,
                node.min_len,
                node.max_len,
                tuple(_push_inv(c, False) for c in node.prelude),
                tuple(_push_inv(c, False) for c in node.period),
            )
        if isinstance(node, Sum):
            return Sum(node.master, tuple(_push_inv(c, False) for c in node.cases))
        return node
    # Inverted subtree: swap the operator, push into the children.
    if isinstance(node, Finite):
        return _reversed_finite(node)
    if isinstance(node, Builtin):
        return Builtin(node.kind, node.collation, not node.inverted)
    if isinstance(node, SeqOp):
        return SeqOp(
            _CONTRE_PARTNER[node.kind],
            node.min_len,
            node.max_len,
            tuple(_push_inv(c, True) for c in node.prelude),
            tuple(_push_inv(c, True) for c in node.period),
        )
    if isinstance(node, Sum):
        return Sum(_reversed_finite(node.master), tuple(_push_inv(c, True) for c in node.cases))
    raise TypeError(f"not an order node: {type(node).__name__}")


def push_inv_to_leaves(tree: OrderNode) -> OrderNode:
    """Rewrite a tree into an equivalent one without structural Inv nodes.

    Inv over a Finite leaf becomes a reversed enumeration; Inv over a
    Builtin leaf becomes the ``inverted`` flag; Inv over an operator swaps
    the operator with its contre partner and recurses.  The result orders
    elements exactly as the input does.
    """
    return _push_inv(tree, False)


def expand_builtins(tree: OrderNode) -> OrderNode:
    """Lower bytes and bool leaves to their sequence / finite equivalents.

    bytes becomes lex(0, OMEGA, period=[finite(256, collation)]) and bool
    becomes finite(2); the numeric and rational leaves keep dedicated key
    encoders and are left alone.  Idempotent.
    """
    if isinstance(tree, Builtin):
        if tree.kind is BuiltinKind.BYTES:
            expanded: OrderNode = SeqOp(
                SeqKind.LEX, 0, OMEGA, (), (Finite(256, tree.collation),)
            )
        elif tree.kind is BuiltinKind.BOOL:
            expanded = Finite(2)
        else:
            return tree
        return Inv(expanded) if tree.inverted else expanded
    if isinstance(tree, Inv):
        return Inv(expand_builtins(tree.child))
    if isinstance(tree, SeqOp):
        return SeqOp(
            tree.kind,
            tree.min_len,
            tree.max_len,
            tuple(expand_builtins(c) for c in tree.prelude),
            tuple(expand_builtins(c) for c in tree.period),
        )
    if isinstance(tree, Sum):
        return Sum(tree.master, tuple(expand_builtins(c) for c in tree.cases))
    return tree


def element_length_bounds(node: SeqOp) -> tuple[int, Union[int, _Omega]]:
    """Allowed sequence lengths as a half-open interval [min_len, max_len)."""
    return node.min_len, node.max_len


# ---------------------------------------------------------------------------
# Element conformance


def _int_bounds(kind: BuiltinKind) -> tuple[int, int]:
    bits = kind.bit_width
    if kind.is_unsigned_int:
        return 0, (1 << bits) - 1
    half = 1 << (bits - 1)
    return -half, half - 1


def _check_element(node: OrderNode, value, path: str, nan_high: bool) -> None:
    if isinstance(node, Inv):
        _check_element(node.child, value, path, nan_high)
        return

    if isinstance(node, Finite):
        # bool counts as its integer rank; bool leaves lower to Finite(2).
        if not isinstance(value, int):
            raise ElementMismatch(f"{path}: expected a rank integer, got {type(value).__name__}")
        if not 0 <= value < node.cardinality:
            raise ElementMismatch(f"{path}: rank {value} outside 0..{node.cardinality - 1}")
        return

    if isinstance(node, Builtin):
        kind = node.kind
        if kind.is_unsigned_int or kind.is_signed_int:
            if not isinstance(value, int) or isinstance(value, bool):
                raise ElementMismatch(f"{path}: expected an integer for {kind.value}")
            lo, hi = _int_bounds(kind)
            if not lo <= value <= hi:
                raise ElementMismatch(f"{path}: {value} outside {kind.value} range {lo}..{hi}")
            return
        if kind.is_float:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ElementMismatch(f"{path}: expected a float for {kind.value}")
            if isinstance(value, float) and math.isnan(value) and not nan_high:
                raise NaNRejected(f"{path}: NaN needs the nan_high policy")
            return
        if kind is BuiltinKind.BOOL:
            if not isinstance(value, (bool, int)) or (isinstance(value, int) and value not in (0, 1)):
                raise ElementMismatch(f"{path}: expected a bool")
            return
        if kind is BuiltinKind.BYTES:
            if not isinstance(value, (bytes, bytearray)):
                raise ElementMismatch(f"{path}: expected bytes, got {type(value).__name__}")
            return
        if kind is BuiltinKind.RATIONAL:
            _rational_parts(value, path)
            return
        raise ElementMismatch(f"{path}: unhandled builtin {kind.value}")

    if isinstance(node, SeqOp):
        if isinstance(value, str) or not hasattr(value, "__len__"):
            raise ElementMismatch(f"{path}: expected a sequence, got {type(value).__name__}")
        length = len(value)
        if length < node.min_len or not node.max_len > length:
            raise ElementMismatch(
                f"{path}: length {length} outside [{node.min_len}, {node.max_len})"
            )
        for rank, item in enumerate(value):
            _check_element(item_order_at(node, rank), item, f"{path}[{rank}]", nan_high)
        return

    if isinstance(node, Sum):
        if isinstance(value, str) or not hasattr(value, "__len__") or len(value) != 2:
            raise ElementMismatch(f"{path}: expected a (master_rank, sub) pair")
        master_rank, sub = value
        if not isinstance(master_rank, int) or isinstance(master_rank, bool):
            raise ElementMismatch(f"{path}: master rank must be an integer")
        if not 0 <= master_rank < node.master.cardinality:
            raise ElementMismatch(
                f"{path}: master rank {master_rank} outside 0..{node.master.cardinality - 1}"
            )
        _check_element(node.cases[master_rank], sub, f"{path}.case({master_rank})", nan_high)
        return

    raise ElementMismatch(f"{path}: not an order node: {type(node).__name__}")


def _rational_parts(value, path: str) -> tuple[int, int]:
    """Extract (numerator, denominator > 0) from the accepted spellings."""
    if isinstance(value, Fraction):
        return value.numerator, value.denominator
    if isinstance(value, int) and not isinstance(value, bool):
        return value, 1
    if isinstance(value, tuple) and len(value) == 2:
        num, den = value
        if (
            isinstance(num, int)
            and isinstance(den, int)
            and not isinstance(num, bool)
            and not isinstance(den, bool)
        ):
            if den <= 0:
                raise ElementMismatch(f"{path}: rational denominator must be positive, got {den}")
            return num, den
    raise ElementMismatch(
        f"{path}: expected a Fraction, an int, or a (num, den) pair, got {type(value).__name__}"
    )


def check_element(tree: OrderNode, value, *, nan_high: bool = False) -> None:
    """Raise ElementMismatch (or NaNRejected) unless value conforms to tree."""
    _check_element(tree, value, "$", nan_high)


def rational_parts(value) -> tuple[int, int]:
    """Public helper: (num, den) with den > 0 for any accepted rational spelling."""
    return _rational_parts(value, "$")


def iter_nodes(tree: OrderNode) -> Iterator[OrderNode]:
    """Yield every node of a tree, root first."""
    yield tree
    if isinstance(tree, Inv):
        yield from iter_nodes(tree.child)
    elif isinstance(tree, SeqOp):
        for child in tree.prelude:
            yield from iter_nodes(child)
        for child in tree.period:
            yield from iter_nodes(child)
    elif isinstance(tree, Sum):
        yield from iter_nodes(tree.master)
        for child in tree.cases:
            yield from iter_nodes(child)
