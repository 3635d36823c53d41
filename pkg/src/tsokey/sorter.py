"""Sorting of encoded keys: MSD radix with a compiled core when available.

Keys travel in cells that pair the key bytes with an opaque reference (a
row id, an input line number, ...).  Short cells carry exactly eight key
bytes, long cells any number.  ``sort_cells`` picks between a comparison
sort (Python's built-in binary-insertion merge sort) below the policy's
switch threshold and the MSD radix path above it; the radix path runs in
the C extension ``tsokey._radixcore`` when the build produced it and in
``tsokey._pure_sort`` otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from operator import attrgetter

from . import _pure_sort
from .errors import MixedCellKinds

try:
    from . import _radixcore
except ImportError:  # pure-Python install
    _radixcore = None

HAVE_COMPILED = _radixcore is not None

__all__ = [
    "ShortCell",
    "LongCell",
    "SortPolicy",
    "HAVE_COMPILED",
    "counting_sort_pass",
    "choose_algorithm",
    "sort_cells",
]


@dataclass(frozen=True, slots=True)
class ShortCell:
    """Eight key bytes (one big-endian machine word) plus a reference."""

    key: bytes
    ref: int

    def __post_init__(self):
        if len(self.key) != 8:
            raise ValueError(f"short cell key must be 8 bytes, got {len(self.key)}")


@dataclass(frozen=True, slots=True)
class LongCell:
    """A key of any length plus a reference."""

    key: bytes
    ref: int

    @property
    def key_length(self) -> int:
        return len(self.key)


@dataclass(frozen=True, slots=True)
class SortPolicy:
    """Tuning knobs for sort_cells.

    Arrays shorter than switch_threshold go to the comparison sort; radix
    buckets shorter than insertion_threshold finish with insertion sort.
    backend picks the radix kernels: "auto" prefers the compiled core and
    falls back to pure Python, the other two values force one of them.
    """

    switch_threshold: int = 64
    insertion_threshold: int = 32
    backend: str = "auto"


DEFAULT_POLICY = SortPolicy()


def choose_algorithm(n: int, cell_kind: str, policy: SortPolicy = DEFAULT_POLICY) -> str:
    """"comparison" or "radix" for an array of n cells of the given kind."""
    if cell_kind not in ("short", "long"):
        raise ValueError(f"unknown cell kind {cell_kind!r}")
    return "comparison" if n < policy.switch_threshold else "radix"


def counting_sort_pass(cells: list, byte_index: int) -> list[int]:
    """One stable partition of cells by the key byte at byte_index.

    Cells whose key is exhausted (shorter than byte_index + 1) come first,
    then one class per byte value.  The list is reordered in place; the
    return value has 258 entries, boundaries[c] being the start of class c
    (class 0 = exhausted, class v + 1 = byte value v) and boundaries[257]
    the total count.
    """
    if byte_index < 0:
        raise ValueError("byte_index must be non-negative")
    counts = [0] * 258
    for cell in cells:
        key = cell.key
        cls = 0 if len(key) <= byte_index else key[byte_index] + 1
        counts[cls] += 1
    boundaries = [0] * 258
    total = 0
    for cls in range(257):
        boundaries[cls] = total
        total += counts[cls]
    boundaries[257] = total
    cursors = boundaries[:]
    aux: list = [None] * len(cells)
    for cell in cells:
        key = cell.key
        cls = 0 if len(key) <= byte_index else key[byte_index] + 1
        aux[cursors[cls]] = cell
        cursors[cls] += 1
    cells[:] = aux
    return boundaries


def _cell_kind(cells: list) -> str:
    first_short = isinstance(cells[0], ShortCell)
    for cell in cells:
        if isinstance(cell, ShortCell) != first_short:
            raise MixedCellKinds("short and long cells in one array")
        if not isinstance(cell, (ShortCell, LongCell)):
            raise MixedCellKinds(f"not a cell: {type(cell).__name__}")
    return "short" if first_short else "long"


def _resolve_backend(policy: SortPolicy):
    if policy.backend == "auto":
        return _radixcore if HAVE_COMPILED else _pure_sort
    if policy.backend == "compiled":
        if not HAVE_COMPILED:
            raise RuntimeError("compiled sorting core is not available in this install")
        return _radixcore
    if policy.backend == "pure":
        return _pure_sort
    raise ValueError(f"unknown backend {policy.backend!r}")


def sort_cells(cells: list, policy: SortPolicy = DEFAULT_POLICY) -> list:
    """Return the cells in stable ascending order of bytewise key comparison."""
    if not cells:
        return []
    kind = _cell_kind(cells)
    if choose_algorithm(len(cells), kind, policy) == "comparison":
        return sorted(cells, key=attrgetter("key"))
    backend = _resolve_backend(policy)
    keys = [cell.key for cell in cells]
    if kind == "short" and backend is _radixcore:
        order = _radixcore.sort_short_keys(keys, policy.insertion_threshold)
    elif backend is _radixcore:
        order = _radixcore.sort_long_keys(keys, policy.insertion_threshold)
    else:
        order = _pure_sort.msd_sort_indices(keys, policy.insertion_threshold)
    return [cells[i] for i in order]
