"""Pure-Python MSD radix kernels; the fallback when the C core is absent.

Both kernels sort a permutation of indices into a list of byte keys, most
significant byte first, with 257 classes per pass: keys already exhausted at
the current position come first, then one class per byte value.  Buckets
below the insertion threshold switch to a stable insertion sort.  Auxiliary
space is one index buffer of size n plus a 257-entry count table per
recursion level; tests pin that down by monkeypatching _new_buffer and
_new_counts.
"""

from __future__ import annotations

__all__ = ["msd_sort_indices", "insertion_sort_indices"]


def _new_buffer(n: int) -> list:
    return [0] * n


def _new_counts() -> list:
    return [0] * 258


def insertion_sort_indices(keys: list[bytes], order: list[int], lo: int, hi: int) -> None:
    """Stable insertion sort of order[lo:hi] by full key comparison."""
    for i in range(lo + 1, hi):
        idx = order[i]
        key = keys[idx]
        j = i - 1
        while j >= lo and keys[order[j]] > key:
            order[j + 1] = order[j]
            j -= 1
        order[j + 1] = idx


def msd_sort_indices(keys: list[bytes], insertion_threshold: int = 32) -> list[int]:
    """Stable ascending permutation of range(len(keys)) by bytewise key order."""
    n = len(keys)
    order = list(range(n))
    if n < 2:
        return order
    aux = _new_buffer(n)
    # Work stack of (lo, hi, byte position) group descriptors.
    stack = [(0, n, 0)]
    while stack:
        lo, hi, pos = stack.pop()
        while hi - lo > 1:
            if hi - lo < insertion_threshold:
                insertion_sort_indices(keys, order, lo, hi)
                break
            counts = _new_counts()
            for i in range(lo, hi):
                key = keys[order[i]]
                cls = 0 if len(key) <= pos else key[pos] + 1
                counts[cls] += 1
            exhausted = counts[0]
            if exhausted == hi - lo:
                break  # all keys end here: one equal group
            if exhausted == 0 and max(counts) == hi - lo:
                # Single occupied byte class: skip ahead without moving.
                pos += 1
                continue
            # Prefix sums give each class its slice.
            total = lo
            for cls in range(257):
                count = counts[cls]
                counts[cls] = total
                total += count
            counts[257] = total
            starts = counts[:]
            for i in range(lo, hi):
                idx = order[i]
                key = keys[idx]
                cls = 0 if len(key) <= pos else key[pos] + 1
                aux[starts[cls]] = idx
                starts[cls] += 1
            order[lo:hi] = aux[lo:hi]
            # Recurse into the byte classes; the exhausted class is a block
            # of identical keys and needs no further work.
            for cls in range(1, 257):
                begin, end = counts[cls], counts[cls + 1]
                if end - begin > 1:
                    stack.append((begin, end, pos + 1))
            break
    return order
