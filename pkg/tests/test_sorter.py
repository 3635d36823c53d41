"""Tests for the radix sorter: cells, kernels, backend selection."""

import array
import random
from operator import attrgetter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tsokey import (
    HAVE_COMPILED,
    LongCell,
    MixedCellKinds,
    ShortCell,
    SortPolicy,
    choose_algorithm,
    counting_sort_pass,
    sort_cells,
)
from tsokey import _pure_sort, sorter
from tsokey._pure_sort import insertion_sort_indices, msd_sort_indices

BACKENDS = ["pure"] + (["compiled"] if HAVE_COMPILED else [])


def short_cells(rng, n, distinct_bytes=256):
    return [
        ShortCell(bytes(rng.randrange(distinct_bytes) for _ in range(8)), ref)
        for ref in range(n)
    ]


def long_cells(rng, n, max_len=12, distinct_bytes=4):
    return [
        LongCell(
            bytes(rng.randrange(distinct_bytes) for _ in range(rng.randrange(max_len + 1))),
            ref,
        )
        for ref in range(n)
    ]


def stable_oracle(cells):
    return sorted(cells, key=attrgetter("key"))


class TestCells:
    def test_short_cell_holds_eight_bytes(self):
        cell = ShortCell(b"\x00" * 8, 7)
        assert cell.key == b"\x00" * 8
        assert cell.ref == 7

    @pytest.mark.parametrize("length", [0, 1, 7, 9, 16])
    def test_short_cell_rejects_other_lengths(self, length):
        with pytest.raises(ValueError, match="8 bytes"):
            ShortCell(b"\x00" * length, 0)

    def test_long_cell_any_length(self):
        assert LongCell(b"", 0).key_length == 0
        assert LongCell(b"abc", 1).key_length == 3

    def test_cells_are_immutable(self):
        cell = LongCell(b"a", 0)
        with pytest.raises(AttributeError):
            cell.ref = 1


class TestChooseAlgorithm:
    def test_threshold_boundary(self):
        policy = SortPolicy(switch_threshold=64)
        assert choose_algorithm(63, "short", policy) == "comparison"
        assert choose_algorithm(64, "short", policy) == "radix"
        assert choose_algorithm(10**6, "long", policy) == "radix"

    def test_custom_threshold(self):
        policy = SortPolicy(switch_threshold=2)
        assert choose_algorithm(1, "long", policy) == "comparison"
        assert choose_algorithm(2, "long", policy) == "radix"

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="cell kind"):
            choose_algorithm(10, "medium")


class TestCountingSortPass:
    def test_partitions_by_byte(self):
        cells = [
            LongCell(b"\x02", 0),
            LongCell(b"\x00", 1),
            LongCell(b"\x02", 2),
            LongCell(b"\x01", 3),
        ]
        boundaries = counting_sort_pass(cells, 0)
        assert [c.key[0] for c in cells] == [0, 1, 2, 2]
        assert [c.ref for c in cells] == [1, 3, 0, 2]
        assert len(boundaries) == 258
        assert boundaries[257] == 4
        # class 0 is the exhausted class, byte value v lives in class v + 1
        assert boundaries[0] == boundaries[1] == 0
        assert boundaries[2] == 1
        assert boundaries[3] == 2
        assert boundaries[4] == 4

    def test_exhausted_keys_come_first(self):
        cells = [
            LongCell(b"a\x00", 0),
            LongCell(b"a", 1),
            LongCell(b"ab", 2),
            LongCell(b"a", 3),
        ]
        boundaries = counting_sort_pass(cells, 1)
        assert [c.ref for c in cells] == [1, 3, 0, 2]
        assert boundaries[1] == 2  # two exhausted keys
        assert boundaries[257] == 4

    def test_stability_within_class(self):
        rng = random.Random(5)
        cells = [LongCell(bytes([rng.randrange(3)]), ref) for ref in range(200)]
        snapshot = list(cells)
        counting_sort_pass(cells, 0)
        for value in range(3):
            got = [c.ref for c in cells if c.key[0] == value]
            expected = [c.ref for c in snapshot if c.key[0] == value]
            assert got == expected

    def test_boundaries_are_class_starts(self):
        rng = random.Random(6)
        cells = [
            LongCell(bytes(rng.randrange(256) for _ in range(rng.randrange(3))), ref)
            for ref in range(300)
        ]
        boundaries = counting_sort_pass(cells, 0)
        for cls in range(257):
            for i in range(boundaries[cls], boundaries[cls + 1]):
                key = cells[i].key
                assert (0 if len(key) == 0 else key[0] + 1) == cls

    def test_negative_index_rejected(self):
        with pytest.raises(ValueError, match="non-negative"):
            counting_sort_pass([LongCell(b"a", 0)], -1)

    def test_empty_list(self):
        cells = []
        boundaries = counting_sort_pass(cells, 0)
        assert cells == []
        assert boundaries == [0] * 258


class TestSortCells:
    def test_empty(self):
        assert sort_cells([]) == []

    def test_comparison_path_small_array(self):
        rng = random.Random(0)
        cells = short_cells(rng, 20)
        assert sort_cells(cells) == stable_oracle(cells)

    @pytest.mark.parametrize("backend", BACKENDS + ["auto"])
    def test_short_cells_match_oracle(self, backend):
        rng = random.Random(1)
        cells = short_cells(rng, 3000, distinct_bytes=7)
        policy = SortPolicy(backend=backend)
        assert sort_cells(cells, policy) == stable_oracle(cells)

    @pytest.mark.parametrize("backend", BACKENDS + ["auto"])
    def test_long_cells_match_oracle(self, backend):
        rng = random.Random(2)
        cells = long_cells(rng, 3000)
        policy = SortPolicy(backend=backend)
        assert sort_cells(cells, policy) == stable_oracle(cells)

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_stability_with_heavy_duplicates(self, backend):
        rng = random.Random(3)
        keys = [bytes([rng.randrange(2)]) * 8 for _ in range(500)]
        cells = [ShortCell(key, ref) for ref, key in enumerate(keys)]
        result = sort_cells(cells, SortPolicy(backend=backend))
        assert result == stable_oracle(cells)
        refs_per_key = {}
        for cell in result:
            refs_per_key.setdefault(cell.key, []).append(cell.ref)
        for refs in refs_per_key.values():
            assert refs == sorted(refs)

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_prefix_ordering(self, backend):
        cells = [
            LongCell(key, ref)
            for ref, key in enumerate([b"ab", b"a", b"abc", b"", b"b", b"aa"])
        ]
        policy = SortPolicy(switch_threshold=0, backend=backend)
        result = sort_cells(cells, policy)
        assert [c.key for c in result] == [b"", b"a", b"aa", b"ab", b"abc", b"b"]

    def test_input_not_mutated(self):
        rng = random.Random(4)
        cells = long_cells(rng, 200)
        snapshot = list(cells)
        sort_cells(cells, SortPolicy(backend="pure"))
        assert cells == snapshot

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_forced_radix_on_tiny_arrays(self, backend):
        policy = SortPolicy(switch_threshold=0, backend=backend)
        cells = [LongCell(b"b", 0), LongCell(b"a", 1)]
        assert [c.ref for c in sort_cells(cells, policy)] == [1, 0]
        assert sort_cells([LongCell(b"x", 0)], policy) == [LongCell(b"x", 0)]

    @pytest.mark.parametrize("threshold", [0, 1, 2, 10**9])
    def test_insertion_threshold_extremes(self, threshold):
        rng = random.Random(7)
        cells = long_cells(rng, 300)
        policy = SortPolicy(
            switch_threshold=0, insertion_threshold=threshold, backend="pure"
        )
        assert sort_cells(cells, policy) == stable_oracle(cells)

    def test_mixed_kinds_rejected(self):
        cells = [ShortCell(b"\x00" * 8, 0), LongCell(b"a", 1)]
        with pytest.raises(MixedCellKinds):
            sort_cells(cells)

    def test_non_cell_rejected(self):
        with pytest.raises(MixedCellKinds, match="bytes"):
            sort_cells([LongCell(b"a", 0), b"bare key"])

    def test_unknown_backend(self):
        policy = SortPolicy(switch_threshold=0, backend="fast")
        with pytest.raises(ValueError, match="backend"):
            sort_cells([LongCell(b"a", 0)], policy)

    def test_compiled_backend_without_extension(self, monkeypatch):
        monkeypatch.setattr(sorter, "HAVE_COMPILED", False)
        cells = [LongCell(bytes([i]), i) for i in range(100)]
        with pytest.raises(RuntimeError, match="compiled"):
            sort_cells(cells, SortPolicy(backend="compiled"))

    @pytest.mark.skipif(not HAVE_COMPILED, reason="extension not built")
    def test_auto_prefers_compiled(self, monkeypatch):
        calls = []
        real = sorter._radixcore.sort_short_keys

        def spy(keys, threshold):
            calls.append(len(keys))
            return real(keys, threshold)

        monkeypatch.setattr(sorter._radixcore, "sort_short_keys", spy)
        rng = random.Random(8)
        sort_cells(short_cells(rng, 100))
        assert calls == [100]


class TestPureKernels:
    def test_insertion_sorts_a_slice(self):
        keys = [b"d", b"c", b"b", b"a"]
        order = [0, 1, 2, 3]
        insertion_sort_indices(keys, order, 1, 3)
        assert order == [0, 2, 1, 3]

    def test_insertion_is_stable(self):
        keys = [b"a", b"a", b"a"]
        order = [0, 1, 2]
        insertion_sort_indices(keys, order, 0, 3)
        assert order == [0, 1, 2]

    def test_msd_trivial_sizes(self):
        assert msd_sort_indices([]) == []
        assert msd_sort_indices([b"z"]) == [0]

    def test_msd_matches_stable_argsort(self):
        rng = random.Random(9)
        keys = [
            bytes(rng.randrange(4) for _ in range(rng.randrange(10)))
            for _ in range(2000)
        ]
        expected = sorted(range(len(keys)), key=keys.__getitem__)
        assert list(msd_sort_indices(keys, 16)) == expected

    def test_msd_skips_shared_prefixes(self):
        prefix = b"\x55" * 64
        keys = [prefix + bytes([b]) for b in (3, 1, 2, 0)] + [prefix]
        assert list(msd_sort_indices(keys, 0)) == [4, 3, 1, 2, 0]

    def test_single_index_buffer(self, monkeypatch):
        buffers = []
        original = _pure_sort._new_buffer

        def counting_buffer(n):
            buffers.append(n)
            return original(n)

        monkeypatch.setattr(_pure_sort, "_new_buffer", counting_buffer)
        rng = random.Random(10)
        keys = [bytes(rng.randrange(256) for _ in range(4)) for _ in range(500)]
        msd_sort_indices(keys, 8)
        assert buffers == [500]

    def test_count_table_per_partition_pass(self, monkeypatch):
        tables = []
        original = _pure_sort._new_counts

        def counting_counts():
            tables.append(1)
            return original()

        monkeypatch.setattr(_pure_sort, "_new_counts", counting_counts)
        # Two distinct first bytes, each group a single key: one pass total.
        msd_sort_indices([b"\x01", b"\x00"], 0)
        assert len(tables) == 1

    def test_insertion_cutoff_skips_counting(self, monkeypatch):
        monkeypatch.setattr(
            _pure_sort, "_new_counts", lambda: pytest.fail("counting pass ran")
        )
        keys = [b"c", b"a", b"b"]
        assert list(msd_sort_indices(keys, 10)) == [1, 2, 0]


@pytest.mark.skipif(not HAVE_COMPILED, reason="extension not built")
class TestCompiledKernels:
    def test_short_returns_index_array(self):
        from tsokey import _radixcore

        result = _radixcore.sort_short_keys([b"\x00" * 7 + b"\x01", b"\x00" * 8])
        assert isinstance(result, array.array)
        assert result.typecode == "q"
        assert list(result) == [1, 0]

    def test_short_agrees_with_pure(self):
        from tsokey import _radixcore

        rng = random.Random(11)
        keys = [bytes(rng.randrange(5) for _ in range(8)) for _ in range(5000)]
        assert list(_radixcore.sort_short_keys(keys, 16)) == list(
            msd_sort_indices(keys, 16)
        )

    def test_long_agrees_with_pure(self):
        from tsokey import _radixcore

        rng = random.Random(12)
        keys = [
            bytes(rng.randrange(3) for _ in range(rng.randrange(15)))
            for _ in range(5000)
        ]
        assert list(_radixcore.sort_long_keys(keys, 16)) == list(
            msd_sort_indices(keys, 16)
        )

    @pytest.mark.parametrize("threshold", [0, 1, 64])
    def test_threshold_extremes(self, threshold):
        from tsokey import _radixcore

        rng = random.Random(13)
        keys = [bytes(rng.randrange(4) for _ in range(6)) for _ in range(400)]
        long_keys = [k[: rng.randrange(7)] for k in keys]
        padded = [k + b"\x00" * (8 - len(k)) for k in long_keys]
        assert list(_radixcore.sort_short_keys(padded, threshold)) == sorted(
            range(len(padded)), key=padded.__getitem__
        )
        assert list(_radixcore.sort_long_keys(long_keys, threshold)) == sorted(
            range(len(long_keys)), key=long_keys.__getitem__
        )

    def test_short_rejects_wrong_length(self):
        from tsokey import _radixcore

        with pytest.raises(ValueError, match="length 8"):
            _radixcore.sort_short_keys([b"\x00" * 8, b"\x00" * 7])

    def test_rejects_non_bytes(self):
        from tsokey import _radixcore

        with pytest.raises(ValueError):
            _radixcore.sort_short_keys(["eightchr"])
        with pytest.raises(ValueError):
            _radixcore.sort_long_keys([b"ok", "not bytes"])

    def test_empty_input(self):
        from tsokey import _radixcore

        assert list(_radixcore.sort_short_keys([])) == []
        assert list(_radixcore.sort_long_keys([])) == []


@settings(max_examples=150, deadline=None)
@given(st.lists(st.binary(max_size=10)), st.sampled_from(BACKENDS))
def test_sort_cells_matches_oracle_on_random_long_keys(keys, backend):
    cells = [LongCell(key, ref) for ref, key in enumerate(keys)]
    policy = SortPolicy(switch_threshold=0, insertion_threshold=4, backend=backend)
    assert sort_cells(cells, policy) == stable_oracle(cells)


@settings(max_examples=150, deadline=None)
@given(
    st.lists(st.binary(min_size=8, max_size=8), max_size=60),
    st.sampled_from(BACKENDS),
)
def test_sort_cells_matches_oracle_on_random_short_keys(keys, backend):
    cells = [ShortCell(key, ref) for ref, key in enumerate(keys)]
    policy = SortPolicy(switch_threshold=0, insertion_threshold=4, backend=backend)
    assert sort_cells(cells, policy) == stable_oracle(cells)
