"""Shared test helpers: bounded element enumeration for small trees."""

from itertools import product

from tsokey import (
    OMEGA,
    Builtin,
    BuiltinKind,
    Finite,
    Inv,
    SeqOp,
    Sum,
    compare,
    compare_keys,
    encode,
    item_order_at,
)

_FLOATS = [-2.0, -0.5, -0.0, 0.0, 1.5]
_SIGNED = [-2, -1, 0, 1, 2]
_UNSIGNED = [0, 1, 2, 5]
_RATIONALS = [(-3, 2), (-1, 1), (0, 1), (1, 3), (1, 2), (2, 1)]


def elements(tree, budget=2):
    """Every element of tree, sequence lengths capped at min_len + budget."""
    if isinstance(tree, Inv):
        return elements(tree.child, budget)
    if isinstance(tree, Finite):
        return list(range(tree.cardinality))
    if isinstance(tree, Builtin):
        kind = tree.kind
        if kind is BuiltinKind.BOOL:
            return [False, True]
        if kind is BuiltinKind.RATIONAL:
            return list(_RATIONALS)
        if kind is BuiltinKind.BYTES:
            return [b"", b"a", b"ab", b"b"]
        if kind.is_float:
            return list(_FLOATS)
        if kind.is_signed_int:
            return list(_SIGNED)
        return list(_UNSIGNED)
    if isinstance(tree, SeqOp):
        top = tree.min_len + budget
        if tree.max_len is not OMEGA:
            top = min(top, tree.max_len - 1)
        out = []
        for length in range(tree.min_len, top + 1):
            pools = [elements(item_order_at(tree, rank), budget) for rank in range(length)]
            out.extend(list(combo) for combo in product(*pools))
        return out
    if isinstance(tree, Sum):
        return [
            (rank, sub)
            for rank in range(tree.master.cardinality)
            for sub in elements(tree.cases[rank], budget)
        ]
    raise TypeError(f"not an order node: {type(tree).__name__}")


def assert_keys_match_oracle(tree, elems, mode="padded", **encode_kw):
    """Bytewise order of the encoded keys must equal the oracle on every pair."""
    keys = [encode(tree, value, mode, **encode_kw) for value in elems]
    for i, x in enumerate(elems):
        for j in range(i, len(elems)):
            y = elems[j]
            want = compare(tree, x, y)
            got = compare_keys(keys[i], keys[j])
            assert got is want, (
                f"disagree on {x!r} vs {y!r}: keys {keys[i].hex()} / {keys[j].hex()}, "
                f"oracle {want.name}, bytewise {got.name}"
            )
