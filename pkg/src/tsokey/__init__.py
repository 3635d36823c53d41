"""Order-preserving byte keys for tree structured orders.

Build an order tree (or parse one from its text form), encode elements into
byte keys whose plain bytewise comparison reproduces the tree order, and
sort large key arrays with an MSD radix sorter that has a compiled core and
a pure-Python fallback.
"""

from .comparator import Ordering, compare, find_question
from .encoder import (
    PreparedOrder,
    adjust_final_padding,
    compare_keys,
    continued_fraction,
    data_byte_count,
    empty_sequence_pattern,
    encode,
    encode_batch,
    flip_bits,
    hierar_count_header,
    packed_width,
    prepare,
    primitive_key,
    rational_key,
    swap_final_nibbles,
    wrap_finite_leaf,
)
from .errors import (
    AntiNotUniform,
    CounterOverflow,
    CounterUnderflow,
    CountTooLarge,
    DepthOverflow,
    DomainError,
    ElementError,
    ElementMismatch,
    EncodingError,
    IncompatibleElements,
    MalformedNode,
    MixedCellKinds,
    NaNRejected,
    NextNotFixedLength,
    OrderTooDeep,
    PackedModeUnavailable,
    PeriodMissing,
    PrefixAnomaly,
    RankOutOfRange,
    SourceSpan,
    TsodlSyntaxError,
    TsokeyError,
    ValidationError,
    ZeroDenominator,
)
from .order_model import (
    BOOL,
    BYTES,
    FLOAT32,
    FLOAT64,
    INT8,
    INT16,
    INT32,
    INT64,
    OMEGA,
    RATIONAL,
    UINT8,
    UINT16,
    UINT32,
    UINT64,
    Builtin,
    BuiltinKind,
    Finite,
    Inv,
    OrderNode,
    PathStats,
    SeqKind,
    SeqOp,
    Sum,
    anticontrehierar,
    anticontrelex,
    antihierar,
    antilex,
    check_element,
    contre_rewrite,
    contrehierar,
    contrelex,
    expand_builtins,
    finite,
    hierar,
    inv,
    item_order_at,
    lex,
    next_,
    push_inv_to_leaves,
    rational_parts,
    sum_of,
    validate,
)
from .sorter import (
    HAVE_COMPILED,
    LongCell,
    ShortCell,
    SortPolicy,
    choose_algorithm,
    counting_sort_pass,
    sort_cells,
)
from .tsodl import parse, serialize

__version__ = "0.1.0"
