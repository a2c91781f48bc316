"""Learning weighted grammars over skeletal trees."""

from ._core import (
    CapExceeded,
    Grammar,
    InputError,
    PreconditionError,
    canonical,
    duplication_distance,
    gene_tree,
    learn,
    swap_distance,
    yield_of,
)

__all__ = [
    "CapExceeded",
    "Grammar",
    "InputError",
    "PreconditionError",
    "canonical",
    "duplication_distance",
    "gene_tree",
    "learn",
    "swap_distance",
    "yield_of",
]
