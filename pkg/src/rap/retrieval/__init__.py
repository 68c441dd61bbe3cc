from .index import (
    DEFAULT_B,
    DEFAULT_K1,
    DEFAULT_K_ARGUMENT,
    DEFAULT_K_TRIGGER,
    RetrievalIndex,
    RetrievalResult,
    bm25_score,
    build_index,
    read_index_snapshot,
    retrieve_topk,
    write_index_snapshot,
)
from .kernels import BACKEND

__all__ = [
    "BACKEND",
    "DEFAULT_B",
    "DEFAULT_K1",
    "DEFAULT_K_ARGUMENT",
    "DEFAULT_K_TRIGGER",
    "RetrievalIndex",
    "RetrievalResult",
    "bm25_score",
    "build_index",
    "read_index_snapshot",
    "retrieve_topk",
    "write_index_snapshot",
]
