"""Schema-aware reference store, BM25 retrieval and prompt augmentation for
knowledge-graph construction datasets."""

from .dataset import ExtractionRecord, load_dataset, sample_split, emit_augmented, load_augmented
from .errors import RapError
from .evaluate import EvalReport, eval_argument_classification, eval_trigger_classification, eval_triples
from .prompt import PromptBundle, assemble_event_prompt, assemble_relation_prompt, format_input
from .retrieval import RetrievalIndex, RetrievalResult, bm25_score, build_index, retrieve_topk
from .schema import SchemaGraph, load_schema, neighbors, resolve_pointer, validate
from .store import ReferenceStore, StoreEntry, build_store, extend_store, store_stats
from .weak import SenseLexicon, annotate_corpus, detect_nuggets, disambiguate, map_to_schema

__version__ = "0.1.0"

__all__ = [
    "EvalReport",
    "ExtractionRecord",
    "PromptBundle",
    "RapError",
    "ReferenceStore",
    "RetrievalIndex",
    "RetrievalResult",
    "SchemaGraph",
    "SenseLexicon",
    "StoreEntry",
    "annotate_corpus",
    "assemble_event_prompt",
    "assemble_relation_prompt",
    "bm25_score",
    "build_index",
    "build_store",
    "detect_nuggets",
    "disambiguate",
    "emit_augmented",
    "eval_argument_classification",
    "eval_trigger_classification",
    "eval_triples",
    "extend_store",
    "format_input",
    "load_augmented",
    "load_dataset",
    "load_schema",
    "map_to_schema",
    "neighbors",
    "resolve_pointer",
    "retrieve_topk",
    "sample_split",
    "store_stats",
    "validate",
]
