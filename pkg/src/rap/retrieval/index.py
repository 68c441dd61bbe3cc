"""Inverted index and BM25 top-k retrieval over a reference store."""
from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .._io import atomic_write_text
from ..errors import EntryNotFound, InvalidK, ParseError
from ..text import terms
from . import kernels

DEFAULT_K1 = 1.2
DEFAULT_B = 0.75
# best depths reported for trigger vs argument classification
DEFAULT_K_TRIGGER = 2
DEFAULT_K_ARGUMENT = 8

_NO_ORIGIN = -1


@dataclass(frozen=True)
class RetrievalResult:
    hits: tuple[tuple[int, float], ...]
    k_requested: int

    @property
    def ids(self) -> list[int]:
        return [i for i, _ in self.hits]

    def __len__(self) -> int:
        return len(self.hits)


class RetrievalIndex:
    """Postings in CSR form: for term id t, ``indptr[t]:indptr[t+1]`` slices
    ``doc_ids``/``tfs``, with doc ids ascending inside each slice."""

    def __init__(self, vocab, indptr, doc_ids, tfs, doc_lengths, origins, k1=DEFAULT_K1, b=DEFAULT_B):
        self.vocab: dict[str, int] = vocab
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.doc_ids = np.asarray(doc_ids, dtype=np.int64)
        self.tfs = np.asarray(tfs, dtype=np.float64)
        self.doc_lengths = np.asarray(doc_lengths, dtype=np.float64)
        self.origins = np.asarray(origins, dtype=np.int64)
        self.doc_count = int(self.doc_lengths.shape[0])
        total = int(self.doc_lengths.sum()) if self.doc_count else 0
        self.avg_doc_length = total / self.doc_count if self.doc_count else 0.0
        self.bm25_params = (float(k1), float(b))
        self._df = np.diff(self.indptr)
        self._terms = [""] * len(self.vocab)
        for term, t in self.vocab.items():
            self._terms[t] = term

    def __repr__(self) -> str:
        return f"RetrievalIndex(docs={self.doc_count}, terms={len(self.vocab)}, k1={self.bm25_params[0]}, b={self.bm25_params[1]})"

    def postings_for(self, term: str) -> list[tuple[int, int]]:
        t = self.vocab.get(term)
        if t is None:
            return []
        s, e = self.indptr[t], self.indptr[t + 1]
        return [(int(d), int(f)) for d, f in zip(self.doc_ids[s:e], self.tfs[s:e])]

    @property
    def postings(self) -> dict[str, list[tuple[int, int]]]:
        return {term: self.postings_for(term) for term in sorted(self.vocab)}

    def doc_freq(self, term: str) -> int:
        t = self.vocab.get(term)
        return 0 if t is None else int(self._df[t])

    def idf(self, term: str) -> float:
        df = self.doc_freq(term)
        n = self.doc_count
        return math.log((n - df + 0.5) / (df + 0.5) + 1.0)

    def _query_plan(self, query: str):
        # distinct known terms in sorted order; the order fixes float summation
        tids = sorted({self.vocab[t] for t in terms(query) if t in self.vocab}, key=lambda i: self._terms[i])
        idf = np.array([self.idf(self._terms[t]) for t in tids], dtype=np.float64)
        tids = np.array(tids, dtype=np.int64)
        return idf, self.indptr[tids], self.indptr[tids + 1]

    def score_all(self, query: str, kernel=None) -> np.ndarray:
        """BM25 score of ``query`` against every entry."""
        if self.doc_count == 0:
            return np.zeros(0, dtype=np.float64)
        q_idf, q_start, q_end = self._query_plan(query)
        k1, b = self.bm25_params
        fn = kernel or kernels.score_all
        return fn(q_idf, q_start, q_end, self.doc_ids, self.tfs, self.doc_lengths,
                  float(self.avg_doc_length), k1, b, self.doc_count)

    def to_json(self) -> dict:
        return {
            "k1": self.bm25_params[0],
            "b": self.bm25_params[1],
            "doc_count": self.doc_count,
            "avg_doc_length": self.avg_doc_length,
            "doc_lengths": [int(x) for x in self.doc_lengths],
            "origins": [None if o == _NO_ORIGIN else int(o) for o in self.origins],
            "postings": {t: [list(p) for p in ps] for t, ps in self.postings.items()},
        }

    @classmethod
    def from_json(cls, obj: dict) -> "RetrievalIndex":
        n = obj["doc_count"]
        lens = obj["doc_lengths"]
        if len(lens) != n:
            raise ValueError("doc_lengths does not match doc_count")
        vocab, indptr, doc_ids, tfs = {}, [0], [], []
        for term in sorted(obj["postings"]):
            vocab[term] = len(vocab)
            for d, f in obj["postings"][term]:
                doc_ids.append(d)
                tfs.append(f)
            indptr.append(len(doc_ids))
        origins = [_NO_ORIGIN if o is None else o for o in obj.get("origins", [None] * n)]
        return cls(vocab, indptr, doc_ids, tfs, lens, origins, obj["k1"], obj["b"])


def build_index(store, k1: float = DEFAULT_K1, b: float = DEFAULT_B) -> RetrievalIndex:
    """Index entry texts. Term ids follow first appearance; postings are per term, by entry id."""
    entries = store.entries if hasattr(store, "entries") else store
    vocab: dict[str, int] = {}
    tid_col: list[int] = []
    doc_col: list[int] = []
    tf_col: list[int] = []
    lengths = np.zeros(len(entries), dtype=np.int64)
    origins = np.full(len(entries), _NO_ORIGIN, dtype=np.int64)
    for pos, entry in enumerate(entries):
        toks = terms(entry.text)
        lengths[pos] = len(toks)
        if entry.origin_record is not None:
            origins[pos] = entry.origin_record
        for term, tf in Counter(toks).items():
            tid_col.append(vocab.setdefault(term, len(vocab)))
            doc_col.append(pos)
            tf_col.append(tf)
    tid_arr = np.asarray(tid_col, dtype=np.int64)
    order = np.argsort(tid_arr, kind="stable")
    indptr = np.zeros(len(vocab) + 1, dtype=np.int64)
    np.cumsum(np.bincount(tid_arr, minlength=len(vocab)), out=indptr[1:])
    doc_ids = np.asarray(doc_col, dtype=np.int64)[order]
    tfs = np.asarray(tf_col, dtype=np.float64)[order]
    return RetrievalIndex(vocab, indptr, doc_ids, tfs, lengths, origins, k1, b)


def bm25_score(idx: RetrievalIndex, query: str, entry: int) -> float:
    if not (0 <= entry < idx.doc_count):
        raise EntryNotFound(f"entry {entry} not in index of {idx.doc_count} entries")
    k1, b = idx.bm25_params
    dl = idx.doc_lengths[entry]
    total = 0.0
    for term in sorted(set(terms(query))):
        t = idx.vocab.get(term)
        if t is None:
            continue
        s, e = idx.indptr[t], idx.indptr[t + 1]
        p = s + int(np.searchsorted(idx.doc_ids[s:e], entry))
        if p == e or idx.doc_ids[p] != entry:
            continue
        tf = idx.tfs[p]
        total += idx.idf(term) * (tf * (k1 + 1.0)) / (tf + k1 * (1.0 - b + b * dl / idx.avg_doc_length))
    return float(total)


def retrieve_topk(
    idx: RetrievalIndex, query: str, k: int, exclude_origin: int | None = None, kernel=None
) -> RetrievalResult:
    """Top-k entries with positive score; ties go to the lower entry id.

    ``exclude_origin`` drops entries built from that training record, so a
    record never retrieves itself.
    """
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or k < 1:
        raise InvalidK(f"k must be an integer >= 1, got {k!r}")
    scores = idx.score_all(query, kernel)
    if exclude_origin is not None and idx.doc_count:
        scores[idx.origins == exclude_origin] = 0.0
    cand = np.flatnonzero(scores > 0.0)
    if cand.size > k:
        # keep everything tied with the k-th best, then order exactly
        kth = np.partition(scores[cand], cand.size - k)[cand.size - k]
        cand = cand[scores[cand] >= kth]
    order = np.lexsort((cand, -scores[cand]))[:k]
    hits = tuple((int(cand[i]), float(scores[cand[i]])) for i in order)
    return RetrievalResult(hits, int(k))


def write_index_snapshot(idx: RetrievalIndex, path) -> None:
    atomic_write_text(path, json.dumps(idx.to_json(), ensure_ascii=False, sort_keys=True))


def read_index_snapshot(path) -> RetrievalIndex:
    try:
        with open(path, encoding="utf-8") as fh:
            return RetrievalIndex.from_json(json.load(fh))
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad index snapshot ({exc})", path=path) from None


def brute_force_topk(texts: Sequence[str], query: str, k: int, k1: float = DEFAULT_K1, b: float = DEFAULT_B):
    """Reference linear scan; kept for benchmarks. Tests carry their own copy."""
    docs = [Counter(terms(t)) for t in texts]
    lens = [sum(c.values()) for c in docs]
    n = len(docs)
    avgdl = sum(lens) / n if n else 0.0
    df = Counter(t for c in docs for t in c)
    q = sorted(set(terms(query)))
    scored = []
    for i, c in enumerate(docs):
        s = 0.0
        for t in q:
            if t in c:
                idf = math.log((n - df[t] + 0.5) / (df[t] + 0.5) + 1.0)
                s += idf * (c[t] * (k1 + 1)) / (c[t] + k1 * (1 - b + b * lens[i] / avgdl))
        if s > 0:
            scored.append((i, s))
    scored.sort(key=lambda x: (-x[1], x[0]))
    return scored[:k]
