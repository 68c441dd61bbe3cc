"""BM25 accumulation kernels.

Two interchangeable implementations of the same loop: a numba-compiled one and
a vectorized numpy one. ``score_all`` is bound at import time to numba when it
is importable and ``RAP_DISABLE_NUMBA`` is unset (or ``0``), else to numpy.

Both evaluate each term contribution with the same expression and accumulate
terms in the same order, so they agree bit for bit.
"""
from __future__ import annotations

import os

import numpy as np

_disabled = os.environ.get("RAP_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

try:
    if _disabled:
        raise ImportError("disabled by RAP_DISABLE_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False


def score_all_numpy(q_idf, q_start, q_end, doc_ids, tfs, doc_lens, avgdl, k1, b, n_docs):
    scores = np.zeros(n_docs, dtype=np.float64)
    for j in range(q_idf.shape[0]):
        s, e = q_start[j], q_end[j]
        d = doc_ids[s:e]
        tf = tfs[s:e]
        # doc ids within one posting list are unique, so fancy-index += is safe
        scores[d] += q_idf[j] * (tf * (k1 + 1.0)) / (tf + k1 * (1.0 - b + b * doc_lens[d] / avgdl))
    return scores


def _score_all_loop(q_idf, q_start, q_end, doc_ids, tfs, doc_lens, avgdl, k1, b, n_docs):
    scores = np.zeros(n_docs, dtype=np.float64)
    for j in range(q_idf.shape[0]):
        idf = q_idf[j]
        for p in range(q_start[j], q_end[j]):
            d = doc_ids[p]
            tf = tfs[p]
            scores[d] += idf * (tf * (k1 + 1.0)) / (tf + k1 * (1.0 - b + b * doc_lens[d] / avgdl))
    return scores


if HAVE_NUMBA:
    score_all_numba = njit(cache=True, nogil=True)(_score_all_loop)
    score_all = score_all_numba
    BACKEND = "numba"
else:
    score_all_numba = None
    score_all = score_all_numpy
    BACKEND = "numpy"

KERNELS = {"numpy": score_all_numpy}
if score_all_numba is not None:
    KERNELS["numba"] = score_all_numba
