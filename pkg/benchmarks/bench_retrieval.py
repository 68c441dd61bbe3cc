"""Compare BM25 scoring backends on a synthetic store.

    python benchmarks/bench_retrieval.py --entries 10000 --queries 200

Times retrieve_topk with each available kernel (numba, numpy) plus a
pure-Python linear scan, and checks all three return the same ranking.
"""
import argparse
import random
import statistics
import time

from rap.retrieval import build_index, retrieve_topk
from rap.retrieval.index import brute_force_topk
from rap.retrieval.kernels import KERNELS
from rap.store import ReferenceStore, StoreEntry


def make_store(n, vocab, max_len, seed):
    rng = random.Random(seed)
    words = [f"w{i}" for i in range(vocab)]
    entries = [
        StoreEntry(i, " ".join(rng.choices(words, k=rng.randint(1, max_len))), ("x",), ("x",))
        for i in range(n)
    ]
    return ReferenceStore(tuple(entries), "bench"), words, rng


def time_calls(fn, queries):
    out = []
    for q in queries:
        t0 = time.perf_counter()
        fn(q)
        out.append(time.perf_counter() - t0)
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--entries", type=int, default=10_000)
    ap.add_argument("--vocab", type=int, default=5_000)
    ap.add_argument("--max-len", type=int, default=30)
    ap.add_argument("--queries", type=int, default=200)
    ap.add_argument("--k", type=int, default=8)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--brute-queries", type=int, default=10, help="linear scan is slow; time fewer queries")
    args = ap.parse_args()

    store, words, rng = make_store(args.entries, args.vocab, args.max_len, args.seed)
    t0 = time.perf_counter()
    idx = build_index(store)
    print(f"index: {args.entries} entries, {len(idx.vocab)} terms, built in {time.perf_counter() - t0:.3f}s")
    queries = [" ".join(rng.choices(words, k=rng.randint(5, 30))) for _ in range(args.queries)]

    rankings = {}
    for name, kernel in KERNELS.items():
        retrieve_topk(idx, queries[0], args.k, kernel=kernel)  # compile / warm caches
        times = time_calls(lambda q: retrieve_topk(idx, q, args.k, kernel=kernel), queries)
        rankings[name] = [retrieve_topk(idx, q, args.k, kernel=kernel).ids for q in queries]
        print(f"{name:>7}: median {statistics.median(times) * 1e3:8.3f} ms  "
              f"p95 {sorted(times)[int(0.95 * len(times))] * 1e3:8.3f} ms")

    texts = [e.text for e in store]
    few = queries[: args.brute_queries]
    times = time_calls(lambda q: brute_force_topk(texts, q, args.k), few)
    print(f"{'brute':>7}: median {statistics.median(times) * 1e3:8.3f} ms  ({len(few)} queries)")

    brute = [[i for i, _ in brute_force_topk(texts, q, args.k)] for q in few]
    for name, ranks in rankings.items():
        assert ranks[: len(few)] == brute, f"{name} disagrees with linear scan"
    if len(rankings) > 1:
        assert len({tuple(map(tuple, r)) for r in rankings.values()}) == 1, "kernels disagree"
    print("rankings agree across backends")


if __name__ == "__main__":
    main()
