#!/usr/bin/env python3
"""Benchmark the compiled beam-search kernel against the pure-Python twin.

Runs the same constrained searches through ``alignqa._beam`` (Cython) and
``alignqa._beam_py`` and reports per-instance timings plus the end-to-end
prediction throughput for each backend.

    python3 benchmarks/bench_beam.py [--searches 300] [--predict 200]
"""

import argparse
import math
import time

import numpy as np

from alignqa import _beam_py
from alignqa.aligner import ConstraintConfig, _adjacency_csr, allowed_mask, within_k_mask
from alignqa.graph import build_graph, build_question_graph
from alignqa.scoring import LinearScorer, score_matrix
from alignqa.synthetic import random_instance, throughput_corpus

try:
    from alignqa import _beam as _beam_native
except ImportError:
    _beam_native = None


def search_inputs(rng, m_max, n_max, k, beam_size):
    q_graph, c_graph, scores = random_instance(rng, m_max=m_max, n_max=n_max)
    cfg = ConstraintConfig(k=k, beam_size=beam_size)
    indptr, indices = _adjacency_csr(q_graph)
    m = len(q_graph)
    empty = np.full(m, -1, np.int32)
    return (
        np.ascontiguousarray(scores),
        allowed_mask(q_graph, c_graph, cfg),
        indptr,
        indices,
        within_k_mask(c_graph, cfg.k),
        beam_size,
        empty,
        empty.copy(),
    )


def bench_kernels(n_searches: int):
    rng = np.random.default_rng(0)
    sizes = [(4, 8, 3, 10), (8, 30, 3, 20), (10, 60, 3, 20), (10, 60, math.inf, 20)]
    print(f"{'instance (m,n,k,b)':>24} {'pure':>12} {'native':>12} {'speedup':>9}")
    for m_max, n_max, k, b in sizes:
        instances = [search_inputs(rng, m_max, n_max, k, b) for _ in range(n_searches)]
        t0 = time.perf_counter()
        pure = [_beam_py.run_beam(*args) for args in instances]
        t_pure = time.perf_counter() - t0
        if _beam_native is None:
            print(f"{f'({m_max},{n_max},{k},{b})':>24} {t_pure:>10.3f}s {'(not built)':>12}")
            continue
        t0 = time.perf_counter()
        native = [_beam_native.run_beam(*args) for args in instances]
        t_native = time.perf_counter() - t0
        assert pure == native, "kernel outputs diverged"
        print(
            f"{f'({m_max},{n_max},{k},{b})':>24} {t_pure:>10.3f}s {t_native:>10.3f}s "
            f"{t_pure / t_native:>8.1f}x"
        )


def bench_predict(count: int):
    """End-to-end predict throughput: graphs + features + search per example."""
    corpus = throughput_corpus(count, seed=7)
    model = LinearScorer({"jaccard": 1.0, "overlap": 0.4, "exact_match": 0.8, "bias": 0.05})
    cfg = ConstraintConfig(k=3, beam_size=20)

    prepared = []
    for ex in corpus:
        q_graph = build_question_graph(ex.question)
        c_graph = build_graph(ex.context)
        scores = score_matrix(model, ex, q_graph, c_graph)
        indptr, indices = _adjacency_csr(q_graph)
        prepared.append(
            (
                scores,
                allowed_mask(q_graph, c_graph, cfg),
                indptr,
                indices,
                within_k_mask(c_graph, cfg.k),
                cfg.beam_size,
                np.full(len(q_graph), -1, np.int32),
                np.full(len(q_graph), -1, np.int32),
            )
        )

    print(f"\nsearch-only throughput over {count} prepared examples (m<=10, n<=60, k=3, b=20):")
    t0 = time.perf_counter()
    for args in prepared:
        _beam_py.run_beam(*args)
    t_pure = time.perf_counter() - t0
    print(f"  pure:   {t_pure:.3f}s ({count / t_pure:.0f} examples/s)")
    if _beam_native is not None:
        t0 = time.perf_counter()
        for args in prepared:
            _beam_native.run_beam(*args)
        t_native = time.perf_counter() - t0
        print(f"  native: {t_native:.3f}s ({count / t_native:.0f} examples/s, {t_pure / t_native:.1f}x)")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--searches", type=int, default=300, help="searches per size bucket")
    parser.add_argument("--predict", type=int, default=200, help="examples for the end-to-end pass")
    args = parser.parse_args()
    if _beam_native is None:
        print("compiled kernel not available; timing the pure backend only\n")
    bench_kernels(args.searches)
    bench_predict(args.predict)


if __name__ == "__main__":
    main()
