# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled beam-search kernel.

Bit-for-bit twin of ``_beam_py.run_beam``: identical candidate rule,
canonical score accumulation order, tie-breaking, and duplicate merging.
Any semantic change must land in both files; ``tests/test_kernel_parity``
compares the two on random instances.
"""

import numpy as np

cimport cython


cdef inline double _canon_ext(const double[:, ::1] scores, const int[::1] gold,
                              const int[:, ::1] cur, Py_ssize_t parent,
                              Py_ssize_t q, int c, Py_ssize_t m, int sent) noexcept nogil:
    # Score of (parent hypothesis + q->c), re-summed in question-node order
    # so duplicates reached via different orders compare equal.
    cdef double s = 0.0
    cdef Py_ssize_t j
    cdef int cj
    for j in range(m):
        if j == q:
            cj = c
        elif parent >= 0:
            cj = cur[parent, j]
        else:
            cj = sent
        if cj != sent:
            s += scores[j, cj]
            if gold[j] >= 0 and cj != gold[j]:
                s += 1.0
    return s


cdef inline double _canon_vec(const double[:, ::1] scores, const int[::1] gold,
                              const int[::1] vec, Py_ssize_t m, int sent) noexcept nogil:
    cdef double s = 0.0
    cdef Py_ssize_t j
    cdef int cj
    for j in range(m):
        cj = vec[j]
        if cj != sent:
            s += scores[j, cj]
            if gold[j] >= 0 and cj != gold[j]:
                s += 1.0
    return s


cdef Py_ssize_t _select(object ext_score_np, int[::1] ext_parent, int[::1] ext_q,
                        int[::1] ext_c, double[::1] ext_score, Py_ssize_t cnt,
                        int[:, ::1] cur, int[:, ::1] nxt, double[::1] nxt_score,
                        int[::1] scratch, Py_ssize_t m, int sent, Py_ssize_t beam_size):
    """Order extensions by (-score, assignment lex), merge duplicates, keep top b."""
    cdef Py_ssize_t i, j, kept, idx, a, b
    cdef int p, eq, ec
    cdef bint dup

    sc = ext_score_np[:cnt]
    order_np = np.argsort(-sc, kind="stable").astype(np.intp)

    # Equal-score runs are re-sorted lexicographically on the materialized
    # assignment vectors; with continuous scores runs are almost never hit.
    sorted_sc = sc[order_np]
    if cnt > 1:
        neq = sorted_sc[1:] != sorted_sc[:-1]
        if neq.size and not neq.all():
            starts = np.flatnonzero(np.concatenate(([True], neq)))
            ends = np.concatenate((starts[1:], [cnt]))
            for ri in np.flatnonzero(ends - starts > 1):
                a, b = starts[ri], ends[ri]
                V = np.empty((b - a, m), dtype=np.int32)
                _materialize_run(order_np, V, ext_parent, ext_q, ext_c, cur, a, b, m, sent)
                lex = np.lexsort(V.T[::-1])
                order_np[a:b] = order_np[a:b][lex]

    cdef Py_ssize_t[::1] order = order_np
    kept = 0
    for i in range(cnt):
        idx = order[i]
        p = ext_parent[idx]
        eq = ext_q[idx]
        ec = ext_c[idx]
        for j in range(m):
            if j == eq:
                scratch[j] = ec
            elif p >= 0:
                scratch[j] = cur[p, j]
            else:
                scratch[j] = sent
        if kept > 0 and ext_score[idx] == nxt_score[kept - 1]:
            dup = True
            for j in range(m):
                if scratch[j] != nxt[kept - 1, j]:
                    dup = False
                    break
            if dup:
                continue
        for j in range(m):
            nxt[kept, j] = scratch[j]
        nxt_score[kept] = ext_score[idx]
        kept += 1
        if kept == beam_size:
            break
    return kept


cdef void _materialize_run(Py_ssize_t[::1] order, int[:, ::1] out, int[::1] ext_parent,
                           int[::1] ext_q, int[::1] ext_c, int[:, ::1] cur,
                           Py_ssize_t a, Py_ssize_t b, Py_ssize_t m, int sent) noexcept:
    cdef Py_ssize_t r, j, idx
    cdef int p, eq, ec
    for r in range(a, b):
        idx = order[r]
        p = ext_parent[idx]
        eq = ext_q[idx]
        ec = ext_c[idx]
        for j in range(m):
            if j == eq:
                out[r - a, j] = ec
            elif p >= 0:
                out[r - a, j] = cur[p, j]
            else:
                out[r - a, j] = sent


@cython.boundscheck(False)
@cython.wraparound(False)
def run_beam(object scores_in, object allowed_in, object q_indptr_in, object q_indices_in,
             object within_k_in, int beam_size, object forced_in, object gold_in):
    """Compiled mirror of :func:`alignqa._beam_py.run_beam` (same contract)."""
    scores_np = np.ascontiguousarray(scores_in, dtype=np.float64)
    allowed_np = np.ascontiguousarray(allowed_in, dtype=np.uint8)
    within_np = np.ascontiguousarray(within_k_in, dtype=np.uint8)
    indptr_np = np.ascontiguousarray(q_indptr_in, dtype=np.int32)
    indices_np = np.ascontiguousarray(q_indices_in, dtype=np.int32)
    forced_np = np.ascontiguousarray(forced_in, dtype=np.int32)
    gold_np = np.ascontiguousarray(gold_in, dtype=np.int32)

    cdef const double[:, ::1] scores = scores_np
    cdef const unsigned char[:, ::1] allowed = allowed_np
    cdef const unsigned char[:, ::1] within_k = within_np
    cdef const int[::1] indptr = indptr_np
    cdef const int[::1] indices = indices_np
    cdef const int[::1] forced = forced_np
    cdef const int[::1] gold = gold_np

    cdef Py_ssize_t m = scores.shape[0]
    cdef Py_ssize_t n = scores.shape[1]
    cdef int sent = <int>n
    cdef Py_ssize_t h, q, c, j, ptr, cnt, kept, assigned
    cdef int cb
    cdef bint has_nb, any_forced

    if m == 0:
        return True, [], 0.0

    cur_np = np.empty((beam_size, m), dtype=np.int32)
    nxt_np = np.empty((beam_size, m), dtype=np.int32)
    cur_score_np = np.empty(beam_size, dtype=np.float64)
    nxt_score_np = np.empty(beam_size, dtype=np.float64)
    cdef int[:, ::1] cur = cur_np
    cdef int[:, ::1] nxt = nxt_np
    cdef double[::1] cur_score = cur_score_np
    cdef double[::1] nxt_score = nxt_score_np
    cdef Py_ssize_t cur_cnt = 0

    cdef Py_ssize_t cap = beam_size * m * n
    if cap < m * n:
        cap = m * n
    ext_parent_np = np.empty(cap, dtype=np.int32)
    ext_q_np = np.empty(cap, dtype=np.int32)
    ext_c_np = np.empty(cap, dtype=np.int32)
    ext_score_np = np.empty(cap, dtype=np.float64)
    cdef int[::1] ext_parent = ext_parent_np
    cdef int[::1] ext_q = ext_q_np
    cdef int[::1] ext_c = ext_c_np
    cdef double[::1] ext_score = ext_score_np

    cand_np = np.empty(n, dtype=np.uint8)
    scratch_np = np.empty(m, dtype=np.int32)
    cdef unsigned char[::1] cand = cand_np
    cdef int[::1] scratch = scratch_np

    any_forced = False
    for j in range(m):
        if forced[j] >= 0:
            any_forced = True
            break

    if any_forced:
        assigned = 0
        for j in range(m):
            if forced[j] >= 0:
                cur[0, j] = forced[j]
                assigned += 1
            else:
                cur[0, j] = sent
        cur_score[0] = _canon_vec(scores, gold, cur[0], m, sent)
        cur_cnt = 1
    else:
        cnt = 0
        for q in range(m):
            for c in range(n):
                if allowed[q, c]:
                    ext_parent[cnt] = -1
                    ext_q[cnt] = <int>q
                    ext_c[cnt] = <int>c
                    ext_score[cnt] = _canon_ext(scores, gold, cur, -1, q, <int>c, m, sent)
                    cnt += 1
        if cnt == 0:
            return False, [-1] * m, 0.0
        cur_cnt = _select(ext_score_np, ext_parent, ext_q, ext_c, ext_score, cnt,
                          nxt, cur, cur_score, scratch, m, sent, beam_size)
        assigned = 1

    while assigned < m:
        cnt = 0
        for h in range(cur_cnt):
            for q in range(m):
                if cur[h, q] != sent:
                    continue
                has_nb = False
                for j in range(n):
                    cand[j] = 1
                for ptr in range(indptr[q], indptr[q + 1]):
                    cb = cur[h, indices[ptr]]
                    if cb != sent:
                        has_nb = True
                        for j in range(n):
                            cand[j] &= within_k[cb, j]
                if not has_nb:
                    for j in range(n):
                        cand[j] = 0
                    for j in range(m):
                        cb = cur[h, j]
                        if cb != sent:
                            for c in range(n):
                                cand[c] |= within_k[cb, c]
                for c in range(n):
                    if cand[c] and allowed[q, c]:
                        ext_parent[cnt] = <int>h
                        ext_q[cnt] = <int>q
                        ext_c[cnt] = <int>c
                        ext_score[cnt] = _canon_ext(scores, gold, cur, h, q, <int>c, m, sent)
                        cnt += 1
        if cnt == 0:
            out = [-1 if cur[0, j] == sent else int(cur[0, j]) for j in range(m)]
            return False, out, float(cur_score[0])
        kept = _select(ext_score_np, ext_parent, ext_q, ext_c, ext_score, cnt,
                       cur, nxt, nxt_score, scratch, m, sent, beam_size)
        cur_np, nxt_np = nxt_np, cur_np
        cur_score_np, nxt_score_np = nxt_score_np, cur_score_np
        cur = cur_np
        nxt = nxt_np
        cur_score = cur_score_np
        nxt_score = nxt_score_np
        cur_cnt = kept
        assigned += 1

    out = [-1 if cur[0, j] == sent else int(cur[0, j]) for j in range(m)]
    return True, out, float(cur_score[0])
