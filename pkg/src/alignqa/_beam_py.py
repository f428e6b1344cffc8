"""Pure-Python beam-search kernel.

Reference implementation of the alignment search; ``_beam.pyx`` is the
compiled twin and must stay bit-for-bit equivalent (same candidate rule,
same canonical score accumulation order, same tie-breaking). Hypothesis
assignment vectors use the sentinel ``n`` (number of context nodes) for
unassigned positions so plain tuple comparison gives the documented
lexicographic tie-break.

Scores are always recomputed canonically (sum over question nodes in id
order) rather than accumulated incrementally: float addition is not
associative, and duplicate hypotheses reached via different extension
orders must carry identical scores for merging to work.
"""

from __future__ import annotations


def run_beam(scores, allowed, q_indptr, q_indices, within_k, beam_size, forced, gold):
    """Run constrained beam search over alignment hypotheses.

    Arrays (numpy or nested sequences):
      scores    (m, n) float64 pair scores
      allowed   (m, n) uint8   per-pair constraint mask (entity/kind)
      q_indptr  (m+1,) int32   CSR adjacency of the question graph
      q_indices (.,)   int32
      within_k  (n, n) uint8   1 where context distance <= k (all ones for k=inf)
      forced    (m,)   int32   seed assignment, -1 where free
      gold      (m,)   int32   loss-augment target, -1 for no penalty

    Returns ``(complete, assignment, score)`` where assignment uses -1 for
    unassigned positions and score includes augment bonuses. When the beam
    dies, ``complete`` is False and the best partial hypothesis is returned.
    """
    S = [list(map(float, row)) for row in scores]
    m = len(S)
    n = len(S[0]) if m else 0
    A = [list(map(int, row)) for row in allowed]
    W = [list(map(int, row)) for row in within_k]
    indptr = list(map(int, q_indptr))
    indices = list(map(int, q_indices))
    forced = list(map(int, forced))
    gold = list(map(int, gold))

    def canon(vec):
        s = 0.0
        for j in range(m):
            cj = vec[j]
            if cj != n:
                s += S[j][cj]
                if gold[j] >= 0 and cj != gold[j]:
                    s += 1.0
        return s

    def finish(vec, score, complete):
        return complete, [-1 if c == n else c for c in vec], score

    if m == 0:
        return True, [], 0.0

    if any(c >= 0 for c in forced):
        seed = tuple(n if c < 0 else c for c in forced)
        beam = [(canon(seed), seed)]
        assigned = sum(1 for c in seed if c != n)
    else:
        pool = {}
        for q in range(m):
            row = A[q]
            for c in range(n):
                if row[c]:
                    vec = tuple(c if j == q else n for j in range(m))
                    pool[vec] = canon(vec)
        if not pool:
            return finish((n,) * m, 0.0, False)
        ranked = sorted(pool.items(), key=lambda kv: (-kv[1], kv[0]))
        beam = [(s, vec) for vec, s in ranked[:beam_size]]
        assigned = 1

    while assigned < m:
        pool = {}
        for _, vec in beam:
            for q in range(m):
                if vec[q] != n:
                    continue
                # Locality: candidates must be within k of every aligned
                # question-graph neighbor; a node with no aligned neighbor
                # falls back to "within k of any aligned context node".
                nb_assigned = [vec[nb] for nb in indices[indptr[q] : indptr[q + 1]] if vec[nb] != n]
                if nb_assigned:
                    cand = [c for c in range(n) if all(W[cb][c] for cb in nb_assigned)]
                else:
                    aligned_cs = [c for c in vec if c != n]
                    cand = [c for c in range(n) if any(W[cb][c] for cb in aligned_cs)]
                row = A[q]
                for c in cand:
                    if not row[c]:
                        continue
                    new = vec[:q] + (c,) + vec[q + 1 :]
                    if new not in pool:
                        pool[new] = canon(new)
        if not pool:
            best_score, best_vec = beam[0]
            return finish(best_vec, best_score, False)
        ranked = sorted(pool.items(), key=lambda kv: (-kv[1], kv[0]))
        beam = [(s, vec) for vec, s in ranked[:beam_size]]
        assigned += 1

    best_score, best_vec = beam[0]
    return finish(best_vec, best_score, True)
