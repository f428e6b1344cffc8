"""End-to-end prediction: graphs, scoring, constrained search, records."""

from __future__ import annotations

import multiprocessing
from functools import partial

from .aligner import ConstraintConfig, beam_search
from .core import AnnotatedExample
from .evaluation import PredictionRecord, ans_in_wh, extract_answer, token_f1, wag_values
from .graph import Discarded, build_graph, build_question_graph, filter_usable
from .scoring import ScorerModel, score_matrix


def predict_example(
    ex: AnnotatedExample,
    model: ScorerModel,
    cfg: ConstraintConfig,
    relax_on_reject: bool = False,
) -> PredictionRecord:
    """Align one usable example and turn the result into a record.

    A constraint dead-end yields a rejection record unless
    ``relax_on_reject`` is set, in which case the search is retried with
    k=inf and the output flagged ``relaxed``.
    """
    q_graph = build_question_graph(ex.question)
    c_graph = build_graph(ex.context)
    scores = score_matrix(model, ex, q_graph, c_graph)

    result = beam_search(q_graph, c_graph, scores, cfg)
    relaxed = False
    if result.rejected and relax_on_reject:
        retry = beam_search(q_graph, c_graph, scores, cfg.relaxed())
        if not retry.rejected:
            result, relaxed = retry, True

    if result.rejected:
        return PredictionRecord(ex.id, rejected_constraint=True, partial=result.partial)

    alignment = result.alignment
    wh = q_graph.wh_node
    wh_aligned = c_graph.nodes[alignment.mapping[wh]].span
    answer_span = extract_answer(wh_aligned, ex.context.tokens)
    answer_text = answer_span.text(ex.context.tokens)
    wag, wag_min = wag_values(alignment.pairs, scores)
    return PredictionRecord(
        example_id=ex.id,
        relaxed=relaxed,
        alignment=alignment,
        wh_node=wh,
        wh_aligned_span=wh_aligned,
        answer_span=answer_span,
        answer_text=answer_text,
        ans_in_wh=ans_in_wh(wh_aligned, ex.answers) if ex.answers else None,
        token_f1=token_f1(answer_text, ex.answer_texts()) if ex.answers else None,
        wag=wag,
        wag_min=wag_min,
    )


def predict_corpus(
    examples,
    model: ScorerModel,
    cfg: ConstraintConfig,
    relax_on_reject: bool = False,
    workers: int = 1,
) -> tuple[list[PredictionRecord], list[Discarded]]:
    """Predict every usable example; output is sorted by example id
    regardless of worker parallelism."""
    usable, discarded = filter_usable(examples)
    fn = partial(predict_example, model=model, cfg=cfg, relax_on_reject=relax_on_reject)
    if workers <= 1 or len(usable) < 2:
        records = [fn(ex) for ex in usable]
    else:
        chunk = max(1, len(usable) // (workers * 4))
        with multiprocessing.Pool(workers) as pool:
            records = pool.map(fn, usable, chunksize=chunk)
    records.sort(key=lambda r: r.example_id)
    return records, discarded
