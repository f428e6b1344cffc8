"""Answer extraction, QA metrics, and confidence-based rejection.

The answer is the context span aligned to the wh node, trimmed of leading
function words. Confidence is the worst alignment gap (WAG): the largest
difference between the instance-wide best pair score and any aligned pair's
score; smaller means more trustworthy. ``wag_min`` carries the min-gap
variant alongside for auditability.
"""

from __future__ import annotations

import json
import math
import re
import string
from collections import Counter
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from .aligner import Alignment
from .core import Span

TRIM_TOKENS = frozenset({"on", "in", "at", "of", "to", "by", "for", "the", "a", "an"})


def extract_answer(wh_aligned: Span, context_tokens: tuple[str, ...]) -> Span:
    """Trim leading function words off the wh-aligned span.

    Trimming repeats while the first token is in the closed list but never
    empties the span.
    """
    start, end = wh_aligned.start, wh_aligned.end
    while end - start > 1 and context_tokens[start].lower() in TRIM_TOKENS:
        start += 1
    return Span(start, end)


def ans_in_wh(wh_aligned: Span, gold_answers: Iterable[Span]) -> bool:
    """True when some gold answer span lies inside the untrimmed wh-aligned span."""
    return any(wh_aligned.contains(g) for g in gold_answers)


_ARTICLES = re.compile(r"\b(a|an|the)\b")
_PUNCT = set(string.punctuation)


def normalize_answer(text: str) -> str:
    """Lowercase, drop punctuation and articles, collapse whitespace."""
    text = "".join(ch for ch in text.lower() if ch not in _PUNCT)
    text = _ARTICLES.sub(" ", text)
    return " ".join(text.split())


def token_f1(predicted: str, golds: Sequence[str]) -> float:
    """Standard extractive-QA token F1: bag-of-token overlap, max over golds."""
    if not golds:
        raise ValueError("token_f1 needs at least one gold string")
    pred_tokens = normalize_answer(predicted).split()
    best = 0.0
    for gold in golds:
        gold_tokens = normalize_answer(gold).split()
        if not pred_tokens or not gold_tokens:
            best = max(best, float(pred_tokens == gold_tokens))
            continue
        common = Counter(pred_tokens) & Counter(gold_tokens)
        same = sum(common.values())
        if same == 0:
            continue
        precision = same / len(pred_tokens)
        recall = same / len(gold_tokens)
        best = max(best, 2 * precision * recall / (precision + recall))
    return best


def wag_values(pairs: Iterable[tuple[int, int]], scores: np.ndarray) -> tuple[float, float]:
    """(max-gap, min-gap) between the instance-wide best score and aligned pairs.

    The max-gap is the primary confidence signal (gap of the worst aligned
    pair); the min-gap variant is reported alongside.
    """
    scores = np.asarray(scores, dtype=np.float64)
    s_max = float(scores.max())
    gaps = [s_max - float(scores[q, c]) for q, c in pairs]
    if not gaps:
        raise ValueError("wag needs a nonempty alignment")
    return max(gaps), min(gaps)


@dataclass(frozen=True)
class PredictionRecord:
    example_id: str
    rejected_constraint: bool = False
    relaxed: bool = False
    alignment: Alignment | None = None
    wh_node: int | None = None
    wh_aligned_span: Span | None = None
    answer_span: Span | None = None
    answer_text: str | None = None
    ans_in_wh: bool | None = None
    token_f1: float | None = None
    wag: float | None = None
    wag_min: float | None = None
    rejected_wag: bool = False
    partial: tuple[tuple[int, int], ...] = ()


def record_to_json(rec: PredictionRecord) -> dict:
    out: dict = {
        "id": rec.example_id,
        "rejected_constraint": rec.rejected_constraint,
        "relaxed": rec.relaxed,
        "rejected_wag": rec.rejected_wag,
    }
    if rec.alignment is not None:
        out["pairs"] = [[q, c, s] for q, c, s in rec.alignment.per_pair_scores]
        out["total_score"] = rec.alignment.total_score
        out["wh_node"] = rec.wh_node
        out["wh_aligned_span"] = [rec.wh_aligned_span.start, rec.wh_aligned_span.end]
        out["answer_span"] = [rec.answer_span.start, rec.answer_span.end]
        out["answer_text"] = rec.answer_text
        out["wag"] = rec.wag
        out["wag_min"] = rec.wag_min
        if rec.ans_in_wh is not None:
            out["ans_in_wh"] = rec.ans_in_wh
        if rec.token_f1 is not None:
            out["token_f1"] = rec.token_f1
    else:
        out["partial"] = [list(p) for p in rec.partial]
    return out


def record_from_json(obj: dict) -> PredictionRecord:
    if "pairs" in obj:
        pairs = tuple((q, c) for q, c, _ in obj["pairs"])
        per = tuple((q, c, float(s)) for q, c, s in obj["pairs"])
        alignment = Alignment(pairs, per, float(obj["total_score"]))
        return PredictionRecord(
            example_id=obj["id"],
            rejected_constraint=False,
            relaxed=bool(obj.get("relaxed", False)),
            alignment=alignment,
            wh_node=obj.get("wh_node"),
            wh_aligned_span=Span(*obj["wh_aligned_span"]),
            answer_span=Span(*obj["answer_span"]),
            answer_text=obj.get("answer_text"),
            ans_in_wh=obj.get("ans_in_wh"),
            token_f1=obj.get("token_f1"),
            wag=obj.get("wag"),
            wag_min=obj.get("wag_min"),
            rejected_wag=bool(obj.get("rejected_wag", False)),
        )
    return PredictionRecord(
        example_id=obj["id"],
        rejected_constraint=True,
        relaxed=bool(obj.get("relaxed", False)),
        partial=tuple(tuple(p) for p in obj.get("partial", [])),
    )


def save_predictions(records: Iterable[PredictionRecord], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in sorted(records, key=lambda r: r.example_id):
            fh.write(json.dumps(record_to_json(rec), sort_keys=True) + "\n")


def load_predictions(path) -> list[PredictionRecord]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                records.append(record_from_json(json.loads(line)))
    return records


def _effective_f1(rec: PredictionRecord) -> float:
    if rec.rejected_constraint:
        return 0.0
    if rec.token_f1 is None:
        raise ValueError(f"{rec.example_id}: token_f1 missing on a non-rejected record")
    return rec.token_f1


def _confidence_order(records: Sequence[PredictionRecord]) -> list[PredictionRecord]:
    # Smaller WAG first (more confident); constraint rejections last.
    return sorted(
        records,
        key=lambda r: (1, 0.0, r.example_id) if r.rejected_constraint else (0, r.wag, r.example_id),
    )


def coverage_curve(records: Sequence[PredictionRecord], points: int = 10) -> list[tuple[float, float]]:
    """Mean F1 over the most-confident prefix at coverage 1/points .. 1.0.

    Constraint-rejected records count as F1 = 0 and sort after every scored
    record.
    """
    if not records:
        raise ValueError("coverage_curve needs at least one record")
    ordered = _confidence_order(records)
    f1s = [_effective_f1(r) for r in ordered]
    curve = []
    for step in range(1, points + 1):
        fraction = step / points
        take = max(1, math.ceil(fraction * len(f1s)))
        curve.append((fraction, float(np.mean(f1s[:take]))))
    return curve


def apply_rejection(records: Sequence[PredictionRecord], wag_threshold: float) -> tuple[list[PredictionRecord], dict]:
    """Flag records whose WAG exceeds the threshold; summarize the trade-off."""
    if wag_threshold < 0:
        raise ValueError("wag_threshold must be >= 0")
    flagged = []
    for rec in records:
        reject = not rec.rejected_constraint and rec.wag is not None and rec.wag > wag_threshold
        flagged.append(replace(rec, rejected_wag=reject))
    covered = [r for r in flagged if not r.rejected_constraint and not r.rejected_wag]
    summary = {
        "threshold": wag_threshold,
        "count": len(flagged),
        "covered": len(covered),
        "coverage": len(covered) / len(flagged) if flagged else 0.0,
        "rejected_wag": sum(r.rejected_wag for r in flagged),
        "rejected_constraint": sum(r.rejected_constraint for r in flagged),
        "f1_covered": float(np.mean([_effective_f1(r) for r in covered])) if covered else None,
    }
    return flagged, summary


def metrics_report(records: Sequence[PredictionRecord], corpus_size: int | None = None) -> dict:
    """Aggregate metrics; rejected examples score 0 in full-coverage means."""
    f1s = [_effective_f1(r) for r in records]
    in_wh = [bool(r.ans_in_wh) if not r.rejected_constraint else False for r in records]
    return {
        "count": corpus_size if corpus_size is not None else len(records),
        "usable": len(records),
        "rejected_constraint": sum(r.rejected_constraint for r in records),
        "relaxed": sum(r.relaxed for r in records),
        "mean_f1": float(np.mean(f1s)) if f1s else 0.0,
        "ans_in_wh_rate": float(np.mean(in_wh)) if in_wh else 0.0,
        "curve": [[cov, f1] for cov, f1 in coverage_curve(records)] if records else [],
    }


def curve_to_csv(curve: Sequence[tuple[float, float]], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("coverage,f1\n")
        for cov, f1 in curve:
            fh.write(f"{cov},{f1}\n")
