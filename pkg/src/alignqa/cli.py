"""Command-line surface for batch experiments.

Subcommands: build-graphs, make-oracle, train, predict, evaluate, curve.
Every run is idempotent for fixed inputs and seed; outputs are written in
canonical (id-sorted) order regardless of worker parallelism.
"""

from __future__ import annotations

import dataclasses
import json
import math
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .aligner import ConstraintConfig
from .core import CorpusLoadResult, EmbeddingSidecar, load_corpus
from .evaluation import (
    ans_in_wh,
    apply_rejection,
    coverage_curve,
    curve_to_csv,
    load_predictions,
    metrics_report,
    save_predictions,
    token_f1,
)
from .graph import build_graph, build_question_graph, filter_usable, graph_to_dot, graph_to_text
from .pipeline import predict_corpus
from .scoring import LinearScorer, load_linear_model, save_linear_model
from .training import TrainConfig, build_oracle, prepare_training, train_local, train_ssvm


def _parse_k(ctx, param, value: str) -> int | float:
    if value.lower() in ("inf", "infinity"):
        return math.inf
    try:
        return int(value)
    except ValueError:
        raise click.BadParameter("k must be a positive integer or 'inf'")


def _load_corpus_or_die(path: str, tolerate_errors: bool = True) -> CorpusLoadResult:
    result = load_corpus(path)
    for err in result.errors:
        click.echo(f"corpus error: {err}", err=True)
    if result.errors and not tolerate_errors:
        raise click.ClickException(f"{len(result.errors)} corpus error(s) in {path}")
    return result


def _constraint_options(fn):
    fn = click.option("--k", default="3", callback=_parse_k, show_default=True, help="Locality radius; 'inf' disables.")(fn)
    fn = click.option("--beam-size", "-b", default=20, show_default=True, type=click.IntRange(min=1))(fn)
    fn = click.option("--entity-hard/--no-entity-hard", default=False, show_default=True, help="Hard entity match constraint.")(fn)
    fn = click.option("--kind-match/--no-kind-match", default=False, show_default=True, help="Restrict alignment to same-kind nodes.")(fn)
    return fn


def _scorer_options(fn):
    fn = click.option("--scorer", type=click.Choice(["linear", "embedding"]), default="linear", show_default=True)(fn)
    fn = click.option("--model", "model_path", type=click.Path(exists=True, dir_okay=False), default=None, help="Linear weights file.")(fn)
    fn = click.option("--sidecar", type=click.Path(exists=True, file_okay=False), default=None, help="Embedding sidecar directory.")(fn)
    return fn


def _make_scorer(scorer: str, model_path: str | None, sidecar: str | None):
    side = EmbeddingSidecar(sidecar) if sidecar else None
    if scorer == "embedding":
        if side is None:
            raise click.ClickException("the embedding scorer requires --sidecar")
        from .scoring import EmbeddingScorer

        return EmbeddingScorer(side)
    if model_path:
        return load_linear_model(model_path, sidecar=side)
    return LinearScorer(sidecar=side)


def _config_header(**fields) -> str:
    def enc(v):
        return "inf" if v == math.inf else v

    return "# config: " + json.dumps({k: enc(v) for k, v in sorted(fields.items())}, sort_keys=True)


@click.group()
@click.version_option(version=__version__, prog_name="alignqa")
def main():
    """Structured QA by constrained alignment of predicate-argument graphs."""


@main.command("build-graphs")
@click.option("--corpus", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(file_okay=False))
def cmd_build_graphs(corpus: str, out: str):
    """Export per-example graph dumps and a usability report."""
    result = _load_corpus_or_die(corpus)
    out_dir = Path(out)
    graphs_dir = out_dir / "graphs"
    graphs_dir.mkdir(parents=True, exist_ok=True)

    usable, discarded = filter_usable(result.examples)
    reasons: dict[str, int] = {}
    for d in discarded:
        reasons[d.reason] = reasons.get(d.reason, 0) + 1

    for ex in result.examples:
        cg = build_graph(ex.context)
        try:
            qg = build_question_graph(ex.question)
        except Exception:
            qg = build_graph(ex.question)
        text = "## question\n" + graph_to_text(qg, ex.question) + "\n## context\n" + graph_to_text(cg, ex.context)
        (graphs_dir / f"{ex.id}.txt").write_text(text, encoding="utf-8")
        (graphs_dir / f"{ex.id}.q.dot").write_text(graph_to_dot(qg, ex.question, "question"), encoding="utf-8")
        (graphs_dir / f"{ex.id}.c.dot").write_text(graph_to_dot(cg, ex.context, "context"), encoding="utf-8")

    report = {
        "examples": len(result.examples),
        "load_errors": [str(e) for e in result.errors],
        "usable": len(usable),
        "discarded": reasons,
    }
    (out_dir / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    click.echo(f"{len(result.examples)} example(s), {len(usable)} usable, {len(discarded)} discarded")
    if result.errors:
        raise click.ClickException(f"{len(result.errors)} corpus error(s); see report.json")


@main.command("make-oracle")
@click.option("--corpus", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(file_okay=False))
@_constraint_options
def cmd_make_oracle(corpus: str, out: str, k, beam_size: int, entity_hard: bool, kind_match: bool):
    """Build heuristic oracle alignments for every trainable example."""
    result = _load_corpus_or_die(corpus)
    cfg = ConstraintConfig(k=k, beam_size=beam_size, entity_hard=entity_hard, kind_match=kind_match)
    usable, discarded = filter_usable(result.examples)
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    failures = 0
    with open(out_dir / "oracles.jsonl", "w", encoding="utf-8") as fh:
        for ex in usable:
            qg = build_question_graph(ex.question)
            cg = build_graph(ex.context)
            try:
                oracle = build_oracle(ex, qg, cg, cfg)
            except Exception as exc:
                failures += 1
                fh.write(json.dumps({"id": ex.id, "error": str(exc)}, sort_keys=True) + "\n")
                continue
            fh.write(
                json.dumps(
                    {
                        "id": ex.id,
                        "wh": qg.wh_node,
                        "forced": sorted([q, c] for q, c in oracle.forced.items()),
                        "latent": sorted(oracle.latent),
                        "relaxed": oracle.relaxed,
                    },
                    sort_keys=True,
                )
                + "\n"
            )
    click.echo(f"{len(usable)} usable, {len(discarded)} discarded, {failures} oracle failure(s)")


@main.command("train")
@click.option("--corpus", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option("--sidecar", type=click.Path(exists=True, file_okay=False), default=None)
@click.option("--local-epochs", default=10, show_default=True, type=click.IntRange(min=0))
@click.option("--ssvm-epochs", default=20, show_default=True, type=click.IntRange(min=0))
@click.option("--lr", default=0.1, show_default=True, type=float)
@click.option("--l2", default=1e-4, show_default=True, type=float)
@click.option("--seed", default=0, show_default=True, type=int)
@_constraint_options
def cmd_train(corpus, out, sidecar, local_epochs, ssvm_epochs, lr, l2, seed, k, beam_size, entity_hard, kind_match):
    """Run local pretraining then SSVM training; write checkpoints and a log."""
    result = _load_corpus_or_die(corpus)
    search = ConstraintConfig(k=k, beam_size=beam_size, entity_hard=entity_hard, kind_match=kind_match)
    config = TrainConfig(
        local_epochs=local_epochs, ssvm_epochs=ssvm_epochs, learning_rate=lr, l2=l2, seed=seed, search=search
    )
    usable, discarded = filter_usable(result.examples)
    if any(not ex.answers for ex in usable):
        missing = [ex.id for ex in usable if not ex.answers][:5]
        raise click.ClickException(f"training corpus has examples without answers (e.g. {missing})")
    side = EmbeddingSidecar(sidecar) if sidecar else None
    items, failures = prepare_training(usable, search, sidecar=side)
    if not items:
        raise click.ClickException("no trainable examples (all oracle constructions failed)")

    out_dir = Path(out)
    ckpt_dir = out_dir / "checkpoints"
    ckpt_dir.mkdir(parents=True, exist_ok=True)

    model = LinearScorer(sidecar=side)
    rng = np.random.default_rng(config.seed)
    log_rows: list[str] = []
    for epoch in range(config.local_epochs):
        (ce,) = train_local(model, items, dataclasses.replace(config, local_epochs=1), rng=rng)
        save_linear_model(model, ckpt_dir / f"local-{epoch + 1:03d}.txt")
        log_rows.append(f"local,{epoch + 1},{ce},,{len(failures)}")
        click.echo(f"local epoch {epoch + 1}: mean CE {ce:.6f}")
    for epoch in range(config.ssvm_epochs):
        (stats,) = train_ssvm(model, items, dataclasses.replace(config, ssvm_epochs=1), rng=rng)
        save_linear_model(model, ckpt_dir / f"ssvm-{epoch + 1:03d}.txt")
        log_rows.append(f"ssvm,{epoch + 1},,{stats.mean_hinge},{len(failures)}")
        click.echo(f"ssvm epoch {epoch + 1}: mean hinge {stats.mean_hinge:.6f} ({stats.violations} violations)")

    save_linear_model(model, out_dir / "model.txt")
    header = _config_header(
        k=k, beam_size=beam_size, entity_hard=entity_hard, kind_match=kind_match,
        local_epochs=local_epochs, ssvm_epochs=ssvm_epochs, lr=lr, l2=l2, seed=seed,
    )
    log = "\n".join([header, "phase,epoch,mean_local_ce,mean_hinge,oracle_failures", *log_rows]) + "\n"
    (out_dir / "training_log.csv").write_text(log, encoding="utf-8")
    click.echo(f"model written to {out_dir / 'model.txt'} ({len(items)} items, {len(failures)} oracle failures)")


@main.command("predict")
@click.option("--corpus", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option("--workers", default=1, show_default=True, type=click.IntRange(min=1))
@click.option("--relax-on-reject", is_flag=True, default=False, help="Retry dead-ended searches with k=inf (flagged 'relaxed').")
@_scorer_options
@_constraint_options
def cmd_predict(corpus, out, workers, relax_on_reject, scorer, model_path, sidecar, k, beam_size, entity_hard, kind_match):
    """Predict one record per usable example (deterministic for fixed inputs)."""
    result = _load_corpus_or_die(corpus)
    cfg = ConstraintConfig(k=k, beam_size=beam_size, entity_hard=entity_hard, kind_match=kind_match)
    model = _make_scorer(scorer, model_path, sidecar)
    records, discarded = predict_corpus(
        result.examples, model, cfg, relax_on_reject=relax_on_reject, workers=workers
    )
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_predictions(records, out_dir / "predictions.jsonl")
    rejected = sum(r.rejected_constraint for r in records)
    click.echo(
        f"{len(records)} prediction(s) -> {out_dir / 'predictions.jsonl'} "
        f"({len(discarded)} discarded, {rejected} rejected)"
    )


@main.command("evaluate")
@click.option("--corpus", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--predictions", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(file_okay=False))
def cmd_evaluate(corpus, predictions, out):
    """Join predictions with gold answers; emit metrics JSON and the curve CSV."""
    result = _load_corpus_or_die(corpus)
    by_id = {ex.id: ex for ex in result.examples}
    records = load_predictions(predictions)
    missing = sorted(r.example_id for r in records if r.example_id not in by_id)
    if missing:
        raise click.ClickException(f"predictions reference unknown example ids: {missing}")
    no_gold = sorted(r.example_id for r in records if not by_id[r.example_id].answers)
    if no_gold:
        raise click.ClickException(f"corpus has no gold answers for: {no_gold}")

    rescored = []
    for rec in records:
        if rec.rejected_constraint:
            rescored.append(rec)
            continue
        ex = by_id[rec.example_id]
        rescored.append(
            dataclasses.replace(
                rec,
                token_f1=token_f1(rec.answer_text, ex.answer_texts()),
                ans_in_wh=ans_in_wh(rec.wh_aligned_span, ex.answers),
            )
        )

    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    report = metrics_report(rescored, corpus_size=len(result.examples))
    (out_dir / "metrics.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    curve_to_csv(coverage_curve(rescored), out_dir / "curve.csv")
    click.echo(
        f"mean F1 {report['mean_f1']:.4f}, ans-in-wh {report['ans_in_wh_rate']:.4f} "
        f"over {report['usable']} prediction(s)"
    )


@main.command("curve")
@click.option("--predictions", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option("--tau", default=None, type=float, help="Also apply WAG rejection at this threshold.")
def cmd_curve(predictions, out, tau):
    """Write the confidence-ordered coverage/F1 curve from stored predictions."""
    records = load_predictions(predictions)
    scored = [r for r in records if r.rejected_constraint or r.token_f1 is not None]
    if len(scored) != len(records):
        raise click.ClickException("predictions lack token_f1; run 'evaluate' or predict on a gold-bearing corpus")
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    curve_to_csv(coverage_curve(records), out_dir / "curve.csv")
    if tau is not None:
        _, summary = apply_rejection(records, tau)
        (out_dir / "rejection_summary.json").write_text(
            json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        click.echo(f"coverage {summary['coverage']:.3f}, covered F1 {summary['f1_covered']}")
    click.echo(f"curve -> {out_dir / 'curve.csv'}")


if __name__ == "__main__":
    main(prog_name="alignqa")
