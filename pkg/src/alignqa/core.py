"""Domain types, JSONL corpus ingestion, and the embedding sidecar format.

Everything here is immutable after construction so examples can be shared
freely across worker processes. Spans are token-level (start inclusive,
end exclusive); character offsets never appear in the engine.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

PREDICATE = "predicate"
ARGUMENT = "argument"


class SchemaError(ValueError):
    """A JSON object does not match the corpus schema."""


class ValidationError(ValueError):
    """An example is schema-valid but violates a type invariant."""


class SidecarError(IOError):
    """Embedding sidecar is missing a record or is malformed."""


@dataclass(frozen=True, order=True)
class Span:
    start: int
    end: int

    def __post_init__(self):
        if not (0 <= self.start < self.end):
            raise ValidationError(f"bad span ({self.start}, {self.end})")

    def __len__(self) -> int:
        return self.end - self.start

    def contains(self, other: "Span") -> bool:
        return self.start <= other.start and other.end <= self.end

    def strictly_contains(self, other: "Span") -> bool:
        return self.contains(other) and (self.start, self.end) != (other.start, other.end)

    def in_range(self, n_tokens: int) -> bool:
        return self.end <= n_tokens

    def text(self, tokens: tuple[str, ...]) -> str:
        return " ".join(tokens[self.start : self.end])


@dataclass(frozen=True)
class SrlFrame:
    predicate: Span
    arguments: tuple[tuple[str, Span], ...]  # (role, span)


@dataclass(frozen=True)
class Entity:
    type: str
    span: Span
    norm: str


@dataclass(frozen=True)
class AnnotatedSide:
    tokens: tuple[str, ...]
    frames: tuple[SrlFrame, ...]
    coref_clusters: tuple[tuple[Span, ...], ...]
    entities: tuple[Entity, ...]


@dataclass(frozen=True)
class AnnotatedExample:
    id: str
    question: AnnotatedSide
    context: AnnotatedSide
    answers: tuple[Span, ...]

    def answer_texts(self) -> tuple[str, ...]:
        return tuple(a.text(self.context.tokens) for a in self.answers)


# ---------------------------------------------------------------------------
# JSON (de)serialization


def _span_from_json(obj, what: str) -> Span:
    if not (isinstance(obj, (list, tuple)) and len(obj) == 2):
        raise SchemaError(f"{what}: span must be a [start, end] pair, got {obj!r}")
    s, e = obj
    if not (isinstance(s, int) and isinstance(e, int)):
        raise SchemaError(f"{what}: span endpoints must be integers, got {obj!r}")
    try:
        return Span(s, e)
    except ValidationError as exc:
        raise ValidationError(f"{what}: {exc}") from None


def _side_from_json(obj, what: str) -> AnnotatedSide:
    if not isinstance(obj, dict):
        raise SchemaError(f"{what}: expected an object")
    try:
        tokens = tuple(obj["tokens"])
    except KeyError:
        raise SchemaError(f"{what}: missing 'tokens'") from None
    if not all(isinstance(t, str) for t in tokens):
        raise SchemaError(f"{what}: tokens must be strings")

    frames = []
    for i, fr in enumerate(obj.get("srl", [])):
        pred = _span_from_json(fr.get("predicate"), f"{what}.srl[{i}].predicate")
        args = []
        for j, a in enumerate(fr.get("arguments", [])):
            role = a.get("role")
            if not isinstance(role, str) or not role:
                raise SchemaError(f"{what}.srl[{i}].arguments[{j}]: role must be a nonempty string")
            args.append((role, _span_from_json(a.get("span"), f"{what}.srl[{i}].arguments[{j}].span")))
        frames.append(SrlFrame(pred, tuple(args)))

    clusters = []
    for i, cl in enumerate(obj.get("coref", [])):
        clusters.append(tuple(_span_from_json(m, f"{what}.coref[{i}]") for m in cl))

    entities = []
    for i, e in enumerate(obj.get("entities", [])):
        if not isinstance(e.get("type"), str) or not isinstance(e.get("norm"), str):
            raise SchemaError(f"{what}.entities[{i}]: needs string 'type' and 'norm'")
        entities.append(Entity(e["type"], _span_from_json(e.get("span"), f"{what}.entities[{i}].span"), e["norm"]))

    return AnnotatedSide(tokens, tuple(frames), tuple(clusters), tuple(entities))


def example_from_json(obj) -> AnnotatedExample:
    if not isinstance(obj, dict):
        raise SchemaError("example must be a JSON object")
    ex_id = obj.get("id")
    if not isinstance(ex_id, str) or not ex_id:
        raise SchemaError("missing or empty 'id'")
    for key in ("question", "context", "answers"):
        if key not in obj:
            raise SchemaError(f"example {ex_id!r}: missing '{key}'")
    question = _side_from_json(obj["question"], "question")
    context = _side_from_json(obj["context"], "context")
    answers = tuple(_span_from_json(a, f"answers[{i}]") for i, a in enumerate(obj["answers"]))
    return AnnotatedExample(ex_id, question, context, answers)


def example_to_json(ex: AnnotatedExample) -> dict:
    def side(s: AnnotatedSide) -> dict:
        return {
            "tokens": list(s.tokens),
            "srl": [
                {
                    "predicate": [f.predicate.start, f.predicate.end],
                    "arguments": [{"role": r, "span": [sp.start, sp.end]} for r, sp in f.arguments],
                }
                for f in s.frames
            ],
            "coref": [[[m.start, m.end] for m in cl] for cl in s.coref_clusters],
            "entities": [{"type": e.type, "span": [e.span.start, e.span.end], "norm": e.norm} for e in s.entities],
        }

    return {
        "id": ex.id,
        "question": side(ex.question),
        "context": side(ex.context),
        "answers": [[a.start, a.end] for a in ex.answers],
    }


def validate_example(ex: AnnotatedExample) -> list[str]:
    """Return a list of invariant violations (empty when the example is clean)."""
    problems: list[str] = []

    def check_side(side: AnnotatedSide, name: str):
        n = len(side.tokens)
        for i, fr in enumerate(side.frames):
            if not fr.predicate.in_range(n):
                problems.append(f"{name}.srl[{i}]: predicate span out of range")
            for role, sp in fr.arguments:
                if not sp.in_range(n):
                    problems.append(f"{name}.srl[{i}]: argument '{role}' span out of range")
                elif sp.start < fr.predicate.end and fr.predicate.start < sp.end:
                    problems.append(f"{name}.srl[{i}]: argument '{role}' overlaps the predicate")
        for i, cl in enumerate(side.coref_clusters):
            if len(cl) < 2:
                problems.append(f"{name}.coref[{i}]: cluster has fewer than 2 mentions")
            for m in cl:
                if not m.in_range(n):
                    problems.append(f"{name}.coref[{i}]: mention span out of range")
        for i, e in enumerate(side.entities):
            if not e.span.in_range(n):
                problems.append(f"{name}.entities[{i}]: span out of range")

    check_side(ex.question, "question")
    check_side(ex.context, "context")
    n_ctx = len(ex.context.tokens)
    for i, a in enumerate(ex.answers):
        if not a.in_range(n_ctx):
            problems.append(f"answers[{i}]: span out of range")
    return problems


# ---------------------------------------------------------------------------
# Corpus loading


@dataclass(frozen=True)
class CorpusError:
    line: int
    example_id: str | None
    message: str

    def __str__(self) -> str:
        who = self.example_id if self.example_id else f"line {self.line}"
        return f"{who}: {self.message}"


@dataclass
class CorpusLoadResult:
    examples: list[AnnotatedExample]
    errors: list[CorpusError] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors


def load_corpus(path: str | Path) -> CorpusLoadResult:
    """Load a JSONL corpus; bad lines are reported, never silently dropped.

    Malformed JSON and schema problems are recorded with their line number,
    invariant violations with the offending example id. Duplicate ids are
    errors (the second occurrence is rejected).
    """
    examples: list[AnnotatedExample] = []
    errors: list[CorpusError] = []
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                errors.append(CorpusError(lineno, None, f"malformed JSON: {exc.msg}"))
                continue
            try:
                ex = example_from_json(obj)
            except (SchemaError, ValidationError) as exc:
                ex_id = obj.get("id") if isinstance(obj, dict) else None
                errors.append(CorpusError(lineno, ex_id if isinstance(ex_id, str) else None, str(exc)))
                continue
            problems = validate_example(ex)
            if problems:
                errors.append(CorpusError(lineno, ex.id, "; ".join(problems)))
                continue
            if ex.id in seen:
                errors.append(CorpusError(lineno, ex.id, "duplicate example id"))
                continue
            seen.add(ex.id)
            examples.append(ex)
    return CorpusLoadResult(examples, errors)


def save_corpus(examples, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ex in examples:
            fh.write(json.dumps(example_to_json(ex), sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# Embedding sidecar
#
# One binary record per example: magic "SPEM", u32 d, u32 nq, u32 nc,
# then nq*d question floats and nc*d context floats (little-endian f32).

_MAGIC = b"SPEM"
_HEADER = struct.Struct("<4sIII")


@dataclass(frozen=True)
class SidecarRecord:
    dim: int
    question: np.ndarray  # (nq, d) float32
    context: np.ndarray  # (nc, d) float32

    def check_shape(self, ex: AnnotatedExample) -> None:
        nq, nc = len(ex.question.tokens), len(ex.context.tokens)
        if self.question.shape[0] != nq or self.context.shape[0] != nc:
            raise SidecarError(
                f"{ex.id}: sidecar rows ({self.question.shape[0]} question, "
                f"{self.context.shape[0]} context) do not match token counts ({nq}, {nc})"
            )


def write_sidecar_record(directory: str | Path, example_id: str, question: np.ndarray, context: np.ndarray) -> Path:
    question = np.ascontiguousarray(question, dtype="<f4")
    context = np.ascontiguousarray(context, dtype="<f4")
    if question.ndim != 2 or context.ndim != 2 or question.shape[1] != context.shape[1]:
        raise ValueError("question/context must be 2-D with a shared embedding dimension")
    d = question.shape[1]
    path = Path(directory) / f"{example_id}.emb"
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(_MAGIC, d, question.shape[0], context.shape[0]))
        fh.write(question.tobytes())
        fh.write(context.tobytes())
    return path


def read_sidecar_record(directory: str | Path, example_id: str) -> SidecarRecord:
    path = Path(directory) / f"{example_id}.emb"
    if not path.exists():
        raise SidecarError(f"no sidecar record for example {example_id!r} in {directory}")
    raw = path.read_bytes()
    if len(raw) < _HEADER.size:
        raise SidecarError(f"{path}: truncated header")
    magic, d, nq, nc = _HEADER.unpack_from(raw)
    if magic != _MAGIC:
        raise SidecarError(f"{path}: bad magic {magic!r}")
    expected = _HEADER.size + 4 * d * (nq + nc)
    if len(raw) != expected:
        raise SidecarError(f"{path}: expected {expected} bytes, found {len(raw)}")
    body = np.frombuffer(raw, dtype="<f4", offset=_HEADER.size)
    question = body[: nq * d].reshape(nq, d).astype(np.float32)
    context = body[nq * d :].reshape(nc, d).astype(np.float32)
    return SidecarRecord(d, question, context)


class EmbeddingSidecar:
    """Reader over a directory of per-example ``.emb`` records.

    The embedding dimension must be constant across a run; the first record
    read pins it and later mismatches are rejected.
    """

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self._dim: int | None = None

    def load(self, example_id: str) -> SidecarRecord:
        rec = read_sidecar_record(self.directory, example_id)
        if self._dim is None:
            self._dim = rec.dim
        elif rec.dim != self._dim:
            raise SidecarError(
                f"{example_id}: sidecar dimension {rec.dim} differs from {self._dim} seen earlier in this run"
            )
        return rec

    def load_for(self, ex: AnnotatedExample) -> SidecarRecord:
        rec = self.load(ex.id)
        rec.check_shape(ex)
        return rec
