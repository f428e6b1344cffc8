/** Round trip through the primary engine: the emitted corpus must pass the
 * engine loader with zero errors, and every sidecar record must match the
 * example's token counts exactly. Runs the pipeline on the bundled sample
 * paragraphs, then validates with the installed alignqa package.
 */

import { execFileSync } from "node:child_process";
import { existsSync, mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { beforeAll, describe, expect, it } from "vitest";

import { annotateCorpus } from "../src/annotate.js";
import { DEFAULT_ENCODER, encodeExample } from "../src/embeddings.js";
import { readTriplesJsonl } from "../src/inputs.js";
import { readSidecarHeader, writeSidecarRecord } from "../src/sidecar.js";
import { ExampleJson } from "../src/types.js";

const HERE = dirname(fileURLToPath(import.meta.url));
const SAMPLE = join(HERE, "..", "sample", "triples.jsonl");
const ENCODER = { ...DEFAULT_ENCODER, dim: 16 };

const VALIDATE_PY = `
import json, sys
from alignqa.core import EmbeddingSidecar, SidecarError, load_corpus
from alignqa.graph import filter_usable

corpus_path, sidecar_dir = sys.argv[1], sys.argv[2]
result = load_corpus(corpus_path)
shape_errors = []
reader = EmbeddingSidecar(sidecar_dir)
for ex in result.examples:
    try:
        reader.load_for(ex)
    except SidecarError as exc:
        shape_errors.append(str(exc))
usable, discarded = filter_usable(result.examples)
print(json.dumps({
    "examples": len(result.examples),
    "load_errors": [str(e) for e in result.errors],
    "shape_errors": shape_errors,
    "usable": len(usable),
    "discarded": [d.reason for d in discarded],
}))
`;

let workDir: string;
let corpusPath: string;
let sidecarDir: string;
let examples: ExampleJson[];

describe("round trip through the engine loader", () => {
  beforeAll(() => {
    workDir = mkdtempSync(join(tmpdir(), "annotator-roundtrip-"));
    corpusPath = join(workDir, "corpus.jsonl");
    sidecarDir = join(workDir, "sidecar");

    const result = annotateCorpus(readTriplesJsonl(SAMPLE));
    expect(result.skipped).toEqual([]);
    examples = result.examples;
    writeFileSync(corpusPath, examples.map((e) => JSON.stringify(e)).join("\n") + "\n");
    for (const ex of examples) {
      const { question, context } = encodeExample(ex.question.tokens, ex.context.tokens, ENCODER);
      writeSidecarRecord(sidecarDir, ex.id, question, context, ENCODER.dim);
    }
  });

  it("annotates all five sample paragraphs", () => {
    expect(examples).toHaveLength(5);
  });

  it("sidecar row counts equal token counts exactly", () => {
    for (const ex of examples) {
      const path = join(sidecarDir, `${ex.id}.emb`);
      expect(existsSync(path)).toBe(true);
      const header = readSidecarHeader(path);
      expect(header.nq).toBe(ex.question.tokens.length);
      expect(header.nc).toBe(ex.context.tokens.length);
      expect(header.dim).toBe(16);
    }
  });

  it("the primary loader validates corpus and sidecars with zero errors", () => {
    const out = execFileSync("python3", ["-c", VALIDATE_PY, corpusPath, sidecarDir], { encoding: "utf8" });
    const report = JSON.parse(out.trim());
    expect(report.examples).toBe(5);
    expect(report.load_errors).toEqual([]);
    expect(report.shape_errors).toEqual([]);
    expect(report.usable).toBe(5); // every sample question has a frame and a wh word
  });

  it("the engine can predict end to end on the emitted artifacts", () => {
    const outDir = join(workDir, "run");
    execFileSync(
      "python3",
      [
        "-m", "alignqa.cli", "predict",
        "--corpus", corpusPath,
        "--out", outDir,
        "--scorer", "embedding",
        "--sidecar", sidecarDir,
      ],
      { encoding: "utf8" },
    );
    const lines = readFileSync(join(outDir, "predictions.jsonl"), "utf8").trim().split("\n");
    expect(lines).toHaveLength(5);
    for (const line of lines) {
      const rec = JSON.parse(line);
      expect(typeof rec.id).toBe("string");
    }
  });
});
