#!/usr/bin/env node
/** Annotation pipeline CLI.
 *
 *   alignqa-annotate annotate          --input FILE [--format triples|squad] --out corpus.jsonl
 *                                      [--skipped skipped.jsonl] [--config config.json]
 *   alignqa-annotate export-embeddings --corpus corpus.jsonl --out SIDE_DIR
 *                                      [--dim 32] [--config config.json]
 */

import { readFileSync, writeFileSync } from "node:fs";
import { parseArgs } from "node:util";

import { annotateCorpus, DEFAULT_PIPELINE, PipelineConfig } from "./annotate.js";
import { DEFAULT_ENCODER, EncoderConfig, encodeExample } from "./embeddings.js";
import { readSquadJson, readTriplesJsonl } from "./inputs.js";
import { writeSidecarRecord } from "./sidecar.js";
import { ExampleJson } from "./types.js";

function loadConfig(path: string | undefined): { pipeline: PipelineConfig; encoder: EncoderConfig } {
  const pipeline = { ...DEFAULT_PIPELINE };
  const encoder = { ...DEFAULT_ENCODER };
  if (path) {
    const raw = JSON.parse(readFileSync(path, "utf8"));
    Object.assign(pipeline, raw.pipeline ?? {});
    Object.assign(encoder, raw.encoder ?? {});
  }
  return { pipeline, encoder };
}

function cmdAnnotate(argv: string[]): number {
  const { values } = parseArgs({
    args: argv,
    options: {
      input: { type: "string" },
      format: { type: "string", default: "triples" },
      out: { type: "string" },
      skipped: { type: "string" },
      config: { type: "string" },
    },
  });
  if (!values.input || !values.out) {
    console.error("annotate requires --input and --out");
    return 2;
  }
  const { pipeline } = loadConfig(values.config);
  const raws =
    values.format === "squad" ? readSquadJson(values.input) : readTriplesJsonl(values.input);
  const result = annotateCorpus(raws, pipeline);
  writeFileSync(values.out, result.examples.map((e) => JSON.stringify(e)).join("\n") + "\n");
  if (values.skipped) {
    writeFileSync(values.skipped, result.skipped.map((s) => JSON.stringify(s)).join("\n") + (result.skipped.length ? "\n" : ""));
  }
  for (const s of result.skipped) console.error(`skipped ${s.id}: ${s.reason}`);
  console.log(`${result.examples.length} example(s) -> ${values.out} (${result.skipped.length} skipped)`);
  return 0;
}

function cmdExportEmbeddings(argv: string[]): number {
  const { values } = parseArgs({
    args: argv,
    options: {
      corpus: { type: "string" },
      out: { type: "string" },
      dim: { type: "string" },
      config: { type: "string" },
    },
  });
  if (!values.corpus || !values.out) {
    console.error("export-embeddings requires --corpus and --out");
    return 2;
  }
  const { encoder } = loadConfig(values.config);
  if (values.dim) encoder.dim = Number(values.dim);

  let count = 0;
  for (const line of readFileSync(values.corpus, "utf8").split("\n")) {
    if (!line.trim()) continue;
    const ex: ExampleJson = JSON.parse(line);
    const { question, context } = encodeExample(ex.question.tokens, ex.context.tokens, encoder);
    writeSidecarRecord(values.out, ex.id, question, context, encoder.dim);
    count++;
  }
  console.log(`${count} sidecar record(s) (dim ${encoder.dim}) -> ${values.out}`);
  return 0;
}

function main(): number {
  const [command, ...rest] = process.argv.slice(2);
  switch (command) {
    case "annotate":
      return cmdAnnotate(rest);
    case "export-embeddings":
      return cmdExportEmbeddings(rest);
    default:
      console.error("usage: alignqa-annotate <annotate|export-embeddings> [options]");
      return 2;
  }
}

process.exit(main());
