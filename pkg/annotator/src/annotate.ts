/** Raw (question, context, answers) triples -> engine corpus lines.
 *
 * Each annotator stage is selected by name from a registry so that real
 * model integrations can replace the rule-based defaults without touching
 * the pipeline. Annotation failures degrade per the engine's contract:
 * a side that gets no frames is emitted anyway (the engine discards it as
 * no-srl); an answer whose character offsets cannot be projected onto
 * token boundaries flags the whole example as skipped.
 */

import { annotateCoref } from "./coref.js";
import { annotateEntities } from "./ner.js";
import { annotateSrl } from "./srl.js";
import { charRangeToSpan, tokenize } from "./tokenizer.js";
import { ExampleJson, RawExample, SideJson, SrlFrame, Token, TokenSpan } from "./types.js";

export interface PipedStage<T> {
  [name: string]: (tokens: Token[]) => T;
}

export const SRL_MODELS: PipedStage<SrlFrame[]> = { heuristic: annotateSrl };
export const COREF_MODELS: PipedStage<TokenSpan[][]> = { "string-match": annotateCoref };
export const NER_MODELS: PipedStage<ReturnType<typeof annotateEntities>> = { pattern: annotateEntities };

export interface PipelineConfig {
  srl: string;
  coref: string;
  ner: string;
  batchSize: number;
}

export const DEFAULT_PIPELINE: PipelineConfig = {
  srl: "heuristic",
  coref: "string-match",
  ner: "pattern",
  batchSize: 32,
};

function pick<T>(registry: PipedStage<T>, name: string, stage: string): (tokens: Token[]) => T {
  const fn = registry[name];
  if (!fn) {
    throw new Error(`unknown ${stage} model '${name}' (available: ${Object.keys(registry).join(", ")})`);
  }
  return fn;
}

export class OffsetError extends Error {}

function annotateSide(text: string, config: PipelineConfig): { side: SideJson; tokens: Token[] } {
  const tokens = tokenize(text);
  const srl = pick(SRL_MODELS, config.srl, "srl"); // config errors must surface
  let frames: SrlFrame[];
  try {
    frames = srl(tokens);
  } catch {
    frames = []; // model failure: engine will discard as no-srl
  }
  const side: SideJson = {
    tokens: tokens.map((t) => t.text),
    srl: frames,
    coref: pick(COREF_MODELS, config.coref, "coref")(tokens),
    entities: pick(NER_MODELS, config.ner, "ner")(tokens),
  };
  return { side, tokens };
}

export function annotateExample(raw: RawExample, config: PipelineConfig = DEFAULT_PIPELINE): ExampleJson {
  const question = annotateSide(raw.question, config);
  const context = annotateSide(raw.context, config);

  const answers: TokenSpan[] = [];
  for (const ans of raw.answers) {
    const end = ans.start + ans.text.length;
    if (ans.start < 0 || end > raw.context.length) {
      throw new OffsetError(`${raw.id}: answer offsets [${ans.start}, ${end}) outside the context`);
    }
    const span = charRangeToSpan(context.tokens, ans.start, end);
    if (!span) {
      throw new OffsetError(`${raw.id}: answer '${ans.text}' does not project onto token boundaries`);
    }
    answers.push(span);
  }

  return { id: raw.id, question: question.side, context: context.side, answers };
}

export interface AnnotateResult {
  examples: ExampleJson[];
  skipped: { id: string; reason: string }[];
}

export function annotateCorpus(raws: RawExample[], config: PipelineConfig = DEFAULT_PIPELINE): AnnotateResult {
  const examples: ExampleJson[] = [];
  const skipped: { id: string; reason: string }[] = [];
  for (const raw of raws) {
    try {
      examples.push(annotateExample(raw, config));
    } catch (err) {
      if (err instanceof OffsetError) {
        skipped.push({ id: raw.id, reason: err.message });
      } else {
        throw err;
      }
    }
  }
  return { examples, skipped };
}
