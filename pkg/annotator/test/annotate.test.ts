import { describe, expect, it } from "vitest";

import { annotateCorpus, annotateExample } from "../src/annotate.js";
import { annotateCoref } from "../src/coref.js";
import { annotateEntities, normalizeEntity } from "../src/ner.js";
import { annotateSrl } from "../src/srl.js";
import { tokenize } from "../src/tokenizer.js";
import { ExampleJson, RawExample } from "../src/types.js";

function raw(id: string, question: string, context: string, answer?: string): RawExample {
  const answers = [];
  if (answer) {
    const start = context.indexOf(answer);
    if (start < 0) throw new Error("bad fixture");
    answers.push({ text: answer, start });
  }
  return { id, question, context, answers };
}

/** Mirror of the engine's schema invariants, for fast local validation. */
function checkSchema(ex: ExampleJson) {
  for (const [side, name] of [
    [ex.question, "question"],
    [ex.context, "context"],
  ] as const) {
    const n = side.tokens.length;
    const inRange = (s: [number, number]) => s[0] >= 0 && s[0] < s[1] && s[1] <= n;
    for (const frame of side.srl) {
      expect(inRange(frame.predicate), `${name} predicate in range`).toBe(true);
      for (const arg of frame.arguments) {
        expect(inRange(arg.span), `${name} argument in range`).toBe(true);
        const overlaps = arg.span[0] < frame.predicate[1] && frame.predicate[0] < arg.span[1];
        expect(overlaps, `${name} argument must not overlap predicate`).toBe(false);
        expect(arg.role.length).toBeGreaterThan(0);
      }
    }
    for (const cluster of side.coref) {
      expect(cluster.length).toBeGreaterThanOrEqual(2);
      for (const m of cluster) expect(inRange(m)).toBe(true);
    }
    for (const e of side.entities) {
      expect(inRange(e.span)).toBe(true);
    }
  }
  for (const a of ex.answers) {
    expect(a[0] >= 0 && a[0] < a[1] && a[1] <= ex.context.tokens.length).toBe(true);
  }
}

describe("srl heuristic", () => {
  it("a sentence with one verb yields at least one frame", () => {
    const frames = annotateSrl(tokenize("The Broncos won the game."));
    expect(frames.length).toBeGreaterThanOrEqual(1);
    const preds = frames.map((f) => f.predicate[0]);
    expect(preds).toContain(2); // "won"
  });

  it("splits right chunks at the last preposition", () => {
    const tokens = tokenize("The game was played on February 7, 2016.");
    const frames = annotateSrl(tokens);
    const played = frames.find((f) => tokens[f.predicate[0]].text === "played");
    expect(played).toBeDefined();
    const roles = Object.fromEntries(played!.arguments.map((a) => [a.role, a.span]));
    expect(roles["ARGM-TMP"]).toBeDefined();
    const tmp = tokens.slice(roles["ARGM-TMP"][0], roles["ARGM-TMP"][1]).map((t) => t.text);
    expect(tmp[0]).toBe("on");
  });

  it("verbless text yields no frames", () => {
    expect(annotateSrl(tokenize("Blue cheese salad"))).toEqual([]);
  });
});

describe("ner + coref heuristics", () => {
  it("finds proper-noun runs and dates with normalized forms", () => {
    const tokens = tokenize("Super Bowl 50 was played on February 7, 2016.");
    const ents = annotateEntities(tokens);
    const norms = ents.map((e) => e.norm);
    expect(norms).toContain("super bowl 50");
    expect(norms).toContain("february 7 2016");
  });

  it("normalizer lowercases and strips punctuation", () => {
    expect(normalizeEntity("Levi's  Stadium!")).toBe("levi s stadium");
  });

  it("clusters repeated mentions", () => {
    const tokens = tokenize("Super Bowl 50 was a game. Many watched Super Bowl 50.");
    const clusters = annotateCoref(tokens);
    expect(clusters.length).toBeGreaterThanOrEqual(1);
    expect(clusters[0].length).toBeGreaterThanOrEqual(2);
  });
});

describe("annotateExample", () => {
  it("produces schema-valid output with the answer projected to tokens", () => {
    const ex = annotateExample(
      raw("t1", "When was the game played?", "The game was played on February 7, 2016.", "February 7, 2016"),
    );
    checkSchema(ex);
    expect(ex.answers).toHaveLength(1);
    const [s, e] = ex.answers[0];
    expect(ex.context.tokens.slice(s, e)).toEqual(["February", "7", ",", "2016"]);
  });

  it("an answer at the paragraph start maps to token zero", () => {
    const ex = annotateExample(raw("t2", "Who won the game?", "Denver won the game.", "Denver"));
    expect(ex.answers[0][0]).toBe(0);
  });

  it("collects offset failures as skipped, not thrown", () => {
    const bad: RawExample = {
      id: "bad",
      question: "Who won?",
      context: "Denver won.",
      answers: [{ text: "xyz", start: 200 }],
    };
    const ok = raw("ok", "Who won the game?", "Denver won the game.", "Denver");
    const result = annotateCorpus([ok, bad]);
    expect(result.examples.map((e) => e.id)).toEqual(["ok"]);
    expect(result.skipped).toHaveLength(1);
    expect(result.skipped[0].id).toBe("bad");
  });

  it("questions the srl cannot parse still emit (engine discards them)", () => {
    const ex = annotateExample(raw("t3", "Blue cheese salad", "Denver won the game.", "Denver"));
    expect(ex.question.srl).toEqual([]);
  });

  it("rejects unknown stage names with the available options", () => {
    expect(() =>
      annotateExample(raw("t4", "Who won?", "Denver won.", "Denver"), {
        srl: "no-such-model",
        coref: "string-match",
        ner: "pattern",
        batchSize: 1,
      }),
    ).toThrow(/unknown srl model/);
  });
});
