/** Input readers: plain-triples JSONL and SQuAD-format JSON. */

import { readFileSync } from "node:fs";

import { RawExample } from "./types.js";

export function readTriplesJsonl(path: string): RawExample[] {
  const out: RawExample[] = [];
  const lines = readFileSync(path, "utf8").split("\n");
  for (let i = 0; i < lines.length; i++) {
    if (!lines[i].trim()) continue;
    let obj: any;
    try {
      obj = JSON.parse(lines[i]);
    } catch (err) {
      throw new Error(`${path}:${i + 1}: malformed JSON (${(err as Error).message})`);
    }
    if (typeof obj.id !== "string" || typeof obj.question !== "string" || typeof obj.context !== "string") {
      throw new Error(`${path}:${i + 1}: expected id/question/context strings`);
    }
    const answers = (obj.answers ?? []).map((a: any) => ({ text: String(a.text), start: Number(a.start) }));
    out.push({ id: obj.id, question: obj.question, context: obj.context, answers });
  }
  return out;
}

interface SquadJson {
  data: {
    title?: string;
    paragraphs: {
      context: string;
      qas: { id: string; question: string; answers: { text: string; answer_start: number }[] }[];
    }[];
  }[];
}

export function readSquadJson(path: string): RawExample[] {
  const raw: SquadJson = JSON.parse(readFileSync(path, "utf8"));
  if (!Array.isArray(raw.data)) throw new Error(`${path}: not SQuAD-format JSON (missing 'data')`);
  const out: RawExample[] = [];
  for (const article of raw.data) {
    for (const para of article.paragraphs) {
      for (const qa of para.qas) {
        out.push({
          id: qa.id,
          question: qa.question,
          context: para.context,
          answers: (qa.answers ?? []).map((a) => ({ text: a.text, start: a.answer_start })),
        });
      }
    }
  }
  return out;
}
