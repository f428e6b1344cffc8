/** Rule-based shallow predicate-argument frames.
 *
 * Stand-in for a real SRL model (swap via the pipeline config): verbs come
 * from a lexicon plus suffix heuristics, one frame per main verb and
 * sentence, with chunked left/right arguments. The output respects the
 * engine's invariants (arguments never overlap their predicate) and is
 * deterministic. Sentences where nothing verb-like is found yield no
 * frames; the engine discards such questions as no-srl.
 */

import { sentenceRanges } from "./tokenizer.js";
import { SrlFrame, Token, TokenSpan } from "./types.js";

const AUX = new Set(["is", "are", "was", "were", "be", "been", "being", "do", "does", "did", "has", "have", "had", "will", "would", "can", "could", "may", "might", "shall", "should", "must"]);

const COMMON_VERBS = new Set([
  "play", "played", "plays", "win", "won", "wins", "lose", "lost", "go", "went", "gone", "goes",
  "take", "took", "taken", "make", "made", "say", "said", "see", "saw", "hold", "held", "begin",
  "began", "become", "became", "get", "got", "give", "gave", "come", "came", "know", "knew",
  "find", "found", "defeat", "defeated", "determine", "determined", "earn", "earned", "feature",
  "featured", "name", "named", "call", "called", "emphasize", "emphasized", "suspend", "suspended",
  "include", "included", "host", "hosted", "score", "scored", "happen", "happened", "occur",
  "occurred", "live", "lived", "move", "moved", "visit", "visited", "stay", "stayed", "write",
  "wrote", "written", "build", "built", "found", "founded", "establish", "established",
  "flow", "flows", "flowed", "carry", "carries", "carried", "open", "opened", "opens",
  "watch", "watched", "run", "ran", "runs", "lead", "led", "leads",
]);

const NOT_VERBS = new Set(["during", "used", "united", "red", "speed", "seed", "need", "indeed", "bred", "hundred", "sacred"]);

const PREPOSITIONS = new Set(["on", "in", "at", "of", "to", "by", "for", "during", "since", "from", "with", "near", "before", "after"]);

function isPunct(tok: string): boolean {
  return /^[^\sA-Za-z0-9]$/.test(tok);
}

export function looksLikeVerb(token: string): boolean {
  const t = token.toLowerCase();
  if (NOT_VERBS.has(t)) return false;
  if (AUX.has(t) || COMMON_VERBS.has(t)) return true;
  return t.length > 4 && (t.endsWith("ed") || t.endsWith("ing"));
}

function trimChunk(tokens: Token[], start: number, end: number): TokenSpan | null {
  while (start < end && isPunct(tokens[start].text)) start++;
  while (end > start && isPunct(tokens[end - 1].text)) end--;
  return end > start ? [start, end] : null;
}

/** Split a right-hand chunk at its last preposition into ARG1 + a modifier. */
function rightArguments(tokens: Token[], start: number, end: number): { role: string; span: TokenSpan }[] {
  const chunk = trimChunk(tokens, start, end);
  if (!chunk) return [];
  const [s, e] = chunk;
  let split = -1;
  for (let i = e - 1; i > s; i--) {
    if (PREPOSITIONS.has(tokens[i].text.toLowerCase())) {
      split = i;
      break;
    }
  }
  if (split > s && split < e - 1) {
    const head = trimChunk(tokens, s, split);
    const args = head ? [{ role: "ARG1", span: head }] : [];
    args.push({ role: "ARGM-TMP", span: [split, e] as TokenSpan });
    return args;
  }
  const role = PREPOSITIONS.has(tokens[s].text.toLowerCase()) ? "ARGM-TMP" : "ARG1";
  return [{ role, span: [s, e] }];
}

export function annotateSrl(tokens: Token[]): SrlFrame[] {
  const frames: SrlFrame[] = [];
  for (const [sentStart, sentEnd] of sentenceRanges(tokens)) {
    const verbs: number[] = [];
    for (let i = sentStart; i < sentEnd; i++) {
      if (looksLikeVerb(tokens[i].text)) verbs.push(i);
    }
    // auxiliaries only carry a frame when no main verb exists
    const main = verbs.filter((v) => !AUX.has(tokens[v].text.toLowerCase()));
    const predicates = main.length ? main : verbs.slice(0, 1);
    for (const v of predicates) {
      const args: { role: string; span: TokenSpan }[] = [];
      const left = trimChunk(tokens, sentStart, v);
      if (left) args.push({ role: "ARG0", span: left });
      const boundary = predicates.find((w) => w > v) ?? sentEnd;
      args.push(...rightArguments(tokens, v + 1, boundary));
      if (args.length) frames.push({ predicate: [v, v + 1], arguments: args });
    }
  }
  return frames;
}
