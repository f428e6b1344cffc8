/** String-match coreference clustering.
 *
 * Stand-in for a real coreference model: entity mentions whose normalized
 * surface forms are identical, or where one extends the other with a
 * leading determiner ("the game" / "game"), land in one cluster. Only
 * clusters with two or more mentions are emitted, matching the engine's
 * invariant.
 */

import { normalizeEntity } from "./ner.js";
import { Token, TokenSpan } from "./types.js";

const DET = /^(the|a|an|this|that|these|those)\s+/;
const DET_WORDS = new Set(["the", "a", "an", "this", "that", "these", "those"]);

function clusterKey(text: string): string {
  return normalizeEntity(text).replace(DET, "");
}

function isNounish(tok: string): boolean {
  return /^[A-Za-z][A-Za-z0-9']*$/.test(tok);
}

/** Candidate mentions: capitalized runs plus determiner+noun bigrams. */
function candidateMentions(tokens: Token[]): TokenSpan[] {
  const spans: TokenSpan[] = [];
  for (let i = 0; i < tokens.length; i++) {
    const lower = tokens[i].text.toLowerCase();
    if (DET_WORDS.has(lower) && i + 1 < tokens.length && isNounish(tokens[i + 1].text)) {
      spans.push([i, i + 2]);
      i += 1;
    } else if (/^[A-Z]/.test(tokens[i].text) && isNounish(tokens[i].text)) {
      let j = i + 1;
      while (j < tokens.length && /^[A-Z]/.test(tokens[j].text) && isNounish(tokens[j].text)) j++;
      if (j < tokens.length && /^[0-9]+$/.test(tokens[j].text)) j++;
      spans.push([i, j]);
      i = j - 1;
    }
  }
  return spans;
}

export function annotateCoref(tokens: Token[]): TokenSpan[][] {
  const byKey = new Map<string, TokenSpan[]>();
  for (const span of candidateMentions(tokens)) {
    const text = tokens.slice(span[0], span[1]).map((t) => t.text).join(" ");
    const key = clusterKey(text);
    if (!key) continue;
    const bucket = byKey.get(key);
    if (bucket) bucket.push(span);
    else byKey.set(key, [span]);
  }
  const clusters: TokenSpan[][] = [];
  for (const spans of byKey.values()) {
    const unique = Array.from(new Set(spans.map((s) => `${s[0]}:${s[1]}`))).map(
      (k) => k.split(":").map(Number) as TokenSpan,
    );
    if (unique.length >= 2) {
      unique.sort((a, b) => a[0] - b[0] || a[1] - b[1]);
      clusters.push(unique);
    }
  }
  clusters.sort((a, b) => a[0][0] - b[0][0]);
  return clusters;
}
