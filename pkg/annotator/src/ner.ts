/** Pattern-based entity mentions with normalized surface forms.
 *
 * Stand-in for a real NER model: proper-noun runs (optionally followed by
 * numbers), date expressions, and standalone numbers. The `norm` field is
 * what the engine's hard entity constraint compares: lowercased, with
 * punctuation stripped and whitespace collapsed.
 */

import { EntityMention, Token } from "./types.js";

const MONTHS = new Set([
  "january", "february", "march", "april", "may", "june", "july",
  "august", "september", "october", "november", "december",
]);

export function normalizeEntity(text: string): string {
  return text
    .toLowerCase()
    .replace(/[^a-z0-9\s]/g, " ")
    .replace(/\s+/g, " ")
    .trim();
}

function isCap(tok: string): boolean {
  return /^[A-Z][A-Za-z0-9']*$/.test(tok);
}

function isNum(tok: string): boolean {
  return /^[0-9]+$/.test(tok);
}

export function annotateEntities(tokens: Token[]): EntityMention[] {
  const out: EntityMention[] = [];
  const taken = new Array(tokens.length).fill(false);

  // dates: Month (day)? (,)? (year)?  |  bare 4-digit years
  for (let i = 0; i < tokens.length; i++) {
    if (!MONTHS.has(tokens[i].text.toLowerCase())) continue;
    let j = i + 1;
    if (j < tokens.length && isNum(tokens[j].text) && tokens[j].text.length <= 2) j++;
    if (j < tokens.length && tokens[j].text === ",") j++;
    if (j < tokens.length && /^[0-9]{4}$/.test(tokens[j].text)) j++;
    while (j > i + 1 && tokens[j - 1].text === ",") j--;
    out.push(mention("DATE", tokens, i, j));
    for (let k = i; k < j; k++) taken[k] = true;
    i = j - 1;
  }
  for (let i = 0; i < tokens.length; i++) {
    if (!taken[i] && /^[0-9]{4}$/.test(tokens[i].text)) {
      out.push(mention("DATE", tokens, i, i + 1));
      taken[i] = true;
    }
  }

  // proper-noun runs, absorbing trailing numbers ("Super Bowl 50")
  for (let i = 0; i < tokens.length; i++) {
    if (taken[i] || !isCap(tokens[i].text)) continue;
    let j = i + 1;
    while (j < tokens.length && !taken[j] && (isCap(tokens[j].text) || isNum(tokens[j].text))) j++;
    if (i === 0 && j === 1) continue; // lone sentence-initial capital is too noisy
    out.push(mention("ENT", tokens, i, j));
    for (let k = i; k < j; k++) taken[k] = true;
    i = j - 1;
  }

  out.sort((a, b) => a.span[0] - b.span[0] || a.span[1] - b.span[1]);
  return out;
}

function mention(type: string, tokens: Token[], i: number, j: number): EntityMention {
  const text = tokens.slice(i, j).map((t) => t.text).join(" ");
  return { type, span: [i, j], norm: normalizeEntity(text) };
}
