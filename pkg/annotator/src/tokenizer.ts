/** Word-level tokenizer with exact character offsets.
 *
 * Tokens are runs of letters/digits (apostrophes allowed inside words) or
 * single punctuation marks. Every downstream annotation is projected onto
 * these tokens, which keeps the engine fully tokenizer-agnostic.
 */

import { Token, TokenSpan } from "./types.js";

const TOKEN_RE = /[A-Za-z0-9]+(?:'[A-Za-z]+)?|[^\sA-Za-z0-9]/g;

export function tokenize(text: string): Token[] {
  const tokens: Token[] = [];
  for (const match of text.matchAll(TOKEN_RE)) {
    tokens.push({ text: match[0], start: match.index!, end: match.index! + match[0].length });
  }
  return tokens;
}

/** Sentence boundaries as token-index ranges (split after . ! ?). */
export function sentenceRanges(tokens: Token[]): TokenSpan[] {
  const ranges: TokenSpan[] = [];
  let start = 0;
  for (let i = 0; i < tokens.length; i++) {
    if (/^[.!?]$/.test(tokens[i].text)) {
      ranges.push([start, i + 1]);
      start = i + 1;
    }
  }
  if (start < tokens.length) ranges.push([start, tokens.length]);
  return ranges;
}

/**
 * Map a character range onto the covering token span.
 *
 * Returns null when the range does not line up with token boundaries well
 * enough (e.g. starts mid-token after trimming); callers flag and skip
 * such examples.
 */
export function charRangeToSpan(tokens: Token[], start: number, end: number): TokenSpan | null {
  if (end <= start) return null;
  let first = -1;
  let last = -1;
  for (let i = 0; i < tokens.length; i++) {
    if (tokens[i].end > start && tokens[i].start < end) {
      if (first < 0) first = i;
      last = i;
    }
  }
  if (first < 0) return null;
  return [first, last + 1];
}
