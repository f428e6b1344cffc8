/** Deterministic per-token embeddings with subword mean pooling.
 *
 * Stand-in for a contextual encoder (swap via the pipeline config): each
 * token's vector is seeded from a hash of its lowercased form, so the same
 * input always produces identical bytes. Long tokens are split into
 * fixed-width pseudo-subwords whose vectors are averaged per word token —
 * the same pooling a real subword encoder integration would use. The
 * question and context are encoded as one concatenated sequence and split
 * back into per-side matrices.
 */

export interface EncoderConfig {
  name: string;
  dim: number;
  subwordWidth: number;
}

export const DEFAULT_ENCODER: EncoderConfig = { name: "hash", dim: 32, subwordWidth: 4 };

function fnv1a(text: string): number {
  let h = 0x811c9dc5;
  for (let i = 0; i < text.length; i++) {
    h ^= text.charCodeAt(i);
    h = Math.imul(h, 0x01000193) >>> 0;
  }
  return h >>> 0;
}

/** xorshift32 stream of floats in (-1, 1). */
function hashVector(seedText: string, dim: number): Float32Array {
  let state = fnv1a(seedText) || 0x9e3779b9;
  const out = new Float32Array(dim);
  for (let i = 0; i < dim; i++) {
    state ^= state << 13;
    state >>>= 0;
    state ^= state >>> 17;
    state ^= state << 5;
    state >>>= 0;
    out[i] = (state / 0xffffffff) * 2 - 1;
  }
  let norm = 0;
  for (let i = 0; i < dim; i++) norm += out[i] * out[i];
  norm = Math.sqrt(norm) || 1;
  for (let i = 0; i < dim; i++) out[i] /= norm;
  return out;
}

export function subwords(token: string, width: number): string[] {
  const lower = token.toLowerCase();
  if (lower.length <= 2 * width) return [lower];
  const parts: string[] = [];
  for (let i = 0; i < lower.length; i += width) parts.push(lower.slice(i, i + width));
  return parts;
}

export function encodeToken(token: string, config: EncoderConfig): Float32Array {
  const parts = subwords(token, config.subwordWidth);
  const out = new Float32Array(config.dim);
  for (const part of parts) {
    const v = hashVector(part, config.dim);
    for (let i = 0; i < config.dim; i++) out[i] += v[i];
  }
  for (let i = 0; i < config.dim; i++) out[i] /= parts.length;
  return out;
}

/** Encode question ++ context, then split back into the two matrices. */
export function encodeExample(
  questionTokens: string[],
  contextTokens: string[],
  config: EncoderConfig,
): { question: Float32Array[]; context: Float32Array[] } {
  const joint = [...questionTokens, ...contextTokens].map((t) => encodeToken(t, config));
  return {
    question: joint.slice(0, questionTokens.length),
    context: joint.slice(questionTokens.length),
  };
}
