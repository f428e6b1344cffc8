/** Binary embedding sidecar records, one `<id>.emb` file per example.
 *
 * Layout (little-endian): magic "SPEM", u32 dim, u32 nq, u32 nc, then
 * nq*dim question floats and nc*dim context floats as f32. Must stay
 * byte-compatible with the engine's reader.
 */

import { mkdirSync, readFileSync, writeFileSync } from "node:fs";
import { join } from "node:path";

const MAGIC = "SPEM";
const HEADER_BYTES = 16;

export function encodeSidecar(question: Float32Array[], context: Float32Array[], dim: number): Buffer {
  const nq = question.length;
  const nc = context.length;
  const buf = Buffer.alloc(HEADER_BYTES + 4 * dim * (nq + nc));
  buf.write(MAGIC, 0, "ascii");
  buf.writeUInt32LE(dim, 4);
  buf.writeUInt32LE(nq, 8);
  buf.writeUInt32LE(nc, 12);
  let offset = HEADER_BYTES;
  for (const row of [...question, ...context]) {
    if (row.length !== dim) throw new Error(`row has ${row.length} dims, expected ${dim}`);
    for (let i = 0; i < dim; i++) {
      buf.writeFloatLE(row[i], offset);
      offset += 4;
    }
  }
  return buf;
}

export function writeSidecarRecord(
  directory: string,
  exampleId: string,
  question: Float32Array[],
  context: Float32Array[],
  dim: number,
): string {
  mkdirSync(directory, { recursive: true });
  const path = join(directory, `${exampleId}.emb`);
  writeFileSync(path, encodeSidecar(question, context, dim));
  return path;
}

export interface SidecarHeader {
  dim: number;
  nq: number;
  nc: number;
}

export function readSidecarHeader(path: string): SidecarHeader {
  const buf = readFileSync(path);
  if (buf.length < HEADER_BYTES || buf.toString("ascii", 0, 4) !== MAGIC) {
    throw new Error(`${path}: not a sidecar record`);
  }
  return { dim: buf.readUInt32LE(4), nq: buf.readUInt32LE(8), nc: buf.readUInt32LE(12) };
}
