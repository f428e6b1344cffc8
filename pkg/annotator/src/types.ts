/** Shared types: raw inputs and the engine's corpus schema. */

export interface RawAnswer {
  text: string;
  start: number; // character offset into the context
}

export interface RawExample {
  id: string;
  question: string;
  context: string;
  answers: RawAnswer[];
}

/** Token spans are [start, end) over word-level tokens. */
export type TokenSpan = [number, number];

export interface SideJson {
  tokens: string[];
  srl: { predicate: TokenSpan; arguments: { role: string; span: TokenSpan }[] }[];
  coref: TokenSpan[][];
  entities: { type: string; span: TokenSpan; norm: string }[];
}

export interface ExampleJson {
  id: string;
  question: SideJson;
  context: SideJson;
  answers: TokenSpan[];
}

export interface Token {
  text: string;
  start: number; // character offsets into the source text
  end: number;
}

export interface SrlFrame {
  predicate: TokenSpan;
  arguments: { role: string; span: TokenSpan }[];
}

export interface EntityMention {
  type: string;
  span: TokenSpan;
  norm: string;
}
