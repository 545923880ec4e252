/**
 * A small character-level infill language model built from scratch.
 *
 * Architecture: a fixed-width context of k characters is mapped to
 * next-character logits through one weight table per context position
 * (logits = sum_i W_i[c_i] + b). Training minimizes the cross-entropy of
 * the target span's characters given the code immediately preceding the
 * masked region; decoding is greedy so that serving is deterministic.
 */

import { CorpusRecord, MASK_SENTINEL } from "./corpus";

export const BOS = 0; // padding for contexts shorter than k
export const EOS = 1; // end of fill
const SPECIAL_TOKENS = 2;

/** Deterministic 32-bit PRNG (mulberry32). */
export function makeRng(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export interface ModelJson {
  contextWidth: number;
  chars: string;
  weights: number[][];
  bias: number[];
}

export class InfillModel {
  readonly contextWidth: number;
  readonly chars: string[];
  private readonly charToId: Map<string, number>;
  /** weights[i] is a vocabSize x vocabSize table for context position i. */
  weights: Float64Array[];
  bias: Float64Array;

  constructor(contextWidth: number, chars: string[], seed: number) {
    this.contextWidth = contextWidth;
    this.chars = chars;
    this.charToId = new Map(chars.map((ch, i) => [ch, i + SPECIAL_TOKENS]));
    const v = this.vocabSize;
    const rng = makeRng(seed);
    this.weights = Array.from({ length: contextWidth }, () => {
      const table = new Float64Array(v * v);
      for (let i = 0; i < table.length; i++) {
        table[i] = (rng() - 0.5) * 0.02;
      }
      return table;
    });
    this.bias = new Float64Array(v);
  }

  get vocabSize(): number {
    return this.chars.length + SPECIAL_TOKENS;
  }

  encode(text: string): number[] {
    // Unseen characters degrade to BOS rather than failing a request.
    return [...text].map((ch) => this.charToId.get(ch) ?? BOS);
  }

  /** The k token ids preceding the sentinel, BOS-padded on the left. */
  contextFor(maskedText: string): number[] {
    const cut = maskedText.indexOf(MASK_SENTINEL);
    const before = cut >= 0 ? maskedText.slice(0, cut) : maskedText;
    const ids = this.encode(before).slice(-this.contextWidth);
    while (ids.length < this.contextWidth) {
      ids.unshift(BOS);
    }
    return ids;
  }

  logits(context: number[]): Float64Array {
    const v = this.vocabSize;
    const out = Float64Array.from(this.bias);
    for (let i = 0; i < this.contextWidth; i++) {
      const row = context[i] * v;
      const table = this.weights[i];
      for (let j = 0; j < v; j++) {
        out[j] += table[row + j];
      }
    }
    return out;
  }

  /** Softmax probabilities and the cross-entropy of the true next token. */
  step(context: number[], target: number): { probs: Float64Array; loss: number } {
    const logits = this.logits(context);
    let max = -Infinity;
    for (const x of logits) {
      max = Math.max(max, x);
    }
    let sum = 0;
    const probs = new Float64Array(logits.length);
    for (let j = 0; j < logits.length; j++) {
      probs[j] = Math.exp(logits[j] - max);
      sum += probs[j];
    }
    for (let j = 0; j < probs.length; j++) {
      probs[j] /= sum;
    }
    return { probs, loss: -Math.log(probs[target]) };
  }

  /** Greedy fill: decode until EOS, the line cap, or the char cap. */
  fill(maskedText: string, maxLines = 6, maxChars = 400): string {
    const context = this.contextFor(maskedText);
    const out: string[] = [];
    let newlines = 0;
    while (out.join("").length < maxChars) {
      const logits = this.logits(context);
      let best = 0;
      for (let j = 1; j < logits.length; j++) {
        if (logits[j] > logits[best]) {
          best = j;
        }
      }
      if (best === EOS || best === BOS) {
        break;
      }
      const ch = this.chars[best - SPECIAL_TOKENS];
      if (ch === "\n") {
        newlines += 1;
        if (newlines >= maxLines) {
          break;
        }
      }
      out.push(ch);
      context.shift();
      context.push(best);
    }
    return out.join("");
  }

  toJson(): ModelJson {
    return {
      contextWidth: this.contextWidth,
      chars: this.chars.join(""),
      weights: this.weights.map((w) => Array.from(w)),
      bias: Array.from(this.bias),
    };
  }

  static fromJson(data: ModelJson): InfillModel {
    const model = new InfillModel(data.contextWidth, [...data.chars], 0);
    model.weights = data.weights.map((w) => Float64Array.from(w));
    model.bias = Float64Array.from(data.bias);
    return model;
  }
}

export function vocabulary(records: CorpusRecord[]): string[] {
  const seen = new Set<string>();
  for (const record of records) {
    for (const ch of record.maskedText + record.targetText) {
      seen.add(ch);
    }
  }
  seen.delete(""); // defensive; Set of chars never holds it
  return [...seen].sort();
}
