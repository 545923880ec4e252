/**
 * Masked-corpus loading and validation.
 *
 * The corpus is a line-delimited JSON file produced by the repair toolkit's
 * `repairkit corpus` command. Each record pairs a method body with one
 * contiguous span replaced by a single sentinel line; the span's original
 * text is the infill target.
 */

import * as fs from "fs";
import { z } from "zod";

export const MASK_SENTINEL = "<extra_id_0>";

export function sentinelCount(text: string): number {
  return text.split(MASK_SENTINEL).length - 1;
}

const recordSchema = z
  .object({
    method_id: z.string().min(1),
    masked_text: z.string().min(1),
    target_text: z.string(),
  })
  .loose();

export interface CorpusRecord {
  methodId: string;
  maskedText: string;
  targetText: string;
}

export class CorpusError extends Error {}

export function parseRecord(line: string, lineNo: number): CorpusRecord {
  let raw: unknown;
  try {
    raw = JSON.parse(line);
  } catch {
    throw new CorpusError(`line ${lineNo}: not valid JSON`);
  }
  const parsed = recordSchema.safeParse(raw);
  if (!parsed.success) {
    throw new CorpusError(`line ${lineNo}: ${parsed.error.issues[0].message}`);
  }
  const record = parsed.data;
  if (sentinelCount(record.masked_text) !== 1) {
    throw new CorpusError(
      `line ${lineNo}: masked_text must contain exactly one ${MASK_SENTINEL}`
    );
  }
  return {
    methodId: record.method_id,
    maskedText: record.masked_text,
    targetText: record.target_text,
  };
}

export function loadCorpus(path: string): CorpusRecord[] {
  const text = fs.readFileSync(path, "utf-8");
  const records: CorpusRecord[] = [];
  text.split("\n").forEach((line, index) => {
    if (line.trim() !== "") {
      records.push(parseRecord(line, index + 1));
    }
  });
  if (records.length === 0) {
    throw new CorpusError(`corpus ${path} is empty`);
  }
  return records;
}
