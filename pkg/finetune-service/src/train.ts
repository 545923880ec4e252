/**
 * Fine-tuning loop: explicit cross-entropy over the masked span's
 * characters, minimized with mini-batch gradient descent.
 */

import * as fs from "fs";
import * as path from "path";
import { CorpusRecord, loadCorpus } from "./corpus";
import { EOS, InfillModel, makeRng, vocabulary } from "./model";

export interface TrainConfig {
  corpusPath: string;
  epochs: number;
  learningRate: number;
  batchSize: number;
  contextWidth: number;
  outputDir: string;
  seed: number;
}

export const DEFAULT_CONFIG: Omit<TrainConfig, "corpusPath" | "outputDir"> = {
  epochs: 2,
  learningRate: 0.5,
  batchSize: 16,
  contextWidth: 8,
  seed: 20240901,
};

/** One next-character prediction task. */
interface Example {
  context: number[];
  target: number;
}

export function buildExamples(model: InfillModel, records: CorpusRecord[]): Example[] {
  const examples: Example[] = [];
  for (const record of records) {
    const context = model.contextFor(record.maskedText);
    const targets = [...model.encode(record.targetText), EOS];
    for (const target of targets) {
      examples.push({ context: [...context], target });
      context.shift();
      context.push(target);
    }
  }
  return examples;
}

export interface TrainResult {
  /** Mean cross-entropy per epoch, in epoch order. */
  epochLosses: number[];
  model: InfillModel;
}

export function trainModel(records: CorpusRecord[], config: TrainConfig): TrainResult {
  const model = new InfillModel(config.contextWidth, vocabulary(records), config.seed);
  const examples = buildExamples(model, records);
  const rng = makeRng(config.seed ^ 0x5eed);
  const v = model.vocabSize;
  const epochLosses: number[] = [];

  for (let epoch = 0; epoch < config.epochs; epoch++) {
    const order = examples.map((_, i) => i);
    for (let i = order.length - 1; i > 0; i--) {
      const j = Math.floor(rng() * (i + 1));
      [order[i], order[j]] = [order[j], order[i]];
    }
    let lossSum = 0;
    for (let start = 0; start < order.length; start += config.batchSize) {
      const batch = order.slice(start, start + config.batchSize);
      const biasGrad = new Float64Array(v);
      // Sparse weight gradients: only rows addressed by batch contexts move.
      const rowGrads = new Map<string, Float64Array>();
      for (const index of batch) {
        const { context, target } = examples[index];
        const { probs, loss } = model.step(context, target);
        lossSum += loss;
        for (let j = 0; j < v; j++) {
          const g = probs[j] - (j === target ? 1 : 0);
          biasGrad[j] += g;
        }
        for (let pos = 0; pos < context.length; pos++) {
          const key = `${pos}:${context[pos]}`;
          let grad = rowGrads.get(key);
          if (grad === undefined) {
            grad = new Float64Array(v);
            rowGrads.set(key, grad);
          }
          for (let j = 0; j < v; j++) {
            grad[j] += probs[j] - (j === target ? 1 : 0);
          }
        }
      }
      const scale = config.learningRate / batch.length;
      for (let j = 0; j < v; j++) {
        model.bias[j] -= scale * biasGrad[j];
      }
      for (const [key, grad] of rowGrads) {
        const [pos, charId] = key.split(":").map(Number);
        const table = model.weights[pos];
        const row = charId * v;
        for (let j = 0; j < v; j++) {
          table[row + j] -= scale * grad[j];
        }
      }
    }
    epochLosses.push(lossSum / examples.length);
  }
  return { epochLosses, model };
}

export function train(config: TrainConfig): TrainResult {
  const records = loadCorpus(config.corpusPath);
  const result = trainModel(records, config);
  fs.mkdirSync(config.outputDir, { recursive: true });
  fs.writeFileSync(
    path.join(config.outputDir, "model.json"),
    JSON.stringify(result.model.toJson())
  );
  fs.writeFileSync(
    path.join(config.outputDir, "loss_log.json"),
    JSON.stringify(
      {
        config: { ...config },
        records: records.length,
        epoch_mean_loss: result.epochLosses,
      },
      null,
      2
    ) + "\n"
  );
  result.epochLosses.forEach((loss, i) => {
    console.log(`epoch ${i + 1}: mean cross-entropy ${loss.toFixed(4)}`);
  });
  return result;
}
