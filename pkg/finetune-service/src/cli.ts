import { parseArgs } from "node:util";
import { CorpusError } from "./corpus";
import { createApp, loadModel } from "./server";
import { DEFAULT_CONFIG, train } from "./train";

const USAGE = `usage:
  cli.js train --corpus <corpus.jsonl> --out <dir> [--epochs N] [--lr X]
               [--batch-size N] [--context-width N] [--seed N]
  cli.js serve --checkpoint <dir> [--port N]`;

function runTrain(argv: string[]): number {
  const { values } = parseArgs({
    args: argv,
    options: {
      corpus: { type: "string" },
      out: { type: "string" },
      epochs: { type: "string" },
      lr: { type: "string" },
      "batch-size": { type: "string" },
      "context-width": { type: "string" },
      seed: { type: "string" },
    },
  });
  if (!values.corpus || !values.out) {
    console.error(USAGE);
    return 2;
  }
  try {
    train({
      corpusPath: values.corpus,
      outputDir: values.out,
      epochs: values.epochs ? Number(values.epochs) : DEFAULT_CONFIG.epochs,
      learningRate: values.lr ? Number(values.lr) : DEFAULT_CONFIG.learningRate,
      batchSize: values["batch-size"]
        ? Number(values["batch-size"])
        : DEFAULT_CONFIG.batchSize,
      contextWidth: values["context-width"]
        ? Number(values["context-width"])
        : DEFAULT_CONFIG.contextWidth,
      seed: values.seed ? Number(values.seed) : DEFAULT_CONFIG.seed,
    });
  } catch (err) {
    if (err instanceof CorpusError) {
      console.error(`corpus error: ${err.message}`);
      return 2;
    }
    throw err;
  }
  return 0;
}

function runServe(argv: string[]): number {
  const { values } = parseArgs({
    args: argv,
    options: {
      checkpoint: { type: "string" },
      port: { type: "string" },
    },
  });
  if (!values.checkpoint) {
    console.error(USAGE);
    return 2;
  }
  const state = { model: loadModel(values.checkpoint) };
  const port = values.port ? Number(values.port) : 8777;
  const server = createApp(state).listen(port, () => {
    const address = server.address();
    const bound = typeof address === "object" && address ? address.port : port;
    console.log(`infill service listening on port ${bound}`);
  });
  return 0;
}

function main(): number {
  const [command, ...rest] = process.argv.slice(2);
  if (command === "train") {
    return runTrain(rest);
  }
  if (command === "serve") {
    return runServe(rest);
  }
  console.error(USAGE);
  return 2;
}

process.exitCode = main();
