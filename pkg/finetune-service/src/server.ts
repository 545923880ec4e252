/**
 * Minimal infill HTTP service.
 *
 * POST /infill {masked_text} -> {fill_text}; the masked text must contain
 * exactly one sentinel. GET /health reports 503 until a model checkpoint
 * has been loaded.
 */

import express, { Express } from "express";
import * as fs from "fs";
import * as path from "path";
import { z } from "zod";
import { sentinelCount, MASK_SENTINEL } from "./corpus";
import { InfillModel, ModelJson } from "./model";

const infillSchema = z.object({ masked_text: z.string().min(1) }).loose();

export interface ServerState {
  model: InfillModel | null;
}

export function createApp(state: ServerState = { model: null }): Express {
  const app = express();
  app.use(express.json({ limit: "1mb" }));

  app.get("/health", (_req, res) => {
    if (state.model === null) {
      res.status(503).json({ status: "loading" });
    } else {
      res.status(200).json({ status: "ready" });
    }
  });

  app.post("/infill", (req, res) => {
    if (state.model === null) {
      res.status(503).json({ error: "model not loaded" });
      return;
    }
    const parsed = infillSchema.safeParse(req.body);
    if (!parsed.success) {
      res.status(400).json({ error: "body must be {masked_text: string}" });
      return;
    }
    const masked = parsed.data.masked_text;
    if (sentinelCount(masked) !== 1) {
      res.status(400).json({
        error: `masked_text must contain exactly one ${MASK_SENTINEL}`,
      });
      return;
    }
    res.status(200).json({ fill_text: state.model.fill(masked) });
  });

  return app;
}

export function loadModel(checkpointDir: string): InfillModel {
  const file = path.join(checkpointDir, "model.json");
  const data = JSON.parse(fs.readFileSync(file, "utf-8")) as ModelJson;
  return InfillModel.fromJson(data);
}
