/**
 * Turn a validated manifest into the graph file plus its sidecar.
 *
 * The sidecar lands at `<graph_path>.meta.json` with snake_case keys,
 * exactly as the runtime's loader reads them. Output is deterministic:
 * the same manifest always produces identical bytes.
 */

import fs from "node:fs";
import path from "node:path";

import {
  classifierGraph,
  depthGraph,
  detectorGraph,
  stubClassifierWeights,
  type ClassifierWeights,
} from "./graphs.js";
import { NUM_CLASSES } from "./labels.js";
import { encodeModel, type ModelGraph } from "./onnx.js";
import { ManifestError, type ExportManifest } from "./manifest.js";

export interface ExportResult {
  graphPath: string;
  sidecarPath: string;
  graphBytes: number;
}

export function sidecarPathFor(graphPath: string): string {
  return `${graphPath}.meta.json`;
}

function loadWeightsJson(filePath: string): ClassifierWeights {
  let raw: unknown;
  try {
    raw = JSON.parse(fs.readFileSync(filePath, "utf-8"));
  } catch (err) {
    throw new ManifestError(`cannot read weights file ${filePath}: ${(err as Error).message}`);
  }
  const data = raw as Record<string, unknown>;
  const w = data.w;
  const b = data.b;
  if (
    !Array.isArray(w) ||
    w.length !== 3 ||
    !w.every((row) => Array.isArray(row) && row.length === NUM_CLASSES)
  ) {
    throw new ManifestError(`weights 'w' must be 3x${NUM_CLASSES} nested arrays`);
  }
  if (!Array.isArray(b) || b.length !== NUM_CLASSES) {
    throw new ManifestError(`weights 'b' must have ${NUM_CLASSES} entries`);
  }
  return {
    w: Float32Array.from((w as number[][]).flat().map(Math.fround)),
    b: Float32Array.from((b as number[]).map(Math.fround)),
  };
}

function buildGraph(manifest: ExportManifest): ModelGraph {
  switch (manifest.role) {
    case "classifier": {
      const weights =
        manifest.source.kind === "weights_json"
          ? loadWeightsJson(manifest.source.path)
          : stubClassifierWeights(manifest.source.seed);
      return classifierGraph(weights);
    }
    case "depth":
      return depthGraph(manifest.source.kind === "stub" ? manifest.source.seed : 0);
    case "detector":
      return detectorGraph(manifest.source.kind === "stub" ? manifest.source.seed : 0);
  }
}

function sidecarJson(manifest: ExportManifest): string {
  const sidecar: Record<string, unknown> = {
    role: manifest.role,
    input_shape: manifest.inputShape,
    mean: manifest.normalization.mean,
    std: manifest.normalization.std,
  };
  if (manifest.classNames) {
    sidecar.class_names = manifest.classNames;
  }
  return JSON.stringify(sidecar, null, 2) + "\n";
}

export function exportModel(manifest: ExportManifest): ExportResult {
  const graph = buildGraph(manifest);
  const bytes = encodeModel(graph);
  fs.mkdirSync(path.dirname(manifest.graphPath), { recursive: true });
  fs.writeFileSync(manifest.graphPath, bytes);
  const sidecarPath = sidecarPathFor(manifest.graphPath);
  fs.writeFileSync(sidecarPath, sidecarJson(manifest));
  return { graphPath: manifest.graphPath, sidecarPath, graphBytes: bytes.length };
}
