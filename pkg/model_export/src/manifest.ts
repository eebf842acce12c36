/**
 * Export manifests: what to convert, for which role, and the metadata the
 * runtime needs alongside the graph.
 *
 * Sources:
 *  - "stub": deterministic placeholder weights from a seed. Lets the whole
 *    toolchain and runtime validation run where the real checkpoints are
 *    not available; graphs have the exact shapes of the real exports.
 *  - "weights_json": a JSON file with the classifier head weights
 *    ({"w": 3x10 nested arrays, "b": [10]}), for converting externally
 *    dumped weights without a training framework on this side.
 */

import path from "node:path";

import { NUM_CLASSES, SKILL_LABELS } from "./labels.js";

export type Role = "detector" | "depth" | "classifier";

export const ROLES: Role[] = ["detector", "depth", "classifier"];

export interface Normalization {
  mean: [number, number, number];
  std: [number, number, number];
}

export type Source =
  | { kind: "stub"; seed: number }
  | { kind: "weights_json"; path: string };

export interface ExportManifest {
  role: Role;
  source: Source;
  graphPath: string;
  inputShape: (number | string)[];
  normalization: Normalization;
  classNames?: string[];
}

export class ManifestError extends Error {}

const EXPECTED_INPUT: Record<Role, (number | string)[]> = {
  classifier: [1, 3, 224, 224],
  detector: [1, 3, 640, 640],
  depth: [1, 3, "h", "w"],
};

function asTriple(value: unknown, what: string): [number, number, number] {
  if (!Array.isArray(value) || value.length !== 3 || !value.every((v) => typeof v === "number")) {
    throw new ManifestError(`${what} must be an array of 3 numbers`);
  }
  return [value[0], value[1], value[2]];
}

function parseSource(raw: unknown): Source {
  if (typeof raw !== "object" || raw === null) {
    throw new ManifestError("source must be an object");
  }
  const source = raw as Record<string, unknown>;
  if (source.kind === "stub") {
    const seed = source.seed ?? 0;
    if (typeof seed !== "number" || !Number.isInteger(seed) || seed < 0) {
      throw new ManifestError("stub seed must be a non-negative integer");
    }
    return { kind: "stub", seed };
  }
  if (source.kind === "weights_json") {
    if (typeof source.path !== "string" || source.path.length === 0) {
      throw new ManifestError("weights_json source needs a path");
    }
    return { kind: "weights_json", path: source.path };
  }
  throw new ManifestError(`unknown source kind ${JSON.stringify(source.kind)}`);
}

function checkInputShape(role: Role, shape: unknown): (number | string)[] {
  if (!Array.isArray(shape)) {
    throw new ManifestError("input_shape must be an array");
  }
  const expected = EXPECTED_INPUT[role];
  if (shape.length !== expected.length) {
    throw new ManifestError(
      `${role} input_shape must have rank ${expected.length}, got ${shape.length}`,
    );
  }
  expected.forEach((want, i) => {
    const got = shape[i];
    if (typeof want === "number") {
      if (got !== want) {
        throw new ManifestError(
          `${role} input_shape[${i}] must be ${want}, got ${JSON.stringify(got)}`,
        );
      }
    } else if (typeof got !== "number" && typeof got !== "string") {
      throw new ManifestError(`${role} input_shape[${i}] must be a number or dimension name`);
    }
  });
  return shape as (number | string)[];
}

function checkClassNames(names: unknown): string[] {
  if (!Array.isArray(names)) {
    throw new ManifestError("classifier manifests require class_names");
  }
  if (names.length !== NUM_CLASSES) {
    throw new ManifestError(`class_names must have ${NUM_CLASSES} entries, got ${names.length}`);
  }
  names.forEach((name, i) => {
    if (name !== SKILL_LABELS[i]) {
      throw new ManifestError(
        `class_names[${i}] must be ${SKILL_LABELS[i]!}, got ${JSON.stringify(name)}; ` +
          "ordering must match the runtime label order exactly",
      );
    }
  });
  return names as string[];
}

/** Parse and validate a manifest object; paths resolve against baseDir. */
export function parseManifest(raw: unknown, baseDir: string): ExportManifest {
  if (typeof raw !== "object" || raw === null) {
    throw new ManifestError("manifest must be a JSON object");
  }
  const data = raw as Record<string, unknown>;
  const role = data.role;
  if (role !== "detector" && role !== "depth" && role !== "classifier") {
    throw new ManifestError(`role must be one of ${ROLES.join(", ")}, got ${JSON.stringify(role)}`);
  }
  if (typeof data.graph_path !== "string" || data.graph_path.length === 0) {
    throw new ManifestError("graph_path is required");
  }
  const norm = data.normalization as Record<string, unknown> | undefined;
  if (typeof norm !== "object" || norm === null) {
    throw new ManifestError("normalization with mean/std is required");
  }
  const mean = asTriple(norm.mean, "normalization.mean");
  const std = asTriple(norm.std, "normalization.std");
  if (std.some((s) => s === 0)) {
    throw new ManifestError("normalization.std channels must be nonzero");
  }
  const source = parseSource(data.source);
  if (source.kind === "weights_json" && role !== "classifier") {
    throw new ManifestError("weights_json conversion is only defined for the classifier role");
  }
  const manifest: ExportManifest = {
    role,
    source:
      source.kind === "weights_json"
        ? { kind: "weights_json", path: path.resolve(baseDir, source.path) }
        : source,
    graphPath: path.resolve(baseDir, data.graph_path),
    inputShape: checkInputShape(role, data.input_shape),
    normalization: { mean, std },
  };
  if (role === "classifier") {
    manifest.classNames = checkClassNames(data.class_names);
  } else if (data.class_names !== undefined) {
    throw new ManifestError(`class_names is only valid for classifiers, not ${role}`);
  }
  return manifest;
}
