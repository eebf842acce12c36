import fs from "node:fs";
import os from "node:os";
import path from "node:path";

import { afterEach, beforeEach, describe, expect, it } from "vitest";

import { exportModel, sidecarPathFor } from "../src/export.js";
import { SKILL_LABELS } from "../src/labels.js";
import { parseManifest, type ExportManifest } from "../src/manifest.js";

let tmp: string;

beforeEach(() => {
  tmp = fs.mkdtempSync(path.join(os.tmpdir(), "model-export-"));
});

afterEach(() => {
  fs.rmSync(tmp, { recursive: true, force: true });
});

function stubManifest(role: string, extra: Record<string, unknown> = {}): ExportManifest {
  const base: Record<string, unknown> = {
    role,
    source: { kind: "stub", seed: 5 },
    graph_path: `${role}.onnx`,
    normalization: { mean: [0, 0, 0], std: [1, 1, 1] },
    ...extra,
  };
  if (role === "classifier") {
    base.input_shape = [1, 3, 224, 224];
    base.class_names = [...SKILL_LABELS];
  } else if (role === "detector") {
    base.input_shape = [1, 3, 640, 640];
  } else {
    base.input_shape = [1, 3, "h", "w"];
  }
  return parseManifest({ ...base, ...extra }, tmp);
}

describe("exportModel", () => {
  it.each(["classifier", "depth", "detector"])("writes graph and sidecar for %s", (role) => {
    const result = exportModel(stubManifest(role));
    expect(fs.existsSync(result.graphPath)).toBe(true);
    expect(fs.existsSync(result.sidecarPath)).toBe(true);
    expect(result.graphBytes).toBeGreaterThan(50);
    const sidecar = JSON.parse(fs.readFileSync(result.sidecarPath, "utf-8"));
    expect(sidecar.role).toBe(role);
    expect(sidecar.mean).toHaveLength(3);
    expect(sidecar.std).toHaveLength(3);
    if (role === "classifier") {
      expect(sidecar.class_names).toEqual([...SKILL_LABELS]);
    } else {
      expect(sidecar.class_names).toBeUndefined();
    }
  });

  it("is deterministic for the same manifest", () => {
    const manifest = stubManifest("classifier");
    exportModel(manifest);
    const first = fs.readFileSync(manifest.graphPath);
    const firstSidecar = fs.readFileSync(sidecarPathFor(manifest.graphPath));
    exportModel(manifest);
    expect(fs.readFileSync(manifest.graphPath).equals(first)).toBe(true);
    expect(fs.readFileSync(sidecarPathFor(manifest.graphPath)).equals(firstSidecar)).toBe(true);
  });

  it("different seeds give different graphs", () => {
    const a = stubManifest("classifier");
    exportModel(a);
    const bytesA = fs.readFileSync(a.graphPath);
    const b = stubManifest("classifier", {
      source: { kind: "stub", seed: 6 },
      graph_path: "other.onnx",
    });
    exportModel(b);
    expect(fs.readFileSync(b.graphPath).equals(bytesA)).toBe(false);
  });

  it("converts classifier weights from a weights_json dump", () => {
    const weights = {
      w: Array.from({ length: 3 }, (_, r) =>
        Array.from({ length: 10 }, (_, c) => 0.1 * r - 0.05 * c),
      ),
      b: Array.from({ length: 10 }, (_, c) => 0.01 * c),
    };
    const weightsPath = path.join(tmp, "weights.json");
    fs.writeFileSync(weightsPath, JSON.stringify(weights));
    const manifest = stubManifest("classifier", {
      source: { kind: "weights_json", path: "weights.json" },
    });
    const result = exportModel(manifest);
    expect(fs.existsSync(result.graphPath)).toBe(true);
  });

  it("rejects malformed weight dumps", () => {
    const weightsPath = path.join(tmp, "weights.json");
    fs.writeFileSync(weightsPath, JSON.stringify({ w: [[1, 2]], b: [1] }));
    const manifest = stubManifest("classifier", {
      source: { kind: "weights_json", path: "weights.json" },
    });
    expect(() => exportModel(manifest)).toThrow(/3x10/);
  });
});
