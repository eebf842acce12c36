/**
 * Graph topologies for the three roles.
 *
 * Each mirrors the tensor contract the runtime validates: classifier
 * 1x3x224x224 -> 10 logits, depth image -> same-size map, detector
 * letterboxed 1x3x640x640 -> (n, 5) rows of x0,y0,x1,y1,confidence in
 * letterbox pixel coordinates.
 */

import { FLOAT32, type ModelGraph } from "./onnx.js";
import { NUM_CLASSES } from "./labels.js";
import { mulberry32, normals } from "./rng.js";

export interface ClassifierWeights {
  w: Float32Array; // 3 x NUM_CLASSES, row-major
  b: Float32Array; // NUM_CLASSES
}

export function stubClassifierWeights(seed: number): ClassifierWeights {
  const rng = mulberry32(seed);
  return {
    w: normals(rng, 3 * NUM_CLASSES, 0.5),
    b: normals(rng, NUM_CLASSES, 0.5),
  };
}

export function classifierGraph(weights: ClassifierWeights): ModelGraph {
  if (weights.w.length !== 3 * NUM_CLASSES) {
    throw new Error(`classifier weights must be 3x${NUM_CLASSES}, got ${weights.w.length} values`);
  }
  if (weights.b.length !== NUM_CLASSES) {
    throw new Error(`classifier bias must have ${NUM_CLASSES} values, got ${weights.b.length}`);
  }
  return {
    name: "skill-classifier",
    inputs: [{ name: "images", elemType: FLOAT32, shape: [1, 3, 224, 224] }],
    outputs: [{ name: "logits", elemType: FLOAT32, shape: [1, NUM_CLASSES] }],
    initializers: [
      { name: "head_w", dtype: "float32", dims: [3, NUM_CLASSES], data: weights.w },
      { name: "head_b", dtype: "float32", dims: [NUM_CLASSES], data: weights.b },
    ],
    nodes: [
      { opType: "GlobalAveragePool", inputs: ["images"], outputs: ["pooled"] },
      { opType: "Flatten", inputs: ["pooled"], outputs: ["features"], attrs: { axis: { kind: "int", value: 1 } } },
      {
        opType: "Gemm",
        inputs: ["features", "head_w", "head_b"],
        outputs: ["logits"],
        attrs: { alpha: { kind: "float", value: 1.0 }, beta: { kind: "float", value: 1.0 } },
      },
    ],
  };
}

export function depthGraph(seed: number): ModelGraph {
  const rng = mulberry32(seed);
  const scale = Math.fround(0.5 + rng() * 1.5);
  const bias = Math.fround(rng() * 0.25);
  return {
    name: "relative-depth",
    inputs: [{ name: "images", elemType: FLOAT32, shape: [1, 3, "h", "w"] }],
    outputs: [{ name: "depth", elemType: FLOAT32, shape: [1, "h", "w"] }],
    initializers: [
      { name: "scale", dtype: "float32", dims: [], data: Float32Array.of(scale) },
      { name: "bias", dtype: "float32", dims: [], data: Float32Array.of(bias) },
    ],
    nodes: [
      {
        opType: "ReduceMean",
        inputs: ["images"],
        outputs: ["channel_mean"],
        attrs: { axes: { kind: "ints", value: [1] }, keepdims: { kind: "int", value: 0 } },
      },
      { opType: "Mul", inputs: ["channel_mean", "scale"], outputs: ["scaled"] },
      { opType: "Add", inputs: ["scaled", "bias"], outputs: ["depth"] },
    ],
  };
}

/** Plausible letterbox-coordinate person boxes; confidences span the threshold. */
const STUB_BOX_TEMPLATE = [
  [200, 120, 440, 560, 0.88],
  [40, 80, 120, 320, 0.35],
  [500, 100, 620, 420, 0.6],
  [300, 300, 316, 332, 0.15],
];

export function detectorGraph(seed: number): ModelGraph {
  const rng = mulberry32(seed);
  const rows = STUB_BOX_TEMPLATE.map(([x0, y0, x1, y1, conf]) => {
    const dx = Math.fround((rng() - 0.5) * 16);
    const dy = Math.fround((rng() - 0.5) * 16);
    return [x0 + dx, y0 + dy, x1 + dx, y1 + dy, conf];
  });
  const n = rows.length;
  const flat = Float32Array.from(rows.flat().map(Math.fround));
  return {
    name: "person-detector",
    inputs: [{ name: "images", elemType: FLOAT32, shape: [1, 3, 640, 640] }],
    outputs: [{ name: "detections", elemType: FLOAT32, shape: [n, 5] }],
    initializers: [
      { name: "zero_w", dtype: "float32", dims: [3, n * 5], data: new Float32Array(3 * n * 5) },
      { name: "boxes", dtype: "float32", dims: [n * 5], data: flat },
      { name: "out_shape", dtype: "int64", dims: [2], data: BigInt64Array.from([BigInt(n), 5n]) },
    ],
    nodes: [
      { opType: "GlobalAveragePool", inputs: ["images"], outputs: ["pooled"] },
      { opType: "Flatten", inputs: ["pooled"], outputs: ["features"], attrs: { axis: { kind: "int", value: 1 } } },
      { opType: "Gemm", inputs: ["features", "zero_w", "boxes"], outputs: ["raw"] },
      { opType: "Reshape", inputs: ["raw", "out_shape"], outputs: ["detections"] },
    ],
  };
}
