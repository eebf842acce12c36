export { SKILL_LABELS, NUM_CLASSES } from "./labels.js";
export { encodeModel, FLOAT32 } from "./onnx.js";
export type { ModelGraph, NodeDef, TensorSpec, Initializer, AttrValue } from "./onnx.js";
export {
  ManifestError,
  parseManifest,
  ROLES,
} from "./manifest.js";
export type { ExportManifest, Normalization, Role, Source } from "./manifest.js";
export { exportModel, sidecarPathFor } from "./export.js";
export type { ExportResult } from "./export.js";
export {
  classifierGraph,
  depthGraph,
  detectorGraph,
  stubClassifierWeights,
} from "./graphs.js";
export { mulberry32, normals } from "./rng.js";
