/**
 * Class ordering contract shared with the inference runtime.
 *
 * Classifier sidecars must list class names in exactly this order; the
 * runtime refuses to load a classifier whose sidecar disagrees.
 */
export const SKILL_LABELS = [
  "BL",
  "FL",
  "FLAG",
  "IC",
  "MAL",
  "OAFL",
  "OAHS",
  "PL",
  "VSIT",
  "NONE",
] as const;

export const NUM_CLASSES = SKILL_LABELS.length;
