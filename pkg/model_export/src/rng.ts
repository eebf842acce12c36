/** Deterministic PRNG so stub exports are reproducible byte-for-byte. */

export function mulberry32(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

/** Standard normals via Box-Muller, scaled; fp32 to match the graph dtype. */
export function normals(rng: () => number, count: number, scale = 1.0): Float32Array {
  const out = new Float32Array(count);
  for (let i = 0; i < count; i += 2) {
    const u = Math.max(rng(), 1e-12);
    const v = rng();
    const r = Math.sqrt(-2.0 * Math.log(u));
    out[i] = Math.fround(r * Math.cos(2 * Math.PI * v) * scale);
    if (i + 1 < count) {
      out[i + 1] = Math.fround(r * Math.sin(2 * Math.PI * v) * scale);
    }
  }
  return out;
}
