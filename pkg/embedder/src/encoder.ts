export type Pooling = "mean_tokens" | "cls";

export interface ExtractorConfig {
  /** "offline" selects the deterministic hash encoder; anything else names a pretrained model */
  model: string;
  pooling: Pooling;
  maxTokens: number;
  batchSize: number;
}

export const DEFAULT_CONFIG: ExtractorConfig = {
  model: "offline",
  pooling: "mean_tokens",
  maxTokens: 512,
  batchSize: 8,
};

export interface EncoderBackend {
  readonly hiddenSize: number;
  /** Tokenize lowercased text into model tokens. */
  tokenize(text: string): string[];
  /** Encode one batch of pre-truncated token sequences into pooled vectors. */
  encodeBatch(batches: string[][], pooling: Pooling): Promise<Float64Array[]>;
}

const OFFLINE_DIM = 1024;

/** FNV-1a 64-bit over UTF-16 code units. */
function hash64(text: string): bigint {
  let h = 0xcbf29ce484222325n;
  for (let i = 0; i < text.length; i++) {
    h ^= BigInt(text.charCodeAt(i));
    h = (h * 0x100000001b3n) & 0xffffffffffffffffn;
  }
  return h;
}

/** splitmix64 stream mapped to floats in [-1, 1). */
function vectorFromSeed(seed: bigint, dim: number): Float64Array {
  const out = new Float64Array(dim);
  let state = seed;
  const mask = 0xffffffffffffffffn;
  for (let i = 0; i < dim; i++) {
    state = (state + 0x9e3779b97f4a7c15n) & mask;
    let z = state;
    z = ((z ^ (z >> 30n)) * 0xbf58476d1ce4e5b9n) & mask;
    z = ((z ^ (z >> 27n)) * 0x94d049bb133111ebn) & mask;
    z = z ^ (z >> 31n);
    // top 53 bits give a full-precision double in [0, 1)
    out[i] = Number(z >> 11n) / 2 ** 53 * 2 - 1;
  }
  return out;
}

/**
 * Deterministic stand-in encoder: every token maps to a fixed pseudo-random
 * vector derived from its hash, so identical text always embeds identically.
 * No weights, no network; useful for plumbing tests and schema work.
 */
export class OfflineEncoder implements EncoderBackend {
  readonly hiddenSize = OFFLINE_DIM;
  private cache = new Map<string, Float64Array>();

  tokenize(text: string): string[] {
    return text.toLowerCase().match(/[a-z0-9]+/g) ?? [];
  }

  private tokenVector(token: string): Float64Array {
    let vec = this.cache.get(token);
    if (!vec) {
      vec = vectorFromSeed(hash64(token), this.hiddenSize);
      this.cache.set(token, vec);
    }
    return vec;
  }

  async encodeBatch(batches: string[][], pooling: Pooling): Promise<Float64Array[]> {
    return batches.map((tokens) => {
      if (pooling === "cls") {
        // whole-sequence fingerprint playing the role of the classifier token
        return vectorFromSeed(hash64("" + tokens.join("")), this.hiddenSize);
      }
      const out = new Float64Array(this.hiddenSize);
      for (const token of tokens) {
        const vec = this.tokenVector(token);
        for (let i = 0; i < out.length; i++) out[i] += vec[i];
      }
      for (let i = 0; i < out.length; i++) out[i] /= tokens.length;
      return out;
    });
  }
}
