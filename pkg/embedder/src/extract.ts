import { writeEmbeddingCsv } from "./csv.js";
import { DEFAULT_CONFIG, OfflineEncoder } from "./encoder.js";
import type { EncoderBackend, ExtractorConfig } from "./encoder.js";
import { loadManifest, readTranscript } from "./manifest.js";
import { loadModelBackend } from "./model.js";

async function backendFor(cfg: ExtractorConfig): Promise<EncoderBackend> {
  if (cfg.model === "offline") {
    return new OfflineEncoder();
  }
  return loadModelBackend(cfg.model);
}

/**
 * Embed every transcript named by the manifest and write the embedding CSV.
 * Returns the emitted dimension.
 */
export async function extractEmbeddings(
  manifestPath: string,
  outPath: string,
  overrides: Partial<ExtractorConfig> = {},
): Promise<number> {
  const cfg: ExtractorConfig = { ...DEFAULT_CONFIG, ...overrides };
  if (cfg.maxTokens < 1) throw new Error("maxTokens must be >= 1");
  if (cfg.batchSize < 1) throw new Error("batchSize must be >= 1");
  const rows = loadManifest(manifestPath);
  const backend = await backendFor(cfg);

  const sequences: string[][] = [];
  for (const row of rows) {
    const text = readTranscript(row.file);
    const tokens = backend.tokenize(text);
    if (tokens.length === 0) {
      throw new Error(`empty transcript for id "${row.id}" (${row.file})`);
    }
    if (tokens.length > cfg.maxTokens) {
      console.warn(
        `id "${row.id}": ${tokens.length} tokens exceed the ${cfg.maxTokens}-token window; truncating`,
      );
      sequences.push(tokens.slice(0, cfg.maxTokens));
    } else {
      sequences.push(tokens);
    }
  }

  const vectors: Float64Array[] = [];
  for (let start = 0; start < sequences.length; start += cfg.batchSize) {
    const batch = sequences.slice(start, start + cfg.batchSize);
    vectors.push(...(await backend.encodeBatch(batch, cfg.pooling)));
  }
  writeEmbeddingCsv(
    outPath,
    rows.map((r) => r.id),
    vectors,
  );
  return backend.hiddenSize;
}
