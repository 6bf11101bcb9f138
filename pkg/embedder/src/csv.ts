import * as fs from "node:fs";

/**
 * Write embeddings in the shared CSV schema: header `id,e0,...,e{d-1}`,
 * one row per sample, values as shortest round-trip decimal text.
 */
export function writeEmbeddingCsv(
  outPath: string,
  ids: string[],
  vectors: Float64Array[],
): void {
  if (ids.length !== vectors.length) {
    throw new Error(`${ids.length} ids for ${vectors.length} vectors`);
  }
  const dim = vectors.length > 0 ? vectors[0].length : 0;
  const header = ["id", ...Array.from({ length: dim }, (_, i) => `e${i}`)];
  const lines = [header.join(",")];
  for (let r = 0; r < ids.length; r++) {
    const vec = vectors[r];
    if (vec.length !== dim) {
      throw new Error(`row ${ids[r]}: dimension ${vec.length}, expected ${dim}`);
    }
    const cells = new Array<string>(dim + 1);
    cells[0] = ids[r];
    for (let i = 0; i < dim; i++) {
      const v = vec[i];
      if (!Number.isFinite(v)) {
        throw new Error(`row ${ids[r]}: non-finite value in column e${i}`);
      }
      cells[i + 1] = String(v);
    }
    lines.push(cells.join(","));
  }
  fs.writeFileSync(outPath, lines.join("\n") + "\n", "utf-8");
}
