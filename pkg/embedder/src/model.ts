import type { EncoderBackend, Pooling } from "./encoder.js";

/**
 * Pretrained-encoder backend loaded lazily through a feature-extraction
 * pipeline. The npm package and the model weights are both resolved at
 * runtime; either one missing is a fatal, clearly attributed error.
 */
export async function loadModelBackend(model: string): Promise<EncoderBackend> {
  const spec = "@huggingface/transformers";
  let mod: any;
  try {
    mod = await import(spec);
  } catch {
    throw new Error(
      `model backend unavailable: install ${spec} to use model "${model}" ` +
        `(or pass --model offline for the deterministic stand-in encoder)`,
    );
  }
  let pipe: any;
  try {
    pipe = await mod.pipeline("feature-extraction", model);
  } catch (err) {
    throw new Error(`failed to load model "${model}": ${(err as Error).message}`);
  }
  const hiddenSize: number = pipe.model?.config?.hidden_size;
  if (!Number.isInteger(hiddenSize) || hiddenSize <= 0) {
    throw new Error(`model "${model}" does not expose a hidden size`);
  }
  return {
    hiddenSize,
    tokenize(text: string): string[] {
      return pipe.tokenizer.tokenize(text.toLowerCase());
    },
    async encodeBatch(batches: string[][], pooling: Pooling): Promise<Float64Array[]> {
      const out: Float64Array[] = [];
      for (const tokens of batches) {
        const result = await pipe(tokens.join(" "), {
          pooling: pooling === "cls" ? "cls" : "mean",
          normalize: false,
        });
        out.push(Float64Array.from(result.data as Iterable<number>));
      }
      return out;
    },
  };
}
