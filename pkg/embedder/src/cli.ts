#!/usr/bin/env node
import { parseArgs } from "node:util";

import { DEFAULT_CONFIG } from "./encoder.js";
import type { Pooling } from "./encoder.js";
import { extractEmbeddings } from "./extract.js";

const USAGE = `usage: embed-extract --manifest <tsv> --out <csv>
                     [--model <name|offline>] [--pooling mean_tokens|cls]
                     [--max-tokens N] [--batch-size N]

Embeds every transcript listed in a dataset manifest and writes the
embedding CSV (header id,e0,...,e{d-1}). --model offline uses a
deterministic hash encoder (1024 dims) that needs no weights.`;

async function main(): Promise<number> {
  let values;
  try {
    ({ values } = parseArgs({
      options: {
        manifest: { type: "string" },
        out: { type: "string" },
        model: { type: "string", default: DEFAULT_CONFIG.model },
        pooling: { type: "string", default: DEFAULT_CONFIG.pooling },
        "max-tokens": { type: "string", default: String(DEFAULT_CONFIG.maxTokens) },
        "batch-size": { type: "string", default: String(DEFAULT_CONFIG.batchSize) },
        help: { type: "boolean", default: false },
      },
    }));
  } catch (err) {
    console.error(`error: ${(err as Error).message}\n\n${USAGE}`);
    return 2;
  }
  if (values.help) {
    console.log(USAGE);
    return 0;
  }
  if (!values.manifest || !values.out) {
    console.error(`error: --manifest and --out are required\n\n${USAGE}`);
    return 2;
  }
  if (values.pooling !== "mean_tokens" && values.pooling !== "cls") {
    console.error(`error: unknown pooling "${values.pooling}"`);
    return 2;
  }
  const maxTokens = Number(values["max-tokens"]);
  const batchSize = Number(values["batch-size"]);
  if (!Number.isInteger(maxTokens) || !Number.isInteger(batchSize)) {
    console.error("error: --max-tokens and --batch-size must be integers");
    return 2;
  }
  try {
    const dim = await extractEmbeddings(values.manifest, values.out, {
      model: values.model,
      pooling: values.pooling as Pooling,
      maxTokens,
      batchSize,
    });
    console.log(`wrote ${values.out} (${dim} dimensions)`);
    return 0;
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}

main().then((code) => {
  process.exitCode = code;
});
