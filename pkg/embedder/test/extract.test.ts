import { execFileSync } from "node:child_process";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { afterEach, expect, test, vi } from "vitest";

import { extractEmbeddings } from "../src/extract";

let dirs: string[] = [];

function tmpdir(): string {
  const d = fs.mkdtempSync(path.join(os.tmpdir(), "embx-"));
  dirs.push(d);
  return d;
}

afterEach(() => {
  for (const d of dirs) fs.rmSync(d, { recursive: true, force: true });
  dirs = [];
  vi.restoreAllMocks();
});

/** Five transcripts, one per label plus a CHAT-format file. */
function fixture(): { dir: string; manifest: string } {
  const dir = tmpdir();
  const texts: Array<[string, string, string]> = [
    ["c1", "control", "the boy reaches for the cookie jar on the top shelf."],
    ["c2", "control", "mother is drying dishes while the sink overflows."],
    ["m1", "mci", "the boy is um taking cookies and the stool tips."],
    ["p1", "possible_ad", "water on the floor. the girl laughs."],
  ];
  const rows: string[] = [];
  for (const [id, label, text] of texts) {
    fs.writeFileSync(path.join(dir, `${id}.txt`), text + "\n");
    rows.push(`${id}\t${label}\t${id}.txt`);
  }
  fs.writeFileSync(
    path.join(dir, "q1.cha"),
    "@Begin\n*PAR:\tthe &uh jar falls down .\n*INV:\tmhm .\n@End\n",
  );
  rows.push("q1\tprobable_ad\tq1.cha");
  const manifest = path.join(dir, "manifest.tsv");
  fs.writeFileSync(manifest, "id\tlabel\tpath\n" + rows.join("\n") + "\n");
  return { dir, manifest };
}

test("five-transcript manifest produces a 1024-dim CSV the pipeline loader accepts", async () => {
  const { dir, manifest } = fixture();
  const out = path.join(dir, "emb.csv");
  const dim = await extractEmbeddings(manifest, out);
  expect(dim).toBe(1024);
  const header = fs.readFileSync(out, "utf-8").split("\n")[0];
  expect(header.startsWith("id,e0,e1,")).toBe(true);
  expect(header.split(",")).toHaveLength(1025);

  // the python pipeline's own loader is the schema authority
  const check = execFileSync(
    "python3",
    [
      "-c",
      [
        "import sys",
        "from cogspeech.corpus import load_manifest",
        "from cogspeech.embeddings import load_embedding_csv",
        "ds = load_manifest(sys.argv[1])",
        "m = load_embedding_csv(sys.argv[2], ds, expected_dim=1024)",
        "print(m.rows.shape)",
      ].join("\n"),
      manifest,
      out,
    ],
    { encoding: "utf-8" },
  );
  expect(check.trim()).toBe("(5, 1024)");
});

test("two runs produce byte-identical files", async () => {
  const { dir, manifest } = fixture();
  const outA = path.join(dir, "a.csv");
  const outB = path.join(dir, "b.csv");
  await extractEmbeddings(manifest, outA);
  await extractEmbeddings(manifest, outB);
  expect(fs.readFileSync(outA)).toEqual(fs.readFileSync(outB));
});

test("batch size does not change the output", async () => {
  const { dir, manifest } = fixture();
  const outA = path.join(dir, "a.csv");
  const outB = path.join(dir, "b.csv");
  await extractEmbeddings(manifest, outA, { batchSize: 1 });
  await extractEmbeddings(manifest, outB, { batchSize: 64 });
  expect(fs.readFileSync(outA)).toEqual(fs.readFileSync(outB));
});

test("over-long transcripts are truncated with a warning, not an error", async () => {
  const { dir, manifest } = fixture();
  const warn = vi.spyOn(console, "warn").mockImplementation(() => {});
  const out = path.join(dir, "emb.csv");
  await extractEmbeddings(manifest, out, { maxTokens: 3 });
  expect(warn).toHaveBeenCalled();
  expect(String(warn.mock.calls[0][0])).toMatch(/truncating/);
  expect(fs.existsSync(out)).toBe(true);
});

test("empty transcript is a fatal error naming the id", async () => {
  const dir = tmpdir();
  fs.writeFileSync(path.join(dir, "a.txt"), "   \n");
  const manifest = path.join(dir, "manifest.tsv");
  fs.writeFileSync(manifest, "id\tlabel\tpath\na\tcontrol\ta.txt\n");
  await expect(extractEmbeddings(manifest, path.join(dir, "emb.csv"))).rejects.toThrow(
    /empty transcript for id "a"/,
  );
});

test("a model backend that cannot load is fatal", async () => {
  const { dir, manifest } = fixture();
  await expect(
    extractEmbeddings(manifest, path.join(dir, "emb.csv"), { model: "no-such-model" }),
  ).rejects.toThrow(/model/);
});

test("pooling choice changes the vectors", async () => {
  const { dir, manifest } = fixture();
  const outA = path.join(dir, "a.csv");
  const outB = path.join(dir, "b.csv");
  await extractEmbeddings(manifest, outA, { pooling: "mean_tokens" });
  await extractEmbeddings(manifest, outB, { pooling: "cls" });
  expect(fs.readFileSync(outA)).not.toEqual(fs.readFileSync(outB));
});
