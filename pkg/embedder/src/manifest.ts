import * as fs from "node:fs";
import * as path from "node:path";

export interface ManifestRow {
  id: string;
  label: string;
  /** absolute path to the transcript file */
  file: string;
}

const LABELS = new Set(["control", "mci", "possible_ad", "probable_ad"]);

/**
 * Load a tab-separated dataset manifest (`id<TAB>label<TAB>path`).
 * Relative transcript paths resolve against the manifest's directory.
 */
export function loadManifest(manifestPath: string): ManifestRow[] {
  const text = fs.readFileSync(manifestPath, "utf-8");
  const lines = text.split("\n");
  if (lines.length === 0 || lines[0].trim() !== "id\tlabel\tpath") {
    throw new Error(`${manifestPath}: first line must be "id\\tlabel\\tpath"`);
  }
  const baseDir = path.dirname(path.resolve(manifestPath));
  const rows: ManifestRow[] = [];
  const seen = new Set<string>();
  for (let i = 1; i < lines.length; i++) {
    const line = lines[i];
    if (line.trim() === "") continue;
    const fields = line.split("\t");
    if (fields.length !== 3) {
      throw new Error(`${manifestPath}:${i + 1}: expected 3 tab-separated fields, got ${fields.length}`);
    }
    const [id, label, rel] = fields;
    if (!LABELS.has(label)) {
      throw new Error(`${manifestPath}:${i + 1}: unknown label "${label}"`);
    }
    if (seen.has(id)) {
      throw new Error(`${manifestPath}:${i + 1}: duplicate id "${id}"`);
    }
    seen.add(id);
    const file = path.isAbsolute(rel) ? rel : path.join(baseDir, rel);
    if (!fs.existsSync(file)) {
      throw new Error(`${manifestPath}:${i + 1}: transcript file not found: ${file}`);
    }
    rows.push({ id, label, file });
  }
  return rows;
}

/** Extract utterance text from one participant-annotated transcript line body. */
function stripAnnotations(body: string): string {
  return body
    .replace(/\x15[^\x15]*\x15/g, " ") // inline timecodes
    .replace(/\[[^\]]*\]/g, " ") // bracketed codes
    .replace(/<([^<>]*)>/g, "$1") // retrace groups keep inner words
    .replace(/&\S+/g, " ") // filler tokens
    .replace(/\(\.+\)/g, " ") // pause marks
    // special terminator codes; a trailing sentence mark survives
    .replace(/\+\S+/g, (code) => {
      const last = code[code.length - 1];
      return ".?!".includes(last) ? " " + last : " ";
    })
    .replace(/\s+/g, " ")
    .trim();
}

/**
 * Read a transcript file. `.cha` files keep only `*PAR:` tier lines
 * (with their tab-indented continuations); everything else is read verbatim.
 */
export function readTranscript(file: string): string {
  const raw = fs.readFileSync(file, "utf-8");
  if (!file.endsWith(".cha")) {
    return raw.trim();
  }
  const pieces: string[] = [];
  let inPar = false;
  for (const line of raw.split("\n")) {
    if (line.startsWith("*PAR:")) {
      inPar = true;
      pieces.push(stripAnnotations(line.slice("*PAR:".length)));
    } else if (inPar && (line.startsWith("\t") || line.startsWith("    "))) {
      pieces.push(stripAnnotations(line));
    } else {
      inPar = false;
    }
  }
  return pieces.filter((p) => p !== "").join(" ").trim();
}
