/**
 * Parser for the stem-bank manifest served at /stems/manifest.txt: flat
 * `key = value` lines naming the five stem WAV files plus the bank's sample
 * rate, tempo and loop length. A manifest that does not name all five stems
 * is rejected up front — better a visible load error than a mix with a
 * silently missing instrument.
 */

import { INSTRUMENTS, type Instrument } from "./protocol.js";

export interface StemManifest {
  files: Record<Instrument, string>;
  sampleRateHz: number;
  bpm: number;
  loopLenSamples: number;
}

export class ManifestError extends Error {}

function requireNumber(values: Map<string, string>, key: string): number {
  const raw = values.get(key);
  if (raw === undefined) throw new ManifestError(`manifest missing key '${key}'`);
  const value = Number(raw);
  if (!Number.isFinite(value)) {
    throw new ManifestError(`manifest key '${key}' is not a number: '${raw}'`);
  }
  return value;
}

export function parseManifest(text: string): StemManifest {
  const values = new Map<string, string>();
  for (const line of text.split("\n")) {
    const trimmed = line.trim();
    if (trimmed === "") continue;
    const eq = trimmed.indexOf("=");
    if (eq < 0) throw new ManifestError(`malformed manifest line: '${trimmed}'`);
    values.set(trimmed.slice(0, eq).trim(), trimmed.slice(eq + 1).trim());
  }

  const files = {} as Record<Instrument, string>;
  for (const name of INSTRUMENTS) {
    const file = values.get(`${name}_file`);
    if (file === undefined || file === "") {
      throw new ManifestError(`manifest is missing the ${name} stem`);
    }
    files[name] = file;
  }
  return {
    files,
    sampleRateHz: requireNumber(values, "sample_rate_hz"),
    bpm: requireNumber(values, "bpm"),
    loopLenSamples: requireNumber(values, "loop_len_samples"),
  };
}
