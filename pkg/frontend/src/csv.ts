/**
 * Parsers for the CSV files emitted by the inflecta CLI.
 *
 * Grid files:   frame,gamma,k / values / coord1,coord2,re,im,abs / rows
 * Slice files:  slice,s,gamma,param / values / param,absA,asym,regime,reldev / rows
 * Overlay files: overlay,gamma / values / coord1,coord2 / rows
 *
 * Every parse error names the offending 1-based line.
 */

export interface GridRow {
  c1: number;
  c2: number;
  re: number;
  im: number;
  abs: number;
}

export interface GridData {
  frame: string;
  gamma: number;
  k: number | null;
  rows: GridRow[];
  c1Values: number[];
  c2Values: number[];
}

export interface SliceRow {
  param: number;
  absA: number;
  asym: number;
  regime: string;
  reldev: number;
}

export interface SliceData {
  s: number;
  gamma: number;
  paramName: string;
  rows: SliceRow[];
}

export interface OverlayData {
  name: string;
  points: Array<[number, number]>;
}

export class CsvError extends Error {
  constructor(message: string, public line: number) {
    super(`line ${line}: ${message}`);
  }
}

function splitLines(text: string): string[] {
  return text.split(/\r?\n/);
}

function parseNum(field: string, line: number, what: string): number {
  const v = Number(field);
  if (field.trim() === "" || !Number.isFinite(v)) {
    throw new CsvError(`bad ${what} value "${field}"`, line);
  }
  return v;
}

export function parseGridCsv(text: string): GridData {
  const lines = splitLines(text);
  if (lines.length === 0 || lines[0].trim() !== "frame,gamma,k") {
    throw new CsvError('expected header "frame,gamma,k"', 1);
  }
  const meta = (lines[1] ?? "").split(",");
  if (meta.length !== 3) {
    throw new CsvError("expected frame,gamma,k values", 2);
  }
  const frame = meta[0];
  const gamma = parseNum(meta[1], 2, "gamma");
  const k = meta[2].trim() === "" ? null : parseNum(meta[2], 2, "k");
  if ((lines[2] ?? "").trim() !== "coord1,coord2,re,im,abs") {
    throw new CsvError('expected column header "coord1,coord2,re,im,abs"', 3);
  }
  const rows: GridRow[] = [];
  for (let i = 3; i < lines.length; i++) {
    const ln = lines[i].trim();
    if (ln === "") continue;
    const parts = ln.split(",");
    if (parts.length !== 5) {
      throw new CsvError(`expected 5 fields, got ${parts.length}`, i + 1);
    }
    rows.push({
      c1: parseNum(parts[0], i + 1, "coord1"),
      c2: parseNum(parts[1], i + 1, "coord2"),
      re: parseNum(parts[2], i + 1, "re"),
      im: parseNum(parts[3], i + 1, "im"),
      abs: parseNum(parts[4], i + 1, "abs"),
    });
  }
  if (rows.length === 0) {
    throw new CsvError("grid file contains no data rows", lines.length);
  }
  const c1Values = [...new Set(rows.map((r) => r.c1))].sort((a, b) => a - b);
  const c2Values = [...new Set(rows.map((r) => r.c2))].sort((a, b) => a - b);
  return { frame, gamma, k, rows, c1Values, c2Values };
}

export function parseSliceCsv(text: string): SliceData {
  const lines = splitLines(text);
  if (lines.length === 0 || lines[0].trim() !== "slice,s,gamma,param") {
    throw new CsvError('expected header "slice,s,gamma,param"', 1);
  }
  const meta = (lines[1] ?? "").split(",");
  if (meta.length !== 4) {
    throw new CsvError("expected slice,s,gamma,param values", 2);
  }
  const s = parseNum(meta[1], 2, "s");
  const gamma = parseNum(meta[2], 2, "gamma");
  const paramName = meta[3];
  if ((lines[2] ?? "").trim() !== "param,absA,asym,regime,reldev") {
    throw new CsvError(
      'expected column header "param,absA,asym,regime,reldev"',
      3,
    );
  }
  const rows: SliceRow[] = [];
  for (let i = 3; i < lines.length; i++) {
    const ln = lines[i].trim();
    if (ln === "") continue;
    const parts = ln.split(",");
    if (parts.length !== 5) {
      throw new CsvError(`expected 5 fields, got ${parts.length}`, i + 1);
    }
    rows.push({
      param: parseNum(parts[0], i + 1, "param"),
      absA: parseNum(parts[1], i + 1, "absA"),
      asym: parseNum(parts[2], i + 1, "asym"),
      regime: parts[3],
      reldev: Number(parts[4]),
    });
  }
  if (rows.length === 0) {
    throw new CsvError("slice file contains no data rows", lines.length);
  }
  return { s, gamma, paramName, rows };
}

export function parseOverlayCsv(text: string): OverlayData {
  const lines = splitLines(text);
  if (lines.length === 0 || lines[0].trim() !== "overlay,gamma") {
    throw new CsvError('expected header "overlay,gamma"', 1);
  }
  const meta = (lines[1] ?? "").split(",");
  const name = meta[0] ?? "overlay";
  if ((lines[2] ?? "").trim() !== "coord1,coord2") {
    throw new CsvError('expected column header "coord1,coord2"', 3);
  }
  const points: Array<[number, number]> = [];
  for (let i = 3; i < lines.length; i++) {
    const ln = lines[i].trim();
    if (ln === "") continue;
    const parts = ln.split(",");
    if (parts.length !== 2) {
      throw new CsvError(`expected 2 fields, got ${parts.length}`, i + 1);
    }
    points.push([
      parseNum(parts[0], i + 1, "coord1"),
      parseNum(parts[1], i + 1, "coord2"),
    ]);
  }
  if (points.length === 0) {
    throw new CsvError("overlay file contains no data rows", lines.length);
  }
  return { name, points };
}
