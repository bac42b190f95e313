import assert from "node:assert/strict";
import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { test } from "node:test";
import { fileURLToPath } from "node:url";

import {
  CsvError,
  parseGridCsv,
  parseOverlayCsv,
  parseSliceCsv,
} from "../src/csv.js";

const HERE = dirname(fileURLToPath(import.meta.url));
const DATA = join(HERE, "..", "..", "testdata");

function fixture(name: string): string {
  return readFileSync(join(DATA, name), "utf-8");
}

test("grid fixture parses with axes recovered", () => {
  const grid = parseGridCsv(fixture("fig1.csv"));
  assert.equal(grid.frame, "sn");
  assert.ok(Math.abs(grid.gamma - 4 / 9) < 1e-15);
  assert.equal(grid.k, null);
  assert.equal(grid.c1Values.length, 25);
  assert.equal(grid.c2Values.length, 28);
  assert.equal(grid.rows.length, 25 * 28);
  for (const r of grid.rows) {
    assert.ok(Number.isFinite(r.abs));
  }
});

test("slice fixture parses with regime tags", () => {
  const slice = parseSliceCsv(fixture("fig4b.csv"));
  assert.equal(slice.paramName, "khat");
  assert.equal(slice.rows.length, 81);
  const regimes = new Set(slice.rows.map((r) => r.regime));
  for (const r of regimes) {
    assert.ok(["outer_dark", "outer_bright", "fresnel"].includes(r));
  }
});

test("overlay fixture parses", () => {
  const ov = parseOverlayCsv(fixture("fig1.csv.overlay.csv"));
  assert.equal(ov.name, "cubic");
  assert.equal(ov.points.length, 25);
});

test("malformed grid row reports its line number", () => {
  const text =
    "frame,gamma,k\nsn,0.444,\ncoord1,coord2,re,im,abs\n1,2,3,4,5\n1,2,oops,4,5\n";
  assert.throws(
    () => parseGridCsv(text),
    (err: unknown) => err instanceof CsvError && err.line === 5,
  );
});

test("wrong field count reports its line number", () => {
  const text = "frame,gamma,k\nsn,0.444,\ncoord1,coord2,re,im,abs\n1,2,3\n";
  assert.throws(
    () => parseGridCsv(text),
    (err: unknown) =>
      err instanceof CsvError && err.line === 4 && /5 fields/.test(err.message),
  );
});

test("empty grid is an error", () => {
  assert.throws(
    () => parseGridCsv("frame,gamma,k\nsn,0.444,\ncoord1,coord2,re,im,abs\n"),
    CsvError,
  );
});

test("wrong header is an error on line 1", () => {
  assert.throws(
    () => parseGridCsv("bogus\n"),
    (err: unknown) => err instanceof CsvError && err.line === 1,
  );
});
