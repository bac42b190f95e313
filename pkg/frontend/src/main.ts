/** Command line wrapper: --input file.csv --kind heatmap|line
 *  [--overlay cubic --overlay-file file.overlay.csv | --overlay dark,bright,layer | airy]
 *  --output out.svg [--title t] [--xlabel x] [--ylabel y] */

import { readFileSync } from "node:fs";

import { OverlayKind, PlotSpec, render } from "./render.js";

function parseArgs(argv: string[]): PlotSpec {
  const opts: Record<string, string> = {};
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    if (!key.startsWith("--") || i + 1 >= argv.length) {
      throw new Error(`bad argument ${key}`);
    }
    opts[key.slice(2)] = argv[i + 1];
  }
  for (const required of ["input", "kind", "output"]) {
    if (!(required in opts)) throw new Error(`--${required} is required`);
  }
  if (opts.kind !== "heatmap" && opts.kind !== "line") {
    throw new Error(`kind must be heatmap or line, got ${opts.kind}`);
  }
  const overlays = (opts.overlay ?? "")
    .split(",")
    .map((s) => s.trim())
    .filter((s) => s.length > 0) as OverlayKind[];
  return {
    inputCsv: readFileSync(opts.input, "utf-8"),
    kind: opts.kind,
    overlays,
    overlayCsv: opts["overlay-file"]
      ? readFileSync(opts["overlay-file"], "utf-8")
      : undefined,
    outputPath: opts.output,
    title: opts.title,
    xLabel: opts.xlabel,
    yLabel: opts.ylabel,
  };
}

try {
  render(parseArgs(process.argv.slice(2)));
} catch (err) {
  console.error(String(err instanceof Error ? err.message : err));
  process.exit(1);
}
