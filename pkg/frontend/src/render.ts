/**
 * SVG rendering of grid heatmaps and slice line plots.
 *
 * The renderer is presentation only: every plotted number comes straight
 * out of a CSV column; the only arithmetic here is the affine map from
 * data coordinates to pixel coordinates and the colormap lookup.
 */

import { writeFileSync } from "node:fs";

import {
  GridData,
  OverlayData,
  SliceData,
  parseGridCsv,
  parseOverlayCsv,
  parseSliceCsv,
} from "./csv.js";

export type FigureKind = "heatmap" | "line";
export type OverlayKind = "cubic" | "airy" | "dark" | "bright" | "layer";

export interface PlotSpec {
  inputCsv: string; // file contents, grid or slice format
  kind: FigureKind;
  overlays: OverlayKind[];
  overlayCsv?: string; // contents of the cubic-overlay sidecar (heatmaps)
  outputPath: string;
  xLabel?: string;
  yLabel?: string;
  title?: string;
}

const REGIME_OF_OVERLAY: Record<string, string> = {
  airy: "incoming",
  dark: "outer_dark",
  bright: "outer_bright",
  layer: "fresnel",
};

const OVERLAY_COLOR: Record<string, string> = {
  cubic: "#ffffff",
  airy: "#d62728",
  dark: "#d62728",
  bright: "#2ca02c",
  layer: "#9467bd",
};

const WIDTH = 760;
const HEIGHT = 560;
const MARGIN = { left: 70, right: 25, top: 40, bottom: 55 };

interface Affine {
  x: (v: number) => number;
  y: (v: number) => number;
}

function affine(
  xLo: number,
  xHi: number,
  yLo: number,
  yHi: number,
): Affine {
  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const dx = xHi - xLo || 1;
  const dy = yHi - yLo || 1;
  return {
    x: (v) => MARGIN.left + ((v - xLo) / dx) * plotW,
    y: (v) => MARGIN.top + plotH - ((v - yLo) / dy) * plotH,
  };
}

// small perceptual ramp, dark blue -> yellow (cosmetic)
const RAMP: Array<[number, number, number]> = [
  [13, 8, 135],
  [84, 2, 163],
  [139, 10, 165],
  [185, 50, 137],
  [219, 92, 104],
  [244, 136, 73],
  [254, 188, 43],
  [240, 249, 33],
];

function colormap(t: number): string {
  const x = Math.min(1, Math.max(0, t)) * (RAMP.length - 1);
  const i = Math.min(RAMP.length - 2, Math.floor(x));
  const f = x - i;
  const c = RAMP[i].map((a, j) => Math.round(a + f * (RAMP[i + 1][j] - a)));
  return `rgb(${c[0]},${c[1]},${c[2]})`;
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function axes(af: Affine, xLo: number, xHi: number, yLo: number, yHi: number,
              xLabel: string, yLabel: string, title: string): string {
  const parts: string[] = [];
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = MARGIN.top;
  const y1 = HEIGHT - MARGIN.bottom;
  parts.push(
    `<rect x="${x0}" y="${y0}" width="${x1 - x0}" height="${y1 - y0}" fill="none" stroke="#333"/>`,
  );
  const nTicks = 6;
  for (let i = 0; i <= nTicks; i++) {
    const xv = xLo + ((xHi - xLo) * i) / nTicks;
    const yv = yLo + ((yHi - yLo) * i) / nTicks;
    parts.push(
      `<line x1="${af.x(xv)}" y1="${y1}" x2="${af.x(xv)}" y2="${y1 + 5}" stroke="#333"/>`,
      `<text x="${af.x(xv)}" y="${y1 + 20}" font-size="11" text-anchor="middle">${xv.toPrecision(3)}</text>`,
      `<line x1="${x0 - 5}" y1="${af.y(yv)}" x2="${x0}" y2="${af.y(yv)}" stroke="#333"/>`,
      `<text x="${x0 - 8}" y="${af.y(yv) + 4}" font-size="11" text-anchor="end">${yv.toPrecision(3)}</text>`,
    );
  }
  parts.push(
    `<text x="${(x0 + x1) / 2}" y="${HEIGHT - 12}" font-size="13" text-anchor="middle">${esc(xLabel)}</text>`,
    `<text x="18" y="${(y0 + y1) / 2}" font-size="13" text-anchor="middle" transform="rotate(-90 18 ${(y0 + y1) / 2})">${esc(yLabel)}</text>`,
    `<text x="${(x0 + x1) / 2}" y="22" font-size="14" text-anchor="middle">${esc(title)}</text>`,
  );
  return parts.join("\n");
}

function polyline(points: Array<[number, number]>, af: Affine, color: string,
                  width = 1.6, dash = ""): string {
  const pts = points
    .map(([x, y]) => `${af.x(x).toFixed(2)},${af.y(y).toFixed(2)}`)
    .join(" ");
  const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
  return `<polyline points="${pts}" fill="none" stroke="${color}" stroke-width="${width}"${dashAttr}/>`;
}

function renderHeatmap(grid: GridData, overlays: OverlayKind[],
                       overlay: OverlayData | null, spec: PlotSpec): string {
  const { c1Values, c2Values } = grid;
  const xLo = c1Values[0];
  const xHi = c1Values[c1Values.length - 1];
  const yLo = c2Values[0];
  const yHi = c2Values[c2Values.length - 1];
  const af = affine(xLo, xHi, yLo, yHi);
  let maxAbs = 0;
  for (const r of grid.rows) maxAbs = Math.max(maxAbs, r.abs);
  if (maxAbs === 0) maxAbs = 1;
  const cellW =
    (WIDTH - MARGIN.left - MARGIN.right) / Math.max(1, c1Values.length - 1);
  const cellH =
    (HEIGHT - MARGIN.top - MARGIN.bottom) / Math.max(1, c2Values.length - 1);
  const cells: string[] = [];
  for (const r of grid.rows) {
    const px = af.x(r.c1) - cellW / 2;
    const py = af.y(r.c2) - cellH / 2;
    cells.push(
      `<rect x="${px.toFixed(2)}" y="${py.toFixed(2)}" width="${(cellW + 0.6).toFixed(2)}" height="${(cellH + 0.6).toFixed(2)}" fill="${colormap(r.abs / maxAbs)}"/>`,
    );
  }
  const over: string[] = [];
  if (overlays.includes("cubic")) {
    if (!overlay) {
      throw new Error("cubic overlay requested but no overlay CSV given");
    }
    const inside = overlay.points.filter(
      ([, y]) => y >= yLo && y <= yHi,
    );
    over.push(
      `<g class="overlay-cubic">` +
        polyline(inside, af, OVERLAY_COLOR.cubic, 2.0, "6 4") +
        `</g>`,
    );
  }
  const title = spec.title ?? `|field| (${grid.frame} frame)`;
  return [
    `<g clip-path="url(#plot)">`,
    cells.join("\n"),
    over.join("\n"),
    `</g>`,
    axes(af, xLo, xHi, yLo, yHi, spec.xLabel ?? "coord1",
         spec.yLabel ?? "coord2", title),
  ].join("\n");
}

function renderLine(slice: SliceData, overlays: OverlayKind[],
                    spec: PlotSpec): string {
  const xs = slice.rows.map((r) => r.param);
  const xLo = Math.min(...xs);
  const xHi = Math.max(...xs);
  const ys = slice.rows.map((r) => r.absA).filter((v) => Number.isFinite(v));
  const yHi = Math.max(...ys) * 1.08;
  const af = affine(xLo, xHi, 0, yHi);
  const parts: string[] = [];
  parts.push(
    `<g class="data">` +
      polyline(slice.rows.map((r) => [r.param, r.absA]), af, "#1f77b4", 2.0) +
      `</g>`,
  );
  for (const ov of overlays) {
    const regime = REGIME_OF_OVERLAY[ov];
    if (!regime) {
      throw new Error(`overlay ${ov} is not valid on a line figure`);
    }
    const pts = slice.rows
      .filter((r) => r.regime === regime && Number.isFinite(r.asym))
      .map((r) => [r.param, r.asym] as [number, number]);
    if (pts.length === 0) continue;
    parts.push(
      `<g class="overlay-${ov}">` +
        polyline(pts, af, OVERLAY_COLOR[ov], 1.6, "5 3") +
        `</g>`,
    );
  }
  const title = spec.title ?? `|A| along S = ${slice.s}`;
  parts.push(
    axes(af, xLo, xHi, 0, yHi, spec.xLabel ?? slice.paramName,
         spec.yLabel ?? "|A|", title),
  );
  return parts.join("\n");
}

export function renderToSvg(spec: PlotSpec): string {
  let body: string;
  if (spec.kind === "heatmap") {
    const grid = parseGridCsv(spec.inputCsv);
    for (const ov of spec.overlays) {
      if (ov !== "cubic") {
        throw new Error(`overlay ${ov} is not valid on a heatmap`);
      }
    }
    const overlay = spec.overlayCsv ? parseOverlayCsv(spec.overlayCsv) : null;
    body = renderHeatmap(grid, spec.overlays, overlay, spec);
  } else {
    const slice = parseSliceCsv(spec.inputCsv);
    if (spec.overlays.includes("cubic")) {
      throw new Error("overlay cubic is not valid on a line figure");
    }
    body = renderLine(slice, spec.overlays, spec);
  }
  const clip =
    `<clipPath id="plot"><rect x="${MARGIN.left}" y="${MARGIN.top}" ` +
    `width="${WIDTH - MARGIN.left - MARGIN.right}" ` +
    `height="${HEIGHT - MARGIN.top - MARGIN.bottom}"/></clipPath>`;
  return [
    `<?xml version="1.0" encoding="UTF-8"?>`,
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" font-family="sans-serif">`,
    `<defs>${clip}</defs>`,
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
    body,
    `</svg>`,
  ].join("\n");
}

export function render(spec: PlotSpec): void {
  const svg = renderToSvg(spec); // any parse error aborts before writing
  writeFileSync(spec.outputPath, svg);
}
