/**
 * Line-chart geometry for year series. Pure functions: payload in, SVG
 * path strings and dot positions out, so chart behavior is testable
 * without a DOM.
 *
 * Gap years split the polyline into separate segments (a visibly broken
 * line); frequency series arrive zero-filled from the server and render
 * as one segment. A single-point segment renders as a dot, not a line.
 */

import type { SeriesPayload, SeriesPoint } from "./api.js";

export interface PlottedPoint {
  x: number;
  y: number;
  year: number;
  value: number;
}

export interface Segment {
  points: PlottedPoint[];
  /** "M x y L x y ..." path; empty string for single-point segments. */
  path: string;
}

export interface ChartGeometry {
  width: number;
  height: number;
  segments: Segment[];
  /** Points from single-point segments, drawn as standalone dots. */
  dots: PlottedPoint[];
  empty: boolean;
}

export interface ChartOptions {
  width?: number;
  height?: number;
  padding?: number;
  /** Split segments at gap years (similarity charts). */
  breakOnGaps?: boolean;
  /** Fixed value domain, e.g. [0, 1] for cosine scores. */
  valueDomain?: [number, number];
}

export function splitSegments(payload: SeriesPayload, breakOnGaps: boolean): SeriesPoint[][] {
  const points = [...payload.points].sort((a, b) => a.year - b.year);
  if (points.length === 0) {
    return [];
  }
  if (!breakOnGaps || payload.gaps.length === 0) {
    return [points];
  }
  const gaps = payload.gaps;
  const segments: SeriesPoint[][] = [];
  let current: SeriesPoint[] = [points[0]!];
  for (let i = 1; i < points.length; i++) {
    const prev = points[i - 1]!;
    const next = points[i]!;
    const broken = gaps.some((gap) => prev.year < gap && gap < next.year);
    if (broken) {
      segments.push(current);
      current = [];
    }
    current.push(next);
  }
  segments.push(current);
  return segments;
}

export function chartGeometry(payload: SeriesPayload, options: ChartOptions = {}): ChartGeometry {
  const width = options.width ?? 560;
  const height = options.height ?? 180;
  const padding = options.padding ?? 28;
  const raw = splitSegments(payload, options.breakOnGaps ?? false);
  if (raw.length === 0) {
    return { width, height, segments: [], dots: [], empty: true };
  }
  const all = raw.flat();
  const years = all.map((p) => p.year);
  const minYear = Math.min(...years);
  const maxYear = Math.max(...years);
  const [lo, hi] = options.valueDomain ?? [0, Math.max(...all.map((p) => p.value), 1e-9)];
  const spanX = Math.max(maxYear - minYear, 1);
  const spanY = Math.max(hi - lo, 1e-12);

  const place = (p: SeriesPoint): PlottedPoint => ({
    x: padding + ((p.year - minYear) / spanX) * (width - 2 * padding),
    y: height - padding - ((p.value - lo) / spanY) * (height - 2 * padding),
    year: p.year,
    value: p.value,
  });

  const segments: Segment[] = [];
  const dots: PlottedPoint[] = [];
  for (const seg of raw) {
    const plotted = seg.map(place);
    if (plotted.length === 1) {
      dots.push(plotted[0]!);
      segments.push({ points: plotted, path: "" });
    } else {
      const path = plotted
        .map((p, i) => `${i === 0 ? "M" : "L"} ${p.x.toFixed(2)} ${p.y.toFixed(2)}`)
        .join(" ");
      segments.push({ points: plotted, path });
    }
  }
  return { width, height, segments, dots, empty: false };
}

/** Inline SVG markup for a series; placeholder text when there is no data. */
export function chartSvg(payload: SeriesPayload | null, options: ChartOptions = {}): string {
  if (payload === null || payload.points.length === 0) {
    const width = options.width ?? 560;
    const height = options.height ?? 180;
    return (
      `<svg viewBox="0 0 ${width} ${height}" class="chart chart-empty">` +
      `<text x="${width / 2}" y="${height / 2}" text-anchor="middle">no data</text></svg>`
    );
  }
  const geometry = chartGeometry(payload, options);
  const paths = geometry.segments
    .filter((s) => s.path)
    .map((s) => `<path d="${s.path}" fill="none" />`)
    .join("");
  const markers = geometry.segments
    .flatMap((s) => s.points)
    .map(
      (p) =>
        `<circle cx="${p.x.toFixed(2)}" cy="${p.y.toFixed(2)}" r="3">` +
        `<title>${p.year}: ${p.value}</title></circle>`,
    )
    .join("");
  return (
    `<svg viewBox="0 0 ${geometry.width} ${geometry.height}" class="chart">` +
    paths +
    markers +
    `</svg>`
  );
}
