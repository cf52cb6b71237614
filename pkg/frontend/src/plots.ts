import { ResultRow, groupBy } from './csv.js';
import { ecdf, sumRateCurve } from './stats.js';
import {
  HEIGHT, MARGIN, PALETTE, WIDTH,
  axes, document, fmt, legend, linearScale, polyline, line, ticks,
} from './svg.js';

export interface PlotSpec {
  groupKeys: string[];
  warn?: (message: string) => void;
}

const DEFAULT_KEYS = ['scheme', 'g_fraction', 'kappa'];

function plotArea() {
  return {
    x0: MARGIN.left,
    x1: WIDTH - MARGIN.right,
    y0: HEIGHT - MARGIN.bottom,
    y1: MARGIN.top,
  };
}

/** Empirical per-user rate CDF, one staircase per group. */
export function renderCdf(rows: ResultRow[], spec: PlotSpec = { groupKeys: DEFAULT_KEYS }): string {
  const warn = spec.warn ?? (() => undefined);
  const groups = groupBy(rows, spec.groupKeys.length ? spec.groupKeys : DEFAULT_KEYS);
  const { x0, x1, y0, y1 } = plotArea();
  const rateMax = Math.max(...rows.map((r) => r.rate), 1e-9);
  const xScale = linearScale(0, rateMax, x0, x1);
  const yScale = linearScale(0, 1, y0, y1);
  const body: string[] = [
    axes(xScale, yScale, ticks(rateMax), [0, 0.2, 0.4, 0.6, 0.8, 1.0],
         'per-user rate (bits/s/Hz)', 'cumulative probability'),
  ];
  const labels: string[] = [];
  let idx = 0;
  for (const [label, members] of groups) {
    if (members.length === 0) {
      warn(`group '${label}' is empty; skipped`);
      continue;
    }
    const points = ecdf(members.map((r) => r.rate));
    const path: [number, number][] = [[xScale.toPx(0), yScale.toPx(0)]];
    let prevP = 0;
    for (const pt of points) {
      const px = xScale.toPx(pt.x);
      path.push([px, yScale.toPx(prevP)]);   // run flat to the next jump
      path.push([px, yScale.toPx(pt.p)]);
      prevP = pt.p;
    }
    path.push([xScale.toPx(rateMax), yScale.toPx(1)]);
    body.push(polyline(path, PALETTE[idx % PALETTE.length]));
    labels.push(label);
    idx += 1;
  }
  body.push(legend(labels));
  return document(body.join('\n'));
}

/** Mean sum rate versus pilot budget with standard-error bars per group. */
export function renderSumRateVsT(rows: ResultRow[], spec: PlotSpec = { groupKeys: DEFAULT_KEYS }): string {
  const warn = spec.warn ?? (() => undefined);
  const keys = spec.groupKeys.length ? spec.groupKeys : DEFAULT_KEYS;
  const groups = groupBy(rows, keys.filter((k) => k !== 'T'));
  const { x0, x1, y0, y1 } = plotArea();
  const tMax = Math.max(...rows.map((r) => r.T), 1);
  const curves = new Map([...groups.entries()].map(([label, members]) =>
    [label, sumRateCurve(members)] as const));
  let rateMax = 1e-9;
  for (const curve of curves.values()) {
    for (const pt of curve) rateMax = Math.max(rateMax, pt.mean + pt.sem);
  }
  const xScale = linearScale(0, tMax, x0, x1);
  const yScale = linearScale(0, rateMax, y0, y1);
  const body: string[] = [
    axes(xScale, yScale, ticks(tMax), ticks(rateMax),
         'pilot dimension T', 'sum rate (bits/s/Hz)'),
  ];
  const labels: string[] = [];
  let idx = 0;
  for (const [label, curve] of curves) {
    if (curve.length === 0) {
      warn(`group '${label}' is empty; skipped`);
      continue;
    }
    if (curve.length == 1) {
      warn(`group '${label}' spans a single T; degenerate curve`);
    }
    const color = PALETTE[idx % PALETTE.length];
    body.push(polyline(curve.map((pt) => [xScale.toPx(pt.T), yScale.toPx(pt.mean)]), color));
    for (const pt of curve) {
      const px = xScale.toPx(pt.T);
      const lo = yScale.toPx(pt.mean - pt.sem);
      const hi = yScale.toPx(pt.mean + pt.sem);
      body.push(line(px, lo, px, hi, color, 1));
      body.push(line(px - 3, lo, px + 3, lo, color, 1));
      body.push(line(px - 3, hi, px + 3, hi, color, 1));
      body.push(`<circle cx="${fmt(px)}" cy="${fmt(yScale.toPx(pt.mean))}" r="2.5" fill="${color}"/>`);
    }
    labels.push(label);
    idx += 1;
  }
  body.push(legend(labels));
  return document(body.join('\n'));
}
