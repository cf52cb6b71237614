/** Minimal deterministic SVG builder: fixed styling, no timestamps, stable
 * number formatting, so identical inputs render byte-identical files. */

export const WIDTH = 640;
export const HEIGHT = 420;
export const MARGIN = { left: 64, right: 180, top: 28, bottom: 52 };

export const PALETTE = [
  '#1f77b4', '#d62728', '#2ca02c', '#9467bd', '#ff7f0e',
  '#8c564b', '#e377c2', '#17becf', '#7f7f7f', '#bcbd22',
];

export function fmt(x: number): string {
  if (!Number.isFinite(x)) throw new Error(`non-finite coordinate: ${x}`);
  const rounded = Number(x.toPrecision(7));
  return Object.is(rounded, -0) ? '0' : String(rounded);
}

export interface Scale {
  lo: number;
  hi: number;
  toPx: (v: number) => number;
}

export function linearScale(lo: number, hi: number, pxLo: number, pxHi: number): Scale {
  const span = hi - lo || 1;
  return { lo, hi, toPx: (v: number) => pxLo + ((v - lo) / span) * (pxHi - pxLo) };
}

/** Round ticks covering [0, hi]. */
export function ticks(hi: number, count = 5): number[] {
  const rawStep = hi / count || 1;
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => hi / s <= count) ?? mag * 10;
  const out: number[] = [];
  for (let v = 0; v <= hi + 1e-12; v += step) out.push(Number(v.toPrecision(12)));
  return out;
}

export function polyline(points: [number, number][], color: string, dash = ''): string {
  const d = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(' ');
  const dashAttr = dash ? ` stroke-dasharray="${dash}"` : '';
  return `<polyline fill="none" stroke="${color}" stroke-width="1.5"${dashAttr} points="${d}"/>`;
}

export function line(x1: number, y1: number, x2: number, y2: number,
                     color = '#000000', width = 1): string {
  return `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" `
    + `stroke="${color}" stroke-width="${width}"/>`;
}

export function text(x: number, y: number, content: string, anchor = 'middle',
                     size = 12, rotate = 0): string {
  const transform = rotate ? ` transform="rotate(${rotate} ${fmt(x)} ${fmt(y)})"` : '';
  return `<text x="${fmt(x)}" y="${fmt(y)}" font-family="Helvetica,Arial,sans-serif" `
    + `font-size="${size}" text-anchor="${anchor}"${transform}>${escapeXml(content)}</text>`;
}

export function escapeXml(s: string): string {
  return s.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;');
}

export function axes(xScale: Scale, yScale: Scale, xTicks: number[], yTicks: number[],
                     xLabel: string, yLabel: string): string {
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom;
  const y1 = MARGIN.top;
  const parts = [line(x0, y0, x1, y0), line(x0, y0, x0, y1)];
  for (const t of xTicks) {
    const px = xScale.toPx(t);
    parts.push(line(px, y0, px, y0 + 5));
    parts.push(text(px, y0 + 18, fmt(t)));
  }
  for (const t of yTicks) {
    const py = yScale.toPx(t);
    parts.push(line(x0 - 5, py, x0, py));
    parts.push(text(x0 - 8, py + 4, fmt(t), 'end'));
  }
  parts.push(text((x0 + x1) / 2, HEIGHT - 12, xLabel));
  parts.push(text(16, (y0 + y1) / 2, yLabel, 'middle', 12, -90));
  return parts.join('\n');
}

export function legend(labels: string[]): string {
  const x = WIDTH - MARGIN.right + 12;
  const parts: string[] = [];
  labels.forEach((label, i) => {
    const y = MARGIN.top + 14 + i * 18;
    parts.push(line(x, y - 4, x + 18, y - 4, PALETTE[i % PALETTE.length], 2));
    parts.push(text(x + 24, y, label, 'start', 11));
  });
  return parts.join('\n');
}

export function document(body: string): string {
  return `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" `
    + `viewBox="0 0 ${WIDTH} ${HEIGHT}">\n<rect width="${WIDTH}" height="${HEIGHT}" `
    + `fill="#ffffff"/>\n${body}\n</svg>\n`;
}
