import { readFileSync } from 'fs';
import Papa from 'papaparse';

/** One per-user row of the results table emitted by the sweep runner. */
export interface ResultRow {
  scheme: string;
  g_fraction: string;
  kappa: string;
  T: number;
  user_id: number;
  rate: number;
  seed: string;
  realization_id: number;
  status: string;
}

const REQUIRED = ['scheme', 'g_fraction', 'kappa', 'T', 'user_id', 'rate',
  'seed', 'realization_id', 'status'];

export function parseResults(text: string): ResultRow[] {
  const parsed = Papa.parse<Record<string, string>>(text.trim(), { header: true });
  if (parsed.errors.length > 0) {
    throw new Error(`CSV parse error: ${parsed.errors[0].message}`);
  }
  const fields = parsed.meta.fields ?? [];
  for (const col of REQUIRED) {
    if (!fields.includes(col)) {
      throw new Error(`results CSV is missing the '${col}' column`);
    }
  }
  const rows: ResultRow[] = [];
  for (const r of parsed.data) {
    if (!r.scheme) continue;
    if (r.status !== 'ok') continue;   // failed points carry no rate
    rows.push({
      scheme: r.scheme,
      g_fraction: r.g_fraction,
      kappa: r.kappa,
      T: Number(r.T),
      user_id: Number(r.user_id),
      rate: Number(r.rate),
      seed: r.seed,
      realization_id: Number(r.realization_id),
      status: r.status,
    });
  }
  return rows;
}

export function loadResults(path: string): ResultRow[] {
  return parseResults(readFileSync(path, 'utf8'));
}

/** Stable group label from the chosen keys, e.g. "smwim g=0.75 k=2". */
export function groupLabel(row: ResultRow, keys: string[]): string {
  const parts: string[] = [];
  for (const key of keys) {
    const value = (row as unknown as Record<string, unknown>)[key];
    if (key === 'scheme') parts.push(String(value));
    else if (key === 'g_fraction') parts.push(`g=${value === '' ? '-' : value}`);
    else if (key === 'kappa') parts.push(`k=${value === '' ? '-' : value}`);
    else parts.push(`${key}=${value}`);
  }
  return parts.join(' ');
}

export function groupBy(rows: ResultRow[], keys: string[]): Map<string, ResultRow[]> {
  const groups = new Map<string, ResultRow[]>();
  for (const row of rows) {
    const label = groupLabel(row, keys);
    const bucket = groups.get(label);
    if (bucket) bucket.push(row);
    else groups.set(label, [row]);
  }
  return new Map([...groups.entries()].sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0)));
}
