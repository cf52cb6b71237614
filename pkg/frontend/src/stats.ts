/** Empirical distribution and summary helpers; everything is deterministic. */

export interface CdfPoint {
  x: number;
  p: number;
}

/** Empirical CDF as step points: p jumps to rank/n at each sorted value. */
export function ecdf(values: number[]): CdfPoint[] {
  const sorted = [...values].sort((a, b) => a - b);
  const n = sorted.length;
  const points: CdfPoint[] = [];
  for (let i = 0; i < n; i++) {
    points.push({ x: sorted[i], p: (i + 1) / n });
  }
  return points;
}

export function mean(values: number[]): number {
  return values.reduce((acc, v) => acc + v, 0) / values.length;
}

export function std(values: number[]): number {
  if (values.length < 2) return 0;
  const m = mean(values);
  const ss = values.reduce((acc, v) => acc + (v - m) * (v - m), 0);
  return Math.sqrt(ss / (values.length - 1));
}

/** Standard error of the mean: shrinks like 1/sqrt(n) with the sample count. */
export function sem(values: number[]): number {
  return values.length > 0 ? std(values) / Math.sqrt(values.length) : 0;
}

export interface ErrorBarPoint {
  T: number;
  mean: number;
  sem: number;
  n: number;
}

/** Per-T mean and standard error of per-realization totals. */
export function sumRateCurve(
  rows: { T: number; realization_id: number; rate: number }[],
): ErrorBarPoint[] {
  const perT = new Map<number, Map<number, number>>();
  for (const row of rows) {
    let byReal = perT.get(row.T);
    if (!byReal) {
      byReal = new Map();
      perT.set(row.T, byReal);
    }
    byReal.set(row.realization_id, (byReal.get(row.realization_id) ?? 0) + row.rate);
  }
  const curve: ErrorBarPoint[] = [];
  for (const T of [...perT.keys()].sort((a, b) => a - b)) {
    const sums = [...perT.get(T)!.values()];
    curve.push({ T, mean: mean(sums), sem: sem(sums), n: sums.length });
  }
  return curve;
}
