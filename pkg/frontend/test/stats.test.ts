import { describe, expect, it } from 'vitest';
import { ecdf, mean, sem, std, sumRateCurve } from '../src/stats.js';

describe('ecdf', () => {
  it('is monotone non-decreasing with probabilities in (0, 1]', () => {
    const pts = ecdf([3.0, 1.0, 2.0, 2.0, 5.0]);
    for (let i = 1; i < pts.length; i++) {
      expect(pts[i].x).toBeGreaterThanOrEqual(pts[i - 1].x);
      expect(pts[i].p).toBeGreaterThan(pts[i - 1].p);
    }
    expect(pts[0].p).toBeGreaterThan(0);
    expect(pts[pts.length - 1].p).toBe(1);
  });

  it('degenerates to a single step for a constant sample', () => {
    const pts = ecdf([2.5, 2.5, 2.5]);
    expect(pts.every((p) => p.x === 2.5)).toBe(true);
    expect(pts[pts.length - 1].p).toBe(1);
  });
});

describe('summary statistics', () => {
  it('computes mean and sample std', () => {
    expect(mean([1, 2, 3])).toBeCloseTo(2, 12);
    expect(std([2, 4])).toBeCloseTo(Math.SQRT2, 12);
    expect(std([7])).toBe(0);
  });

  it('standard error shrinks like one over sqrt of the sample count', () => {
    // large planted sample so the dof correction is negligible
    const base = Array.from({ length: 100 }, (_, i) => Math.sin(i * 0.7) + 0.01 * i);
    const once = sem(base);
    const four = sem([...base, ...base, ...base, ...base]);
    expect(once / four).toBeCloseTo(2, 1);
  });
});

describe('sumRateCurve', () => {
  const row = (T: number, realization_id: number, rate: number) => ({ T, realization_id, rate });

  it('sums user rates per realization before averaging', () => {
    const rows = [
      row(2, 0, 1.0), row(2, 0, 2.0),
      row(2, 1, 3.0), row(2, 1, 1.0),
      row(4, 0, 5.0), row(4, 1, 7.0),
    ];
    const curve = sumRateCurve(rows);
    expect(curve.map((p) => p.T)).toEqual([2, 4]);
    expect(curve[0].mean).toBeCloseTo((3.0 + 4.0) / 2, 12);
    expect(curve[0].n).toBe(2);
    expect(curve[1].mean).toBeCloseTo(6.0, 12);
  });

  it('error bars scale with the realization count on planted data', () => {
    const values = Array.from({ length: 64 }, (_, i) => 1.0 + Math.cos(i * 1.3));
    const small = sumRateCurve(values.map((v, i) => row(1, i, v)));
    const bigRows = [];
    for (let rep = 0; rep < 4; rep++) {
      for (let i = 0; i < 64; i++) {
        bigRows.push(row(1, 64 * rep + i, values[i]));
      }
    }
    const big = sumRateCurve(bigRows);
    expect(small[0].sem / big[0].sem).toBeCloseTo(2, 1);
  });
});
