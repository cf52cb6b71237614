import { readFileSync } from 'fs';
import { resolve } from 'path';
import { describe, expect, it } from 'vitest';
import { parseResults, ResultRow } from '../src/csv.js';
import { renderCdf, renderSumRateVsT } from '../src/plots.js';

const FIXTURES = resolve(__dirname, '..', 'fixtures');
const fixtureRows = parseResults(readFileSync(resolve(FIXTURES, 'results_fixture.csv'), 'utf8'));

const KEYS = ['scheme', 'g_fraction', 'kappa'];

function makeRow(partial: Partial<ResultRow>): ResultRow {
  return {
    scheme: 'semi-random', g_fraction: '0.5', kappa: '', T: 2, user_id: 0,
    rate: 1.0, seed: '1', realization_id: 0, status: 'ok', ...partial,
  };
}

describe('reference figures', () => {
  it('reproduces the committed CDF byte for byte', () => {
    const reference = readFileSync(resolve(FIXTURES, 'cdf_reference.svg'), 'utf8');
    expect(renderCdf(fixtureRows, { groupKeys: KEYS })).toBe(reference);
  });

  it('reproduces the committed sum-rate figure byte for byte', () => {
    const reference = readFileSync(resolve(FIXTURES, 'sumrate_reference.svg'), 'utf8');
    expect(renderSumRateVsT(fixtureRows, { groupKeys: KEYS })).toBe(reference);
  });

  it('re-rendering changes nothing', () => {
    expect(renderCdf(fixtureRows, { groupKeys: KEYS }))
      .toBe(renderCdf(fixtureRows, { groupKeys: KEYS }));
  });
});

describe('CDF geometry', () => {
  it('staircase stays inside [0, 1] and is monotone', () => {
    const svg = renderCdf(fixtureRows, { groupKeys: KEYS });
    const match = svg.match(/points="([^"]+)"/);
    expect(match).not.toBeNull();
    const pts = match![1].split(' ').map((p) => p.split(',').map(Number));
    // pixel y decreases as cumulative probability grows
    for (let i = 1; i < pts.length; i++) {
      expect(pts[i][1]).toBeLessThanOrEqual(pts[i - 1][1] + 1e-9);
      expect(pts[i][0]).toBeGreaterThanOrEqual(pts[i - 1][0] - 1e-9);
    }
  });

  it('a single-rate group is one vertical step at that rate', () => {
    const rows = [0, 1, 2].map((u) => makeRow({ user_id: u, rate: 2.0 }));
    const svg = renderCdf(rows, { groupKeys: KEYS });
    const match = svg.match(/points="([^"]+)"/);
    const xs = new Set(match![1].split(' ').map((p) => Number(p.split(',')[0])));
    // flat lead-in at 0, the jump at the rate value, flat tail: three x positions
    expect(xs.size).toBeLessThanOrEqual(3);
  });

  it('identical groups draw identical staircases', () => {
    const a = [1.0, 2.0, 3.0].map((r, u) => makeRow({ rate: r, user_id: u, scheme: 'greedy' }));
    const b = [1.0, 2.0, 3.0].map((r, u) => makeRow({ rate: r, user_id: u, scheme: 'smwim' }));
    const svg = renderCdf([...a, ...b], { groupKeys: KEYS });
    const paths = [...svg.matchAll(/points="([^"]+)"/g)].map((m) => m[1]);
    expect(paths.length).toBe(2);
    expect(paths[0]).toBe(paths[1]);
  });

  it('legend lists every group once', () => {
    const svg = renderCdf(fixtureRows, { groupKeys: KEYS });
    const schemes = new Set(fixtureRows.map((r) => r.scheme));
    for (const scheme of schemes) {
      const hits = [...svg.matchAll(new RegExp(`>${scheme} g=`, 'g'))];
      expect(hits.length).toBe(1);
    }
  });
});

describe('sum-rate figure', () => {
  it('warns on a degenerate single-T group', () => {
    const warnings: string[] = [];
    const rows = [makeRow({}), makeRow({ realization_id: 1 })];
    renderSumRateVsT(rows, { groupKeys: KEYS, warn: (m) => warnings.push(m) });
    expect(warnings.some((w) => w.includes('single T'))).toBe(true);
  });

  it('flat data draws a flat mean line', () => {
    const rows = [];
    for (const T of [1, 2, 3]) {
      for (const real of [0, 1]) {
        rows.push(makeRow({ T, realization_id: real, rate: 2.0 }));
      }
    }
    const svg = renderSumRateVsT(rows, { groupKeys: KEYS });
    const match = svg.match(/points="([^"]+)"/);
    const ys = new Set(match![1].split(' ').map((p) => p.split(',')[1]));
    expect(ys.size).toBe(1);
  });

  it('drops failed rows before plotting', () => {
    const text = [
      'scheme,g_fraction,kappa,T,user_id,rate,seed,realization_id,status',
      'smwim,0.5,2,2,0,1.25,9,0,ok',
      'smwim,0.5,2,2,-1,,9,0,error:ValueError',
    ].join('\n');
    const rows = parseResults(text);
    expect(rows.length).toBe(1);
    expect(rows[0].rate).toBeCloseTo(1.25, 12);
  });
});
