import { writeFileSync } from 'fs';
import { loadResults } from './csv.js';
import { renderCdf, renderSumRateVsT } from './plots.js';

function usage(): never {
  console.error(
    'usage: node dist/cli.js --kind <cdf|sumrate-vs-T> --input results.csv '
    + '--output figure.svg [--group-by scheme,g_fraction,kappa]');
  process.exit(1);
}

function parseArgs(argv: string[]): Map<string, string> {
  const args = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    const value = argv[i + 1];
    if (!key.startsWith('--') || value === undefined) usage();
    args.set(key.slice(2), value);
  }
  return args;
}

export function main(argv: string[]): number {
  const args = parseArgs(argv);
  const kind = args.get('kind');
  const input = args.get('input');
  const output = args.get('output');
  if (!kind || !input || !output) usage();
  const groupKeys = (args.get('group-by') ?? 'scheme,g_fraction,kappa')
    .split(',').map((s) => s.trim()).filter(Boolean);
  let rows;
  try {
    rows = loadResults(input);
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 2;
  }
  const spec = { groupKeys, warn: (m: string) => console.error(`warning: ${m}`) };
  let svg: string;
  if (kind === 'cdf') svg = renderCdf(rows, spec);
  else if (kind === 'sumrate-vs-T') svg = renderSumRateVsT(rows, spec);
  else usage();
  writeFileSync(output, svg);
  console.error(`wrote ${output}`);
  return 0;
}

process.exit(main(process.argv.slice(2)));
