/** CLI: render one chart per invocation.
 *
 *   node dist/cli.js <figure> <input.csv> <output.svg>
 *   node dist/cli.js --spec plotspec.json
 *
 * Exit codes: 0 ok, 1 data/io failure, 2 bad spec or unknown figure.
 */

import { readFileSync, writeFileSync } from "fs";

import { render } from "./render.js";
import { FIGURE_PRESETS, PlotSpec, presetSpec, validateSpec } from "./spec.js";

function usage(): string {
  return (
    "usage: plot <figure> <input.csv> <output.svg> | plot --spec <spec.json>\n" +
    `figures: ${Object.keys(FIGURE_PRESETS).sort().join(", ")}`
  );
}

export function main(argv: string[]): number {
  let spec: PlotSpec;
  try {
    if (argv[0] === "--spec") {
      if (argv.length !== 2) {
        process.stderr.write(usage() + "\n");
        return 2;
      }
      spec = validateSpec(JSON.parse(readFileSync(argv[1], "utf-8")));
    } else if (argv.length === 3) {
      spec = presetSpec(argv[0], argv[1], argv[2]);
    } else {
      process.stderr.write(usage() + "\n");
      return 2;
    }
  } catch (err) {
    process.stderr.write(`invalid plot spec: ${(err as Error).message}\n`);
    return 2;
  }
  try {
    const csvText = readFileSync(spec.input, "utf-8");
    const result = render(spec, csvText);
    for (const warning of result.warnings) {
      process.stderr.write(`warning: ${warning}\n`);
    }
    writeFileSync(spec.output, result.svg);
    process.stdout.write(`wrote ${spec.output} (${result.seriesCount} series)\n`);
    return 0;
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 1;
  }
}

process.exit(main(process.argv.slice(2)));
