/**
 * Batch plotting entry point.
 *
 *   node dist/cli.js --kind rate --input out/demo/rate.csv --output rate.svg
 *                    [--xlog | --no-xlog] [--ylog | --no-ylog]
 *
 * Exit codes: 0 rendered; 2 schema mismatch; 3 bad invocation;
 * 4 rendered-but-degraded or empty series (warnings issued).
 */

import { readFileSync, writeFileSync } from "node:fs";

import { parseCsv, SchemaError } from "./csv.js";
import { EmptySeriesError, renderPlot } from "./plots.js";
import { CSV_SCHEMA, PLOT_KINDS, PlotKind } from "./schema.js";

interface Args {
  kind: PlotKind;
  input: string;
  output: string;
  xLog?: boolean;
  yLog?: boolean;
}

function parseArgs(argv: string[]): Args {
  const out: Partial<Args> = {};
  for (let i = 0; i < argv.length; i++) {
    const a = argv[i];
    switch (a) {
      case "--kind":
        out.kind = argv[++i] as PlotKind;
        break;
      case "--input":
        out.input = argv[++i];
        break;
      case "--output":
        out.output = argv[++i];
        break;
      case "--xlog":
        out.xLog = true;
        break;
      case "--no-xlog":
        out.xLog = false;
        break;
      case "--ylog":
        out.yLog = true;
        break;
      case "--no-ylog":
        out.yLog = false;
        break;
      default:
        throw new Error(`unknown argument '${a}'`);
    }
  }
  if (!out.kind || !PLOT_KINDS.includes(out.kind)) {
    throw new Error(`--kind must be one of ${PLOT_KINDS.join(", ")}`);
  }
  if (!out.input || !out.output) {
    throw new Error("--input and --output are required");
  }
  return out as Args;
}

export function run(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(`usage error: ${(err as Error).message}`);
    return 3;
  }
  let text: string;
  try {
    text = readFileSync(args.input, "utf-8");
  } catch (err) {
    console.error(`cannot read ${args.input}: ${(err as Error).message}`);
    return 3;
  }
  try {
    const table = parseCsv(text, CSV_SCHEMA[args.kind]);
    const { svg, warnings } = renderPlot(args.kind, table, args.xLog, args.yLog);
    writeFileSync(args.output, svg);
    for (const w of warnings) {
      console.warn(`warning: ${w}`);
    }
    console.log(`wrote ${args.output}`);
    return warnings.length > 0 ? 4 : 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema mismatch: ${err.message}`);
      return 2;
    }
    if (err instanceof EmptySeriesError) {
      console.error(`empty series: ${err.message}`);
      return 4;
    }
    console.error(`plotting failed: ${(err as Error).message}`);
    return 1;
  }
}

const invokedDirectly = process.argv[1] !== undefined
  && import.meta.url.endsWith(process.argv[1].split("/").pop() ?? "");
if (invokedDirectly) {
  process.exit(run(process.argv.slice(2)));
}
