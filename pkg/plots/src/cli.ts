/**
 * Figure rendering from the command line.
 *
 *   node dist/cli.js convergence <error_table.csv> <out.svg>
 *   node dist/cli.js error-evolution <errors.csv> <out.svg>
 *   node dist/cli.js gradmax <diagnostics.csv...> <out.svg>
 *   node dist/cli.js energies <diagnostics.csv> <out.svg>
 *   node dist/cli.js snapshot <state.snap> <out.svg> [region]
 *
 * Exit codes: 0 ok, 1 processing failure, 2 usage error.
 */

import {
  plotConvergence,
  plotEnergies,
  plotErrorEvolution,
  plotGradMax,
  plotSnapshot,
} from "./plots.js";

const USAGE = `usage:
  convergence <error_table.csv> <out.svg>
  error-evolution <errors.csv> <out.svg>
  gradmax <diagnostics.csv...> <out.svg>
  energies <diagnostics.csv> <out.svg>
  snapshot <state.snap> <out.svg> [region=0.25]`;

export function main(argv: string[]): number {
  const [command, ...args] = argv;
  try {
    switch (command) {
      case "convergence": {
        if (args.length !== 2) break;
        const slopes = plotConvergence(args[0], args[1]);
        console.log(`convergence plot -> ${args[1]} `
          + `(rates: d=${slopes.d.toFixed(3)}, w=${slopes.w.toFixed(3)}, `
          + `E=${slopes.energy.toFixed(3)})`);
        return 0;
      }
      case "error-evolution": {
        if (args.length !== 2) break;
        plotErrorEvolution(args[0], args[1]);
        console.log(`error evolution -> ${args[1]}`);
        return 0;
      }
      case "gradmax": {
        if (args.length < 2) break;
        const out = args[args.length - 1];
        plotGradMax(args.slice(0, -1), out);
        console.log(`gradient traces -> ${out}`);
        return 0;
      }
      case "energies": {
        if (args.length !== 2) break;
        plotEnergies(args[0], args[1]);
        console.log(`energy traces -> ${args[1]}`);
        return 0;
      }
      case "snapshot": {
        if (args.length !== 2 && args.length !== 3) break;
        const region = args.length === 3 ? Number(args[2]) : 0.25;
        if (!Number.isFinite(region) || region <= 0) {
          console.error(`bad region ${args[2]}`);
          return 2;
        }
        plotSnapshot(args[0], region, args[1]);
        console.log(`field view -> ${args[1]}`);
        return 0;
      }
      default:
        console.error(`unknown command ${JSON.stringify(command ?? "")}`);
        console.error(USAGE);
        return 2;
    }
  } catch (err) {
    console.error(err instanceof Error ? err.message : String(err));
    return 1;
  }
  console.error(USAGE);
  return 2;
}

if (process.argv[1] && /cli\.(ts|js)$/.test(process.argv[1])) {
  process.exit(main(process.argv.slice(2)));
}
