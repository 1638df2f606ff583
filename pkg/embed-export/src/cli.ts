#!/usr/bin/env node
// embed-export: encode prompted task example pools and write the engine's
// embedding JSONL format.
//
// Usage:
//   embed-export --pools dir/ --model hash:256 --seed 7 --out emb.jsonl
//                [--cap-source 100] [--cap-target 32]
//                [--target-tasks copa,rte] [--endpoint http://host/encode]

import { resolveEncoder, ModelUnavailable, EmptyPool } from "./encoders";
import { runExport } from "./export";

interface Flags {
  [key: string]: string;
}

function parseFlags(argv: string[]): Flags {
  const flags: Flags = {};
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (!arg.startsWith("--")) {
      usage(`unexpected argument ${JSON.stringify(arg)}`);
    }
    const value = argv[i + 1];
    if (value === undefined || value.startsWith("--")) {
      usage(`flag ${arg} needs a value`);
    }
    flags[arg.slice(2)] = value;
    i++;
  }
  return flags;
}

function usage(problem?: string): never {
  if (problem) {
    console.error(`error: ${problem}`);
  }
  console.error(
    "usage: embed-export --pools <dir> --model <id> --seed <n> --out <file>\n" +
      "                    [--cap-source 100] [--cap-target 32]\n" +
      "                    [--target-tasks a,b,c] [--endpoint <url>]",
  );
  process.exit(2);
}

async function main(): Promise<void> {
  const flags = parseFlags(process.argv.slice(2));
  for (const required of ["pools", "model", "seed", "out"]) {
    if (!(required in flags)) {
      usage(`--${required} is required`);
    }
  }
  const known = new Set([
    "pools", "model", "seed", "out", "cap-source", "cap-target",
    "target-tasks", "endpoint",
  ]);
  for (const key of Object.keys(flags)) {
    if (!known.has(key)) {
      usage(`unknown flag --${key}`);
    }
  }

  const capSource = Number(flags["cap-source"] ?? "100");
  const capTarget = Number(flags["cap-target"] ?? "32");
  const seed = Number(flags["seed"]);
  if (!Number.isInteger(capSource) || capSource < 1) usage("--cap-source must be a positive integer");
  if (!Number.isInteger(capTarget) || capTarget < 1) usage("--cap-target must be a positive integer");
  if (!Number.isInteger(seed)) usage("--seed must be an integer");

  const encoder = resolveEncoder(flags["model"], flags["endpoint"]);
  const records = await runExport(
    {
      poolsDir: flags["pools"],
      model: flags["model"],
      capSource,
      capTarget,
      targetTasks: new Set(
        (flags["target-tasks"] ?? "").split(",").map((t) => t.trim()).filter(Boolean),
      ),
      seed,
      outPath: flags["out"],
    },
    encoder,
  );
  console.log(
    `wrote ${flags["out"]}: ${records.length} tasks, dim ${records[0]?.dim ?? 0}`,
  );
}

main().catch((err) => {
  if (err instanceof ModelUnavailable || err instanceof EmptyPool) {
    console.error(JSON.stringify({ error: err.code, message: err.message }));
    process.exit(1);
  }
  console.error(JSON.stringify({ error: "export_failed", message: String(err) }));
  process.exit(1);
});
