// Batch export: read example pools, subsample deterministically, encode,
// mean-pool, and write the engine's embedding JSONL format atomically.

import * as fs from "fs";
import * as path from "path";

import { Encoder, EmptyPool } from "./encoders";
import { rngFor, sampleWithoutReplacement } from "./rng";

export interface PoolExample {
  id: string;
  prompt: string;
}

export interface ExportJob {
  poolsDir: string;
  model: string;
  capSource: number;
  capTarget: number;
  targetTasks: Set<string>;
  seed: number;
  outPath: string;
}

export interface TaskRecord {
  task: string;
  dim: number;
  n_pooled: number;
  vector: number[];
}

export function readPool(filePath: string): PoolExample[] {
  const rows: PoolExample[] = [];
  const lines = fs.readFileSync(filePath, "utf-8").split("\n");
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].trim();
    if (!line) continue;
    let parsed: { id?: unknown; prompt?: unknown };
    try {
      parsed = JSON.parse(line);
    } catch (err) {
      throw new Error(`${filePath}:${i + 1}: not valid JSON (${err})`);
    }
    if (typeof parsed.id !== "string" && typeof parsed.id !== "number") {
      throw new Error(`${filePath}:${i + 1}: missing example id`);
    }
    if (typeof parsed.prompt !== "string") {
      throw new Error(`${filePath}:${i + 1}: missing prompt text`);
    }
    rows.push({ id: String(parsed.id), prompt: parsed.prompt });
  }
  return rows;
}

export function listPools(poolsDir: string): Map<string, string> {
  const pools = new Map<string, string>();
  for (const name of fs.readdirSync(poolsDir).sort()) {
    if (name.endsWith(".jsonl")) {
      pools.set(name.slice(0, -".jsonl".length), path.join(poolsDir, name));
    }
  }
  return pools;
}

// Selection is order-invariant: candidates are sorted by example id before
// the seeded draw, so shuffling a pool file never changes the subsample.
export function selectExamples(
  examples: PoolExample[],
  cap: number,
  seed: number,
  task: string,
): PoolExample[] {
  const sorted = examples.slice().sort((a, b) => (a.id < b.id ? -1 : a.id > b.id ? 1 : 0));
  if (sorted.length <= cap) {
    return sorted;
  }
  const chosen = sampleWithoutReplacement(sorted, cap, rngFor(seed, task));
  return chosen.sort((a, b) => (a.id < b.id ? -1 : a.id > b.id ? 1 : 0));
}

export function meanPool(vectors: number[][]): number[] {
  const dim = vectors[0].length;
  const pooled = new Array<number>(dim).fill(0);
  for (const vector of vectors) {
    if (vector.length !== dim) {
      throw new Error(`mixed embedding dimensions: ${vector.length} vs ${dim}`);
    }
    for (let i = 0; i < dim; i++) {
      pooled[i] += vector[i];
    }
  }
  return pooled.map((v) => v / vectors.length);
}

export async function encodeTask(
  task: string,
  examples: PoolExample[],
  cap: number,
  seed: number,
  encoder: Encoder,
): Promise<TaskRecord> {
  if (examples.length === 0) {
    throw new EmptyPool(`pool for task ${JSON.stringify(task)} is empty`);
  }
  const chosen = selectExamples(examples, cap, seed, task);
  const vectors = await encoder(chosen.map((e) => e.prompt));
  const pooled = meanPool(vectors);
  return { task, dim: pooled.length, n_pooled: chosen.length, vector: pooled };
}

export async function runExport(job: ExportJob, encoder: Encoder): Promise<TaskRecord[]> {
  const pools = listPools(job.poolsDir);
  if (pools.size === 0) {
    throw new EmptyPool(`no .jsonl pools found in ${job.poolsDir}`);
  }
  const records: TaskRecord[] = [];
  let dim: number | null = null;
  for (const [task, filePath] of pools) {
    const cap = job.targetTasks.has(task) ? job.capTarget : job.capSource;
    const record = await encodeTask(task, readPool(filePath), cap, job.seed, encoder);
    if (dim === null) {
      dim = record.dim;
    } else if (record.dim !== dim) {
      throw new Error(`task ${task} encoded at dim ${record.dim}, expected ${dim}`);
    }
    records.push(record);
  }
  writeAtomic(job.outPath, records);
  return records;
}

function writeAtomic(outPath: string, records: TaskRecord[]): void {
  const payload = records
    .map((r) =>
      JSON.stringify({ task: r.task, dim: r.dim, n_pooled: r.n_pooled, vector: r.vector }),
    )
    .join("\n") + "\n";
  const tmpPath = `${outPath}.tmp-${process.pid}`;
  fs.writeFileSync(tmpPath, payload, "utf-8");
  fs.renameSync(tmpPath, outPath);
}
