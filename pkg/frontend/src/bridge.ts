/**
 * Session object bridging in-memory columns to the search CLI.
 *
 * The bridge shells out to the command-line tool and exchanges files in its
 * documented formats (tab-delimited data, JSON config, edge-list/DOT/matrix
 * text), so everything observable here matches a direct CLI run byte for
 * byte. Custom scores run in-process: the CLI is started in external-score
 * mode and its stdio score queries are answered by a user callback.
 */

import { mkdtempSync, rmSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { CliError, defaultCommand, runCli, runWithExternalScore } from "./cli.js";
import {
  ColumnKind,
  ColumnSet,
  parseTabularText,
  schemaOf,
  toTabularText,
  validateColumns,
} from "./data.js";

export type Algorithm = "pc" | "fges" | "grasp" | "fci";
export type ScoreCallback = (node: number, parents: number[]) => number;

/** Settings forwarded into the CLI's JSON config. */
const FORWARDED = new Set([
  "test", "score", "alpha", "penalty", "depth", "seed", "knowledge",
]);

interface RunOutputs {
  edges: string;
  dot: string;
  pcalg: string;
  table?: string;
}

export class BridgeSession {
  private readonly data: ColumnSet;
  private readonly command: string[];
  private readonly settings: Record<string, unknown> = {};
  private reps = 0;
  private customScore?: ScoreCallback;
  private readonly scoreCache = new Map<string, number>();
  private last?: RunOutputs;

  private constructor(data: ColumnSet, command?: string[]) {
    validateColumns(data);
    this.data = data;
    this.command = command ?? defaultCommand();
  }

  /** Build a session from parallel column arrays. */
  static from_columns(
    names: readonly string[],
    kinds: readonly ColumnKind[],
    arrays: readonly (readonly number[])[],
    command?: string[],
  ): BridgeSession {
    return new BridgeSession({ names, kinds, columns: arrays }, command);
  }

  get names(): readonly string[] {
    return this.data.names;
  }

  /** Store one search setting (test, score, alpha, penalty, depth, seed, knowledge). */
  configure(setting: string, value: unknown): this {
    if (!FORWARDED.has(setting)) {
      throw new Error(
        `unknown setting '${setting}'; known: ${[...FORWARDED].sort().join(", ")}`,
      );
    }
    if (setting === "score" && value === "external") {
      throw new Error("register a callback with register_custom_score instead");
    }
    this.settings[setting] = value;
    return this;
  }

  /** Rerun the search on `reps` resampled datasets and keep the consensus. */
  set_bootstrapping(reps: number): this {
    if (!Number.isInteger(reps) || reps < 0) {
      throw new Error(`bootstrap replicate count must be an integer >= 0, got ${reps}`);
    }
    this.reps = reps;
    return this;
  }

  /**
   * Supply the local score as a callback over (node index, parent indices),
   * indices in column order. Values are memoized per (node, parent set).
   */
  register_custom_score(fn: ScoreCallback): this {
    this.customScore = fn;
    return this;
  }

  run_pc(): Promise<this> {
    return this.run("pc");
  }

  run_fges(): Promise<this> {
    return this.run("fges");
  }

  run_grasp(): Promise<this> {
    return this.run("grasp");
  }

  run_fci(): Promise<this> {
    return this.run("fci");
  }

  private memoized(): ScoreCallback {
    const fn = this.customScore!;
    return (node, parents) => {
      const key = `${node}:${[...parents].sort((a, b) => a - b).join(",")}`;
      let value = this.scoreCache.get(key);
      if (value === undefined) {
        value = fn(node, parents);
        this.scoreCache.set(key, value);
      }
      return value;
    };
  }

  private async run(algorithm: Algorithm): Promise<this> {
    const dir = mkdtempSync(join(tmpdir(), "caussearch-bridge-"));
    try {
      const dataPath = join(dir, "data.tsv");
      const edgesPath = join(dir, "edges.txt");
      writeFileSync(dataPath, toTabularText(this.data), "utf-8");

      const base: Record<string, unknown> = {
        data: dataPath,
        algorithm,
        ...this.settings,
      };
      const schema = schemaOf(this.data);
      if (schema) base.schema = schema;

      const searchConfig = join(dir, "search.json");
      writeFileSync(searchConfig, JSON.stringify({
        ...base,
        format: "edges",
        out: edgesPath,
        reps: this.reps,
        ...(this.customScore ? { score: "external" } : {}),
      }), "utf-8");

      if (this.customScore) {
        await runWithExternalScore(
          ["search", "--config", searchConfig], this.memoized(), this.command);
      } else {
        runCli(["search", "--config", searchConfig], this.command);
      }
      const edges = readFileSync(edgesPath, "utf-8");
      const pcalg = runCli(
        ["convert", "--input", edgesPath, "--to", "pcalg"], this.command);

      let dot: string;
      let table: string | undefined;
      if (this.reps > 0) {
        // second pass for the stability table and the frequency-labeled DOT;
        // same seed, so the ensemble is the one behind `edges`
        const tablePath = join(dir, "table.tsv");
        const dotPath = join(dir, "consensus.dot");
        const bootConfig = join(dir, "bootstrap.json");
        writeFileSync(bootConfig, JSON.stringify({
          ...base,
          reps: this.reps,
          out: tablePath,
          graph_out: dotPath,
        }), "utf-8");
        runCli(["bootstrap", "--config", bootConfig], this.command);
        table = readFileSync(tablePath, "utf-8");
        dot = readFileSync(dotPath, "utf-8");
      } else {
        dot = runCli(["convert", "--input", edgesPath, "--to", "dot"], this.command);
      }

      this.last = { edges, dot, pcalg, table };
      return this;
    } finally {
      rmSync(dir, { recursive: true, force: true });
    }
  }

  private require(): RunOutputs {
    if (this.last === undefined) {
      throw new Error("no search has been run yet");
    }
    return this.last;
  }

  /** Edge-list text of the last result (frequency comments when bootstrapped). */
  get_string(): string {
    return this.require().edges;
  }

  /** DOT text of the last result (frequency labels when bootstrapped). */
  get_dot(): string {
    return this.require().dot;
  }

  /** Adjacency-code matrix text of the last result. */
  get_pcalg(): string {
    return this.require().pcalg;
  }

  /** Edge-type frequency table of the last bootstrapped result. */
  get_prob_table(): string {
    const table = this.require().table;
    if (table === undefined) {
      throw new Error("no bootstrap probabilities: run with bootstrapping enabled");
    }
    return table;
  }

  /** Columns pushed through the serialization boundary and back. */
  read_back(): number[][] {
    return parseTabularText(toTabularText(this.data), this.data);
  }
}

export { CliError };
