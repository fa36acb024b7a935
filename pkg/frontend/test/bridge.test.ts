/**
 * End-to-end checks that the bridge and a direct CLI invocation produce the
 * same bytes from the same columns, settings and seed — plus the custom-score
 * path, which must reproduce the built-in linear-Gaussian score exactly.
 */

import { mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, describe, expect, it } from "vitest";

import {
  BridgeSession,
  CliError,
  CONTINUOUS,
  discrete,
  runCli,
  schemaOf,
  toTabularText,
  type ColumnSet,
} from "../src/index.js";
import { binarize, gauss, mulberry32, semColumns } from "./rng.js";
import { biasedMoments, semBicLocal } from "./sembic.js";

const work = mkdtempSync(join(tmpdir(), "bridge-tests-"));
afterAll(() => rmSync(work, { recursive: true, force: true }));
let stamp = 0;

/** One CLI `search` run over its file interface; returns the output text. */
function directSearch(data: ColumnSet, config: Record<string, unknown>): string {
  const tag = `run${stamp++}`;
  const dataPath = join(work, `${tag}.tsv`);
  const outPath = join(work, `${tag}.out`);
  const cfgPath = join(work, `${tag}.json`);
  writeFileSync(dataPath, toTabularText(data));
  const schema = schemaOf(data);
  writeFileSync(
    cfgPath,
    JSON.stringify({ data: dataPath, out: outPath, ...(schema ? { schema } : {}), ...config }),
  );
  runCli(["search", "--config", cfgPath]);
  return readFileSync(outPath, "utf-8");
}

/** One CLI `bootstrap` run; returns the stability table and the labeled DOT. */
function directBootstrap(
  data: ColumnSet,
  config: Record<string, unknown>,
): { table: string; dot: string } {
  const tag = `run${stamp++}`;
  const dataPath = join(work, `${tag}.tsv`);
  const tablePath = join(work, `${tag}.table`);
  const dotPath = join(work, `${tag}.dot`);
  const cfgPath = join(work, `${tag}.json`);
  writeFileSync(dataPath, toTabularText(data));
  const schema = schemaOf(data);
  writeFileSync(
    cfgPath,
    JSON.stringify({
      data: dataPath,
      out: tablePath,
      graph_out: dotPath,
      ...(schema ? { schema } : {}),
      ...config,
    }),
  );
  runCli(["bootstrap", "--config", cfgPath]);
  return {
    table: readFileSync(tablePath, "utf-8"),
    dot: readFileSync(dotPath, "utf-8"),
  };
}

function varNames(p: number): string[] {
  return Array.from({ length: p }, (_, i) => `X${i + 1}`);
}

function contSet(
  p: number,
  n: number,
  edges: readonly (readonly [number, number, number])[],
  seed: number,
): ColumnSet {
  return {
    names: varNames(p),
    kinds: varNames(p).map(() => CONTINUOUS),
    columns: semColumns(p, n, edges, seed),
  };
}

function mixedSet(): ColumnSet {
  const rand = mulberry32(9);
  const n = 500;
  const x: number[] = [];
  const h: number[] = [];
  const z: number[] = [];
  for (let i = 0; i < n; i++) {
    const xi = gauss(rand);
    x.push(xi);
    h.push(0.8 * xi + gauss(rand));
    z.push(0.7 * xi + gauss(rand));
  }
  return {
    names: ["x", "c", "z"],
    kinds: [CONTINUOUS, discrete(["neg", "pos"]), CONTINUOUS],
    columns: [x, binarize(h), z],
  };
}

function session(data: ColumnSet): BridgeSession {
  return BridgeSession.from_columns(data.names, data.kinds, data.columns);
}

const chain4 = contSet(4, 600, [[0, 1, 0.9], [1, 2, 0.9], [2, 3, 0.9]], 3);

describe("byte parity with the CLI", () => {
  it("pc: edge list, DOT and matrix all match a direct run", async () => {
    const s = session(chain4).configure("alpha", 0.01).configure("seed", 3);
    await s.run_pc();
    const base = { algorithm: "pc", alpha: 0.01, seed: 3 };
    expect(s.get_string()).toBe(directSearch(chain4, { ...base, format: "edges" }));
    expect(s.get_dot()).toBe(directSearch(chain4, { ...base, format: "dot" }));
    expect(s.get_pcalg()).toBe(directSearch(chain4, { ...base, format: "pcalg" }));
  });

  it("fges with tiered knowledge matches a direct run", async () => {
    const data = contSet(5, 800, [[0, 2, 1.0], [1, 2, 0.8], [2, 3, 0.9], [0, 4, 0.7]], 11);
    const knowledge = {
      tiers: [["X1", "X2"], ["X3", "X4", "X5"]],
      required: [["X1", "X3"]],
    };
    const s = session(data)
      .configure("knowledge", knowledge)
      .configure("penalty", 2.0)
      .configure("seed", 11);
    await s.run_fges();
    const direct = directSearch(data, {
      algorithm: "fges", knowledge, penalty: 2.0, seed: 11, format: "edges",
    });
    expect(s.get_string()).toBe(direct);
    expect(s.get_string()).toContain("X1 --> X3");
  });

  it("grasp on simulated 6-variable data, seed 7, matches a direct run", async () => {
    const data = contSet(
      6, 1000,
      [[0, 1, 0.8], [0, 2, 0.6], [1, 3, 0.9], [2, 3, 0.5], [3, 4, 0.8], [2, 5, 0.7]],
      7,
    );
    const s = session(data).configure("seed", 7);
    await s.run_grasp();
    const base = { algorithm: "grasp", seed: 7 };
    expect(s.get_string()).toBe(directSearch(data, { ...base, format: "edges" }));
    expect(s.get_pcalg()).toBe(directSearch(data, { ...base, format: "pcalg" }));
  });

  it("fci matches a direct run", async () => {
    const data = contSet(5, 800, [[0, 2, 0.9], [1, 2, 0.9], [2, 3, 0.9], [1, 4, 0.8]], 21);
    const s = session(data).configure("alpha", 0.01).configure("seed", 21);
    await s.run_fci();
    const base = { algorithm: "fci", alpha: 0.01, seed: 21 };
    expect(s.get_string()).toBe(directSearch(data, { ...base, format: "edges" }));
    expect(s.get_dot()).toBe(directSearch(data, { ...base, format: "dot" }));
  });

  it("discrete columns ride along under a schema override", async () => {
    const data = mixedSet();
    const s = session(data).configure("seed", 9);
    await s.run_fges();
    const direct = directSearch(data, { algorithm: "fges", seed: 9, format: "edges" });
    expect(s.get_string()).toBe(direct);
    expect(s.get_string()).toContain("Graph Edges:");
  });

  it("bootstrapping: consensus, table and labeled DOT match direct runs", async () => {
    const data = contSet(3, 400, [[0, 1, 0.9], [1, 2, 0.9]], 5);
    const s = session(data).configure("seed", 5).set_bootstrapping(30);
    await s.run_fges();

    const base = { algorithm: "fges", seed: 5, reps: 30 };
    expect(s.get_string()).toBe(directSearch(data, { ...base, format: "edges" }));
    expect(s.get_string()).toMatch(/# \d\.\d\d$/m);
    expect(s.get_pcalg()).toBe(directSearch(data, { ...base, format: "pcalg" }));

    const boot = directBootstrap(data, base);
    expect(s.get_prob_table()).toBe(boot.table);
    expect(s.get_dot()).toBe(boot.dot);
    expect(s.get_dot()).toMatch(/label="\d\.\d\d"/);
  });
});

describe("custom scores", () => {
  const data = contSet(
    5, 1200,
    [[0, 1, 0.9], [1, 2, 0.8], [2, 3, 0.9], [0, 3, 0.5], [3, 4, 0.8]],
    13,
  );
  const moments = biasedMoments(data.columns);
  const n = data.columns[0].length;

  it("a callback reimplementing the built-in score reproduces fges exactly", async () => {
    const baseline = directSearch(data, {
      algorithm: "fges", score: "sem_bic", penalty: 2.0, seed: 13, format: "edges",
    });
    let calls = 0;
    const s = session(data)
      .configure("seed", 13)
      .register_custom_score((node, parents) => {
        calls += 1;
        return semBicLocal(moments, n, 2.0, node, parents);
      });
    await s.run_fges();
    expect(calls).toBeGreaterThan(0);
    expect(s.get_string()).toBe(baseline);
    expect(s.get_string()).toMatch(/^\d+\./m);
  });

  it("a flat-zero callback yields an empty graph", async () => {
    const s = session(chain4).configure("seed", 3).register_custom_score(() => 0);
    await s.run_fges();
    expect(s.get_string()).toContain("Graph Edges:");
    expect(s.get_string()).not.toMatch(/^\d+\./m);
  });

  it("a throwing callback aborts the run and leaves no result", async () => {
    const s = session(chain4).register_custom_score(() => {
      throw new Error("synthetic failure from the scorer");
    });
    await expect(s.run_fges()).rejects.toThrow("synthetic failure from the scorer");
    expect(() => s.get_string()).toThrow(/no search has been run yet/);
  });

  it("values are memoized per (node, parent set), also across runs", async () => {
    const seen: string[] = [];
    const s = session(data)
      .configure("seed", 13)
      .register_custom_score((node, parents) => {
        seen.push(`${node}:${[...parents].sort((a, b) => a - b).join(",")}`);
        return semBicLocal(moments, n, 2.0, node, parents);
      });
    await s.run_fges();
    const first = seen.length;
    expect(new Set(seen).size).toBe(first);
    await s.run_fges();
    expect(seen.length).toBe(first);
  });
});

describe("errors and validation", () => {
  it("incompatibility failures carry the CLI's message verbatim", async () => {
    const data = mixedSet();
    const config = { algorithm: "pc", test: "fisher_z", seed: 1, format: "edges" };
    let direct: CliError | undefined;
    try {
      directSearch(data, config);
    } catch (err) {
      direct = err as CliError;
    }
    expect(direct).toBeDefined();
    expect(direct!.exitCode).toBe(4);

    const s = session(data).configure("test", "fisher_z").configure("seed", 1);
    const bridged = await s.run_pc().then(
      () => undefined,
      (err: unknown) => err as CliError,
    );
    expect(bridged).toBeDefined();
    expect(bridged!.exitCode).toBe(4);
    expect(bridged!.message).toBe(direct!.message);
    expect(bridged!.message).toMatch(/Fisher Z/);
  });

  it("rejects ragged arrays and unknown settings up front", () => {
    expect(() =>
      BridgeSession.from_columns(
        ["a", "b"],
        [CONTINUOUS, CONTINUOUS],
        [[1, 2, 3], [1, 2]],
      ),
    ).toThrow(/ragged/);
    const s = session(chain4);
    expect(() => s.configure("bogus", 1)).toThrow(/unknown setting/);
    expect(() => s.configure("score", "external")).toThrow(/register a callback/);
    expect(() => s.set_bootstrapping(-1)).toThrow(/integer >= 0/);
    expect(() => s.set_bootstrapping(2.5)).toThrow(/integer >= 0/);
    expect(() => s.get_string()).toThrow(/no search has been run yet/);
  });

  it("asking for probabilities without bootstrapping fails as the facade does", async () => {
    const tiny = contSet(2, 80, [[0, 1, 0.9]], 17);
    const s = session(tiny).configure("seed", 17);
    await s.run_pc();
    expect(() => s.get_prob_table()).toThrow(/no bootstrap probabilities/);
  });
});

describe("data round trip", () => {
  it("echoed columns are exact", () => {
    const data = mixedSet();
    const back = session(data).read_back();
    expect(back.length).toBe(data.columns.length);
    for (let j = 0; j < back.length; j++) {
      expect(back[j].length).toBe(data.columns[j].length);
      for (let i = 0; i < back[j].length; i++) {
        expect(Object.is(back[j][i], data.columns[j][i])).toBe(true);
      }
    }
  });
});
