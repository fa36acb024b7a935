/**
 * Subprocess plumbing for the search CLI.
 *
 * Plain runs capture stdout/exit code synchronously. Runs with an external
 * score speak the CLI's line-delimited JSON protocol: the child announces its
 * column order, streams `local` score queries, and closes with `done`; we
 * answer each query from a user callback.
 */

import { execFileSync, spawn } from "node:child_process";
import { createInterface } from "node:readline";

const ERROR_PREFIX = "caussearch: error: ";

/** A nonzero CLI exit, carrying the cleaned-up message the tool printed. */
export class CliError extends Error {
  constructor(
    message: string,
    public readonly exitCode: number,
    public readonly stderr: string,
  ) {
    super(message);
    this.name = "CliError";
  }
}

function cleanMessage(stderr: string): string {
  const lines = stderr.split("\n").filter((ln) => ln.trim() !== "");
  const last = lines[lines.length - 1] ?? "";
  return last.startsWith(ERROR_PREFIX) ? last.slice(ERROR_PREFIX.length) : last;
}

/** Command used to start the CLI; override with CAUSSEARCH_CLI if needed. */
export function defaultCommand(): string[] {
  const fromEnv = process.env.CAUSSEARCH_CLI;
  return fromEnv ? fromEnv.split(" ") : ["python3", "-m", "caussearch"];
}

/** Run one CLI command to completion and return its stdout. */
export function runCli(args: string[], command: string[] = defaultCommand()): string {
  const [exe, ...prefix] = command;
  try {
    return execFileSync(exe, [...prefix, ...args], {
      encoding: "utf-8",
      maxBuffer: 64 * 1024 * 1024,
    });
  } catch (err) {
    const e = err as { status?: number; stderr?: string; message?: string };
    if (typeof e.status === "number") {
      const stderr = e.stderr ?? "";
      throw new CliError(cleanMessage(stderr), e.status, stderr);
    }
    throw err;
  }
}

type ScoreFn = (node: number, parents: number[]) => number;

/**
 * Run a search whose score lives on this side of the pipe. Resolves when the
 * child exits cleanly; rejects with the callback's error (child killed) or a
 * CliError for a nonzero exit.
 */
export function runWithExternalScore(
  args: string[],
  score: ScoreFn,
  command: string[] = defaultCommand(),
): Promise<void> {
  const [exe, ...prefix] = command;
  const child = spawn(exe, [...prefix, ...args], {
    stdio: ["pipe", "pipe", "pipe"],
  });
  let stderr = "";
  child.stderr.on("data", (chunk: Buffer) => {
    stderr += chunk.toString("utf-8");
  });

  return new Promise<void>((resolve, reject) => {
    let failure: Error | undefined;
    const lines = createInterface({ input: child.stdout });
    lines.on("line", (line) => {
      if (failure) return;
      let msg: { type?: string; id?: number; node?: number; parents?: number[] };
      try {
        msg = JSON.parse(line);
      } catch {
        failure = new Error(`malformed protocol line: ${JSON.stringify(line)}`);
        child.kill();
        return;
      }
      if (msg.type === "columns" || msg.type === "done") {
        return; // announcement / normal close; nothing to answer
      }
      if (msg.type === "local") {
        let value: number;
        try {
          value = score(msg.node as number, (msg.parents ?? []) as number[]);
        } catch (err) {
          failure = err instanceof Error ? err : new Error(String(err));
          child.kill();
          return;
        }
        child.stdin.write(JSON.stringify({ id: msg.id, value }) + "\n");
      }
    });
    child.on("error", (err) => reject(err));
    child.on("close", (code) => {
      if (failure) {
        reject(failure);
      } else if (code === 0) {
        resolve();
      } else {
        reject(new CliError(cleanMessage(stderr), code ?? -1, stderr));
      }
    });
  });
}
