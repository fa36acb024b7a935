/**
 * Plain-TypeScript SEM-BIC local score over biased second moments, used to
 * drive the external-score protocol in tests. Mirrors the CLI's built-in
 * linear-Gaussian score: regression through a Cholesky factor of the
 * parents' moment block, BIC penalty c*(|pa|+1)*ln(n).
 */

export function biasedMoments(columns: readonly (readonly number[])[]): number[][] {
  const p = columns.length;
  const n = columns[0].length;
  const centered = columns.map((col) => {
    let mean = 0;
    for (const v of col) mean += v;
    mean /= n;
    return col.map((v) => v - mean);
  });
  const m: number[][] = Array.from({ length: p }, () => new Array<number>(p).fill(0));
  for (let i = 0; i < p; i++) {
    for (let j = i; j < p; j++) {
      let s = 0;
      for (let k = 0; k < n; k++) s += centered[i][k] * centered[j][k];
      m[i][j] = s / n;
      m[j][i] = m[i][j];
    }
  }
  return m;
}

function cholesky(a: number[][]): number[][] {
  const k = a.length;
  const l: number[][] = Array.from({ length: k }, () => new Array<number>(k).fill(0));
  for (let i = 0; i < k; i++) {
    for (let j = 0; j <= i; j++) {
      let s = a[i][j];
      for (let t = 0; t < j; t++) s -= l[i][t] * l[j][t];
      if (i === j) {
        if (s <= 0) throw new Error("moment block is not positive definite");
        l[i][i] = Math.sqrt(s);
      } else {
        l[i][j] = s / l[j][j];
      }
    }
  }
  return l;
}

function forwardSolve(l: number[][], b: number[]): number[] {
  const k = b.length;
  const w = new Array<number>(k);
  for (let i = 0; i < k; i++) {
    let s = b[i];
    for (let t = 0; t < i; t++) s -= l[i][t] * w[t];
    w[i] = s / l[i][i];
  }
  return w;
}

/** BIC-scored residual of node y regressed on its parents. */
export function semBicLocal(
  moments: readonly (readonly number[])[],
  n: number,
  c: number,
  y: number,
  parents: readonly number[],
): number {
  const pa = [...parents].sort((a, b) => a - b);
  let rss: number;
  if (pa.length === 0) {
    rss = Math.max(n * moments[y][y], 1e-30);
  } else {
    const block = pa.map((a) => pa.map((b) => moments[a][b]));
    const cross = pa.map((a) => moments[a][y]);
    const w = forwardSolve(cholesky(block), cross);
    let explained = 0;
    for (const v of w) explained += v * v;
    rss = Math.max(n * (moments[y][y] - explained), 1e-30);
  }
  return -n * Math.log(rss / n) - c * (pa.length + 1) * Math.log(n);
}
