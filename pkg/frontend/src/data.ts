/**
 * Columnar data exchange with the search CLI.
 *
 * Columns live in memory as plain number arrays: continuous values as-is,
 * discrete values as non-negative level codes indexing the column's category
 * list. On the wire they become a tab-delimited text file with a header row;
 * discrete cells carry the category label, and a schema entry in the run
 * config tells the parser on the other side to treat the column as discrete.
 */

export type ColumnKind =
  | { readonly kind: "continuous" }
  | { readonly kind: "discrete"; readonly categories: readonly string[] };

export const CONTINUOUS: ColumnKind = { kind: "continuous" };

export function discrete(categories: readonly string[]): ColumnKind {
  if (categories.length < 2) {
    throw new Error("a discrete column needs at least two categories");
  }
  return { kind: "discrete", categories: [...categories] };
}

export interface ColumnSet {
  readonly names: readonly string[];
  readonly kinds: readonly ColumnKind[];
  readonly columns: readonly (readonly number[])[];
}

function badName(name: string): boolean {
  return name.length === 0 || /[\t\n\r]/.test(name);
}

/** Validate shape and cell values; throws with the first problem found. */
export function validateColumns(data: ColumnSet): void {
  const { names, kinds, columns } = data;
  if (names.length !== kinds.length || names.length !== columns.length) {
    throw new Error(
      `names (${names.length}), kinds (${kinds.length}) and arrays ` +
      `(${columns.length}) must have equal lengths`,
    );
  }
  if (names.length === 0) {
    throw new Error("need at least one column");
  }
  if (new Set(names).size !== names.length) {
    throw new Error("duplicate column names");
  }
  for (const name of names) {
    if (badName(name)) throw new Error(`bad column name ${JSON.stringify(name)}`);
  }
  const n = columns[0].length;
  if (n === 0) {
    throw new Error("columns are empty");
  }
  for (let j = 0; j < columns.length; j++) {
    if (columns[j].length !== n) {
      throw new Error(
        `ragged columns: ${JSON.stringify(names[j])} has ${columns[j].length} ` +
        `rows, ${JSON.stringify(names[0])} has ${n}`,
      );
    }
    const kind = kinds[j];
    if (kind.kind === "discrete") {
      for (const label of kind.categories) {
        if (badName(label)) {
          throw new Error(`bad category label ${JSON.stringify(label)} in ${names[j]}`);
        }
      }
      for (const v of columns[j]) {
        if (!Number.isInteger(v) || v < 0 || v >= kind.categories.length) {
          throw new Error(
            `code ${v} out of range for discrete column ${JSON.stringify(names[j])}`,
          );
        }
      }
    } else if (kind.kind === "continuous") {
      for (const v of columns[j]) {
        if (!Number.isFinite(v)) {
          throw new Error(
            `non-finite value in continuous column ${JSON.stringify(names[j])}`,
          );
        }
      }
    } else {
      throw new Error(`bad column kind ${JSON.stringify(kind)}`);
    }
  }
}

/**
 * Render the tab-delimited file the CLI loads. JavaScript's default number
 * formatting is the shortest round-trip form, so the doubles parsed on the
 * other side are bit-identical to the ones held here.
 */
export function toTabularText(data: ColumnSet): string {
  const { names, kinds, columns } = data;
  const lines = [names.join("\t")];
  const n = columns[0].length;
  for (let i = 0; i < n; i++) {
    const cells: string[] = [];
    for (let j = 0; j < columns.length; j++) {
      const kind = kinds[j];
      cells.push(
        kind.kind === "discrete"
          ? kind.categories[columns[j][i]]
          : String(columns[j][i]),
      );
    }
    lines.push(cells.join("\t"));
  }
  return lines.join("\n") + "\n";
}

/** Schema overrides the run config must carry for this column set. */
export function schemaOf(data: ColumnSet): Record<string, string> | undefined {
  const schema: Record<string, string> = {};
  let any = false;
  for (let j = 0; j < data.names.length; j++) {
    if (data.kinds[j].kind === "discrete") {
      schema[data.names[j]] = "discrete";
      any = true;
    }
  }
  return any ? schema : undefined;
}

/**
 * Parse tabular text back into columns under a known header and kinds:
 * the echo half of the round trip. Discrete labels map to codes through the
 * column's category list.
 */
export function parseTabularText(text: string, data: ColumnSet): number[][] {
  const lines = text.split("\n").filter((ln) => ln.trim() !== "");
  const header = lines[0].split("\t");
  if (header.length !== data.names.length ||
      header.some((h, j) => h !== data.names[j])) {
    throw new Error(`unexpected header ${JSON.stringify(lines[0])}`);
  }
  const out: number[][] = data.names.map(() => []);
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split("\t");
    if (cells.length !== data.names.length) {
      throw new Error(`row ${i} has ${cells.length} cells`);
    }
    for (let j = 0; j < cells.length; j++) {
      const kind = data.kinds[j];
      if (kind.kind === "discrete") {
        const code = kind.categories.indexOf(cells[j]);
        if (code < 0) {
          throw new Error(
            `unknown label ${JSON.stringify(cells[j])} in column ${data.names[j]}`,
          );
        }
        out[j].push(code);
      } else {
        out[j].push(Number(cells[j]));
      }
    }
  }
  return out;
}
