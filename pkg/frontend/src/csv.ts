/**
 * Minimal CSV handling for tlbsim report files.
 *
 * The producer never quotes fields (K sets are pipe-joined), so parsing is a
 * straight comma split with named-column access on top.
 */

export interface Table {
  header: string[];
  rows: string[][];
}

export function parseCsv(text: string): Table {
  const lines = text
    .split(/\r?\n/)
    .filter((line) => line.trim().length > 0);
  if (lines.length === 0) {
    throw new Error("empty CSV: no header row");
  }
  const header = lines[0].split(",");
  const rows = lines.slice(1).map((line) => line.split(","));
  for (const row of rows) {
    if (row.length !== header.length) {
      throw new Error(
        `CSV row has ${row.length} fields, header has ${header.length}`,
      );
    }
  }
  return { header, rows };
}

/** Column indices by name; throws naming the first missing column. */
export function requireColumns(
  table: Table,
  names: string[],
): Map<string, number> {
  const index = new Map<string, number>();
  for (const name of names) {
    const i = table.header.indexOf(name);
    if (i < 0) {
      throw new Error(`missing column: ${name}`);
    }
    index.set(name, i);
  }
  return index;
}

export function asNumber(value: string, column: string): number {
  const n = Number(value);
  if (!Number.isFinite(n)) {
    throw new Error(`column ${column}: ${JSON.stringify(value)} is not a number`);
  }
  return n;
}

/** Insertion-ordered distinct values of one column. */
export function distinct(table: Table, columnIndex: number): string[] {
  const seen = new Set<string>();
  const out: string[] = [];
  for (const row of table.rows) {
    const v = row[columnIndex];
    if (!seen.has(v)) {
      seen.add(v);
      out.push(v);
    }
  }
  return out;
}
