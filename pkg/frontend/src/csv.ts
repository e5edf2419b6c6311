import { readFileSync } from "fs";

/** Raised when an input file does not match the expected schema exactly. */
export class SchemaError extends Error {}

export interface Table {
  path: string;
  columns: string[];
  rows: string[][];
}

/**
 * Read a CSV produced by the simulator, enforcing the exact header.
 * Names the first missing or unexpected column in the error.
 */
export function readCsv(path: string, expectedColumns: string[]): Table {
  const text = readFileSync(path, "utf8");
  const lines = text.split("\n");
  if (lines.length > 0 && lines[lines.length - 1] === "") lines.pop();
  if (lines.length === 0) {
    throw new SchemaError(`${path}: empty file, expected header ${expectedColumns.join(",")}`);
  }
  const columns = lines[0].split(",");
  for (const want of expectedColumns) {
    if (!columns.includes(want)) {
      throw new SchemaError(`${path}: missing column '${want}' (found: ${columns.join(",")})`);
    }
  }
  for (const got of columns) {
    if (!expectedColumns.includes(got)) {
      throw new SchemaError(`${path}: unexpected column '${got}'`);
    }
  }
  if (columns.join(",") !== expectedColumns.join(",")) {
    throw new SchemaError(
      `${path}: column order ${columns.join(",")} differs from ${expectedColumns.join(",")}`,
    );
  }
  const rows: string[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const fields = lines[i].split(",");
    if (fields.length !== columns.length) {
      throw new SchemaError(
        `${path}: row ${i + 1} has ${fields.length} fields, expected ${columns.length}`,
      );
    }
    rows.push(fields);
  }
  return { path, columns, rows };
}

/** Parse a numeric field; the simulator writes missing values as "". */
export function num(field: string): number | null {
  if (field === "") return null;
  const v = Number(field);
  if (Number.isNaN(v)) throw new SchemaError(`unparseable numeric field '${field}'`);
  return v;
}

export function column(table: Table, name: string): string[] {
  const idx = table.columns.indexOf(name);
  if (idx < 0) throw new SchemaError(`${table.path}: missing column '${name}'`);
  return table.rows.map((r) => r[idx]);
}
