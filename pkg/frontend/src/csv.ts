import Papa from "papaparse";

/**
 * Campaign CSVs are consumed as raw string tokens. Nothing is coerced at
 * parse time so a --dump round trip can re-emit exactly the characters the
 * harness wrote (floats are repr()-formatted upstream and must survive
 * bit-for-bit).
 */
export interface Table {
  columns: string[];
  rows: Record<string, string>[];
}

export class SchemaError extends Error {}

export function parseCsv(text: string): Table {
  const parsed = Papa.parse<string[]>(text.trim(), { skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    throw new SchemaError(`CSV parse error: ${parsed.errors[0].message}`);
  }
  const data = parsed.data;
  if (data.length === 0) {
    throw new SchemaError("CSV has no header row");
  }
  const columns = data[0];
  const rows = data.slice(1).map((cells) => {
    const row: Record<string, string> = {};
    columns.forEach((c, i) => {
      row[c] = cells[i] ?? "";
    });
    return row;
  });
  return { columns, rows };
}

export function requireColumns(table: Table, needed: string[]): void {
  for (const name of needed) {
    if (!table.columns.includes(name)) {
      throw new SchemaError(
        `missing required column "${name}" (found: ${table.columns.join(", ")})`,
      );
    }
  }
}

/** Serialize a subset of a table back to CSV, raw tokens untouched. */
export function dumpCsv(columns: string[], rows: Record<string, string>[]): string {
  const lines = [columns.join(",")];
  for (const row of rows) {
    lines.push(columns.map((c) => row[c]).join(","));
  }
  return lines.join("\n") + "\n";
}
