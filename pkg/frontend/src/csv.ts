/**
 * Strict reader for the solver's CSV contract: comma-separated, one header
 * row, bare numeric fields, "." decimal separator.
 */

import { ColumnSpec } from "./schema.js";

export class SchemaError extends Error {}

export interface Table {
  columns: Map<string, number[]>;
  names: string[];
  rows: number;
}

export function parseCsv(text: string, spec: ColumnSpec): Table {
  const lines = text.split(/\r?\n/).filter((ln) => ln.length > 0);
  if (lines.length < 2) {
    throw new SchemaError("CSV has no data rows");
  }
  const names = lines[0].split(",");
  for (const col of spec.required) {
    if (!names.includes(col)) {
      throw new SchemaError(`missing required column '${col}'`);
    }
  }
  const allowed = new Set([...spec.required, ...spec.optional]);
  for (const name of names) {
    if (!allowed.has(name)) {
      throw new SchemaError(`unexpected column '${name}'`);
    }
  }
  const columns = new Map<string, number[]>(names.map((n) => [n, []]));
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== names.length) {
      throw new SchemaError(`row ${i} has ${parts.length} fields, expected ${names.length}`);
    }
    for (let j = 0; j < names.length; j++) {
      const v = Number(parts[j]);
      if (Number.isNaN(v)) {
        throw new SchemaError(`row ${i}, column '${names[j]}': not a number`);
      }
      columns.get(names[j])!.push(v);
    }
  }
  return { columns, names, rows: lines.length - 1 };
}
