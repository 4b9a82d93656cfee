/** Minimal reader for the harness CSVs (comma-separated, never quoted). */

export interface Table {
  header: string[];
  rows: string[][];
}

export function parseCsv(text: string): Table {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new Error("empty CSV: no header line");
  }
  const header = lines[0].split(",");
  const rows = lines.slice(1).map((line, i) => {
    const cells = line.split(",");
    if (cells.length !== header.length) {
      throw new Error(`row ${i + 2}: expected ${header.length} cells, got ${cells.length}`);
    }
    return cells;
  });
  return { header, rows };
}

export function columnIndex(table: Table, name: string): number {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new Error(`missing column "${name}" (header: ${table.header.join(", ")})`);
  }
  return idx;
}

export function numericColumn(table: Table, name: string): number[] {
  const idx = columnIndex(table, name);
  return table.rows.map((row, i) => {
    const value = Number(row[idx]);
    if (Number.isNaN(value)) {
      throw new Error(`row ${i + 2}: column "${name}" is not numeric: "${row[idx]}"`);
    }
    return value;
  });
}
