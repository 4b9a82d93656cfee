/** Turn one harness CSV plus a plot spec into a deterministic SVG chart. */

import { Table, columnIndex, parseCsv } from "./csv.js";
import { PlotSpec } from "./spec.js";
import { ChartInput, Series, renderChart } from "./svg.js";

export interface RenderResult {
  svg: string;
  warnings: string[];
  seriesCount: number;
}

function groupKey(table: Table, spec: PlotSpec): (row: string[]) => string {
  if (!spec.group) {
    return () => spec.y;
  }
  const indices = spec.group.split(",").map((col) => columnIndex(table, col.trim()));
  return (row) => indices.map((i) => row[i]).join("/");
}

function compareLabels(a: string, b: string): number {
  const na = Number(a);
  const nb = Number(b);
  if (!Number.isNaN(na) && !Number.isNaN(nb)) {
    return na - nb;
  }
  return a < b ? -1 : a > b ? 1 : 0;
}

export function render(spec: PlotSpec, csvText: string): RenderResult {
  const table = parseCsv(csvText);
  const xIdx = columnIndex(table, spec.x);
  const yIdx = columnIndex(table, spec.y);
  const keyOf = groupKey(table, spec);
  const warnings: string[] = [];

  const grouped = new Map<string, string[][]>();
  for (const row of table.rows) {
    const key = keyOf(row);
    const bucket = grouped.get(key);
    if (bucket) {
      bucket.push(row);
    } else {
      grouped.set(key, [row]);
    }
  }
  const labels = [...grouped.keys()].sort(compareLabels);

  let categories: string[] | undefined;
  const series: Series[] = [];
  if (spec.kind === "bar") {
    const seen = new Set<string>();
    categories = [];
    for (const row of table.rows) {
      if (!seen.has(row[xIdx])) {
        seen.add(row[xIdx]);
        categories.push(row[xIdx]);
      }
    }
    for (const label of labels) {
      const points: Array<[number, number]> = [];
      for (const row of grouped.get(label) ?? []) {
        points.push([categories.indexOf(row[xIdx]), toNumber(row[yIdx], spec.y)]);
      }
      series.push({ label, points });
    }
  } else {
    for (const label of labels) {
      const points: Array<[number, number]> = [];
      for (const row of grouped.get(label) ?? []) {
        points.push([toNumber(row[xIdx], spec.x), toNumber(row[yIdx], spec.y)]);
      }
      series.push({ label, points });
    }
  }

  if (table.rows.length === 0) {
    warnings.push(`no data rows in ${spec.input || "input"}: rendering axes only`);
  }

  const chart: ChartInput = {
    title: spec.title ?? spec.output,
    xLabel: spec.x,
    yLabel: spec.y,
    kind: spec.kind,
    series,
    categories,
  };
  return { svg: renderChart(chart), warnings, seriesCount: series.length };
}

function toNumber(text: string, column: string): number {
  const value = Number(text);
  if (Number.isNaN(value)) {
    throw new Error(`column "${column}" holds a non-numeric value: "${text}"`);
  }
  return value;
}
