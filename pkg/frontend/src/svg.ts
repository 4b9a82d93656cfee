/** Deterministic SVG chart assembly: fixed geometry, fixed palette,
 * no timestamps, so identical inputs give identical bytes. */

export interface Series {
  label: string;
  /** line charts: [x, y] numeric pairs; bar charts: y per category index */
  points: Array<[number, number]>;
}

export interface ChartInput {
  title: string;
  xLabel: string;
  yLabel: string;
  kind: "line" | "bar";
  series: Series[];
  /** category labels for bar charts (x axis) */
  categories?: string[];
}

const WIDTH = 720;
const HEIGHT = 480;
const MARGIN = { top: 40, right: 160, bottom: 56, left: 64 };
const PLOT_W = WIDTH - MARGIN.left - MARGIN.right;
const PLOT_H = HEIGHT - MARGIN.top - MARGIN.bottom;

export const PALETTE = [
  "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

function fmt(value: number): string {
  return Number.isInteger(value) ? String(value) : String(Number(value.toPrecision(6)));
}

export function niceTicks(lo: number, hi: number, count = 6): number[] {
  if (!(hi > lo)) {
    hi = lo === 0 ? 1 : lo + Math.abs(lo);
  }
  const span = hi - lo;
  const step0 = span / Math.max(1, count - 1);
  const mag = Math.pow(10, Math.floor(Math.log10(step0)));
  let step = mag;
  for (const mult of [1, 2, 5, 10]) {
    if (mag * mult >= step0) {
      step = mag * mult;
      break;
    }
  }
  const start = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let t = start; t <= hi + step * 1e-9; t += step) {
    ticks.push(Number(t.toPrecision(12)));
  }
  return ticks;
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

interface Extent {
  lo: number;
  hi: number;
}

function extent(values: number[], padWhenFlat = 1): Extent {
  if (values.length === 0) {
    return { lo: 0, hi: 1 };
  }
  let lo = Math.min(...values);
  let hi = Math.max(...values);
  if (lo === hi) {
    hi = lo + padWhenFlat;
  }
  return { lo, hi };
}

export function renderChart(input: ChartInput): string {
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  parts.push(
    `<text x="${WIDTH / 2}" y="22" text-anchor="middle" font-size="15">${escapeXml(input.title)}</text>`,
  );

  const yValues = input.series.flatMap((s) => s.points.map((p) => p[1]));
  const yExt = extent([0, ...yValues]);
  const yTicks = niceTicks(yExt.lo, yExt.hi);
  const yHi = Math.max(yExt.hi, yTicks[yTicks.length - 1] ?? yExt.hi);
  const yPos = (v: number) => MARGIN.top + PLOT_H - ((v - yExt.lo) / (yHi - yExt.lo)) * PLOT_H;

  let xPos: (v: number) => number;
  let xTickMarks: Array<{ at: number; label: string }> = [];
  if (input.kind === "line") {
    const xValues = input.series.flatMap((s) => s.points.map((p) => p[0]));
    const xExt = extent(xValues);
    xPos = (v) => MARGIN.left + ((v - xExt.lo) / (xExt.hi - xExt.lo)) * PLOT_W;
    xTickMarks = niceTicks(xExt.lo, xExt.hi).map((t) => ({ at: xPos(t), label: fmt(t) }));
  } else {
    const cats = input.categories ?? [];
    const slot = PLOT_W / Math.max(1, cats.length);
    xPos = (i) => MARGIN.left + slot * (i + 0.5);
    xTickMarks = cats.map((c, i) => ({ at: xPos(i), label: c }));
  }

  // axes and grid
  parts.push(`<g stroke="#cccccc" stroke-width="1">`);
  for (const t of yTicks) {
    const y = yPos(t);
    parts.push(`<line x1="${MARGIN.left}" y1="${fmt(y)}" x2="${MARGIN.left + PLOT_W}" y2="${fmt(y)}"/>`);
  }
  parts.push(`</g>`);
  parts.push(
    `<line x1="${MARGIN.left}" y1="${MARGIN.top}" x2="${MARGIN.left}" y2="${MARGIN.top + PLOT_H}" stroke="black"/>`,
  );
  parts.push(
    `<line x1="${MARGIN.left}" y1="${MARGIN.top + PLOT_H}" x2="${MARGIN.left + PLOT_W}" y2="${MARGIN.top + PLOT_H}" stroke="black"/>`,
  );
  for (const t of yTicks) {
    const y = yPos(t);
    parts.push(
      `<text x="${MARGIN.left - 8}" y="${fmt(y + 4)}" text-anchor="end" font-size="11">${fmt(t)}</text>`,
    );
  }
  for (const mark of xTickMarks) {
    parts.push(
      `<text x="${fmt(mark.at)}" y="${MARGIN.top + PLOT_H + 18}" text-anchor="middle" font-size="11">` +
        `${escapeXml(mark.label)}</text>`,
    );
  }
  parts.push(
    `<text x="${MARGIN.left + PLOT_W / 2}" y="${HEIGHT - 14}" text-anchor="middle" font-size="12">` +
      `${escapeXml(input.xLabel)}</text>`,
  );
  parts.push(
    `<text x="18" y="${MARGIN.top + PLOT_H / 2}" text-anchor="middle" font-size="12" ` +
      `transform="rotate(-90 18 ${MARGIN.top + PLOT_H / 2})">${escapeXml(input.yLabel)}</text>`,
  );

  // series
  input.series.forEach((series, si) => {
    const color = PALETTE[si % PALETTE.length];
    if (input.kind === "line") {
      const pts = [...series.points].sort((a, b) => a[0] - b[0]);
      const path = pts.map((p) => `${fmt(xPos(p[0]))},${fmt(yPos(p[1]))}`).join(" ");
      parts.push(`<polyline fill="none" stroke="${color}" stroke-width="2" points="${path}"/>`);
      for (const p of pts) {
        parts.push(`<circle cx="${fmt(xPos(p[0]))}" cy="${fmt(yPos(p[1]))}" r="2.5" fill="${color}"/>`);
      }
    } else {
      const catCount = input.categories?.length ?? 0;
      const slot = PLOT_W / Math.max(1, catCount);
      const band = slot * 0.8;
      const barW = band / Math.max(1, input.series.length);
      for (const [ci, value] of series.points) {
        const x0 = MARGIN.left + slot * ci + (slot - band) / 2 + barW * si;
        const y0 = yPos(value);
        const h = MARGIN.top + PLOT_H - y0;
        parts.push(
          `<rect x="${fmt(x0)}" y="${fmt(y0)}" width="${fmt(barW)}" height="${fmt(Math.max(0, h))}" fill="${color}"/>`,
        );
      }
    }
  });

  // legend
  input.series.forEach((series, si) => {
    const color = PALETTE[si % PALETTE.length];
    const y = MARGIN.top + 16 * si;
    const x = WIDTH - MARGIN.right + 12;
    parts.push(`<rect x="${x}" y="${y - 9}" width="12" height="12" fill="${color}"/>`);
    parts.push(`<text x="${x + 18}" y="${y + 2}" font-size="11">${escapeXml(series.label)}</text>`);
  });

  parts.push(`</svg>`);
  return parts.join("\n") + "\n";
}
