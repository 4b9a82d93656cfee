/** Plot specifications and the per-figure preset table. */

export type ChartKind = "line" | "bar";

export interface PlotSpec {
  input: string;
  output: string;
  x: string;
  y: string;
  /** comma-separated group columns; one series per distinct combination */
  group?: string;
  kind: ChartKind;
  title?: string;
}

export function validateSpec(raw: unknown): PlotSpec {
  if (typeof raw !== "object" || raw === null) {
    throw new Error("spec must be a JSON object");
  }
  const spec = raw as Record<string, unknown>;
  for (const field of ["input", "output", "x", "y", "kind"]) {
    if (typeof spec[field] !== "string" || spec[field] === "") {
      throw new Error(`spec field "${field}" must be a non-empty string`);
    }
  }
  if (spec.kind !== "line" && spec.kind !== "bar") {
    throw new Error(`spec field "kind" must be "line" or "bar", got "${String(spec.kind)}"`);
  }
  if (spec.group !== undefined && typeof spec.group !== "string") {
    throw new Error('spec field "group" must be a string when present');
  }
  if (spec.title !== undefined && typeof spec.title !== "string") {
    throw new Error('spec field "title" must be a string when present');
  }
  return spec as unknown as PlotSpec;
}

export type FigurePreset = Omit<PlotSpec, "input" | "output">;

export const FIGURE_PRESETS: Record<string, FigurePreset> = {
  fig1a: { x: "dfk", y: "seizure_pct", group: "attackers", kind: "line",
           title: "Fragment spread vs data seizure" },
  fig1b: { x: "ts", y: "seizure_pct", group: "strategy", kind: "line",
           title: "Sink trip time vs data seizure" },
  fig1c: { x: "fk", y: "seizure_pct", group: "strategy", kind: "line",
           title: "Fragment count vs data seizure" },
  fig1d: { x: "fd", y: "seizure_pct", group: "strategy", kind: "line",
           title: "Decode threshold vs data seizure" },
  fig1e: { x: "attackers", y: "seizure_pct", group: "strategy", kind: "line",
           title: "Attackers vs data seizure" },
  fig1f: { x: "target_dfk", y: "mean_ek", kind: "line",
           title: "Fragment spread vs per-datum energy" },
  fig3a: { x: "rounds", y: "seizure_pct", group: "strategy", kind: "line",
           title: "Corridor stand-in: attack success per round" },
  fig3b: { x: "rounds", y: "seizure_pct", group: "strategy", kind: "line",
           title: "Corridor stand-in, two attackers" },
  fig3c: { x: "rounds", y: "seizure_pct", group: "objective,fd", kind: "line",
           title: "Corridor stand-in: decode threshold sweep" },
  fig4a: { x: "rounds", y: "seizure_pct", group: "strategy", kind: "line",
           title: "Grid stand-in: attack success per round" },
  fig4b: { x: "rounds", y: "seizure_pct", group: "strategy", kind: "line",
           title: "Grid stand-in, two attackers" },
  fig4c: { x: "rounds", y: "seizure_pct", group: "objective,fd", kind: "line",
           title: "Grid stand-in: decode threshold sweep" },
  fig5a: { x: "strategy", y: "dfk_normalized", group: "site", kind: "bar",
           title: "Mean fragment spread (near-first = 1)" },
  fig5b: { x: "n", y: "instructions", group: "protocol", kind: "line",
           title: "Sink instructions vs network size" },
  fig5c: { x: "kind", y: "count", group: "site,protocol", kind: "bar",
           title: "Control messages per sink trip" },
};

export function presetSpec(name: string, input: string, output: string): PlotSpec {
  const preset = FIGURE_PRESETS[name];
  if (!preset) {
    throw new Error(
      `unknown figure preset "${name}" (known: ${Object.keys(FIGURE_PRESETS).sort().join(", ")})`,
    );
  }
  return { input, output, ...preset };
}
