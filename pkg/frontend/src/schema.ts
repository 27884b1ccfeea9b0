/**
 * Column contracts of the laboratory's CSV outputs.  Mirrors the schema file
 * shipped with the solver package; a header that does not match its contract
 * is rejected before any plotting.
 */

export interface ColumnSpec {
  required: string[];
  optional: string[];
}

export const CSV_SCHEMA: Record<string, ColumnSpec> = {
  rate: {
    required: ["t", "rate", "t_grad_plain", "sigma_err"],
    optional: ["kappa"],
  },
  nu6: {
    required: ["tau", "nu6", "nu6_scaled"],
    optional: [],
  },
  growth: {
    required: ["t"],
    optional: ["n1", "n2", "n3", "n4", "n5", "n6"],
  },
  modulation: {
    required: [
      "tau", "p1", "p2", "p3", "p4", "p5",
      "q1", "q2", "q3", "q4", "q5", "gamma",
    ],
    optional: [],
  },
  surface: {
    required: ["r", "V", "g"],
    optional: [],
  },
};

export type PlotKind = keyof typeof CSV_SCHEMA;

export const PLOT_KINDS = Object.keys(CSV_SCHEMA) as PlotKind[];
