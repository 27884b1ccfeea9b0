/**
 * The five plot kinds rendered from the laboratory's CSV outputs:
 * focusing rate, scaled secular coefficient, group growth curves,
 * modulation paths, and surface coefficient profiles.
 */

import { Table } from "./csv.js";
import { lastDecadeSlope } from "./fit.js";
import { Annotation, renderChart, Series } from "./svg.js";
import { PlotKind } from "./schema.js";

export class EmptySeriesError extends Error {}

export interface PlotResult {
  svg: string;
  warnings: string[];
}

function col(table: Table, name: string): number[] {
  const v = table.columns.get(name);
  if (v === undefined) {
    throw new EmptySeriesError(`series '${name}' absent`);
  }
  return v;
}

function nonTrivial(y: number[]): boolean {
  return y.some((v) => Math.abs(v) > 0);
}

export function renderPlot(kind: PlotKind, table: Table,
  xLog?: boolean, yLog?: boolean): PlotResult {
  const warnings: string[] = [];
  switch (kind) {
    case "rate": {
      const t = col(table, "t");
      const series: Series[] = [
        { label: "covariant rate", x: t, y: col(table, "rate") },
        { label: "t * grad norm", x: t, y: col(table, "t_grad_plain") },
      ];
      const annotations: Annotation[] = [];
      const kap = table.columns.get("kappa");
      if (kap !== undefined && kap.length > 0) {
        annotations.push({ kind: "hline", value: kap[0], label: "kappa" });
      } else {
        warnings.push("kappa column absent: no asymptote annotation");
      }
      return {
        svg: renderChart(series, {
          title: "focusing rate toward collapse",
          xLabel: "t", yLabel: "rate",
          xLog: xLog ?? true, yLog: yLog ?? false, annotations,
        }),
        warnings,
      };
    }
    case "nu6": {
      const tau = col(table, "tau");
      const scaled = col(table, "nu6_scaled");
      if (!nonTrivial(scaled)) {
        throw new EmptySeriesError("scaled secular series is identically zero");
      }
      return {
        svg: renderChart(
          [{ label: "|nu6| tau^(3-2eps)", x: tau, y: scaled.map(Math.abs) }],
          {
            title: "residual secular coefficient, rescaled",
            xLabel: "tau", yLabel: "scaled magnitude",
            xLog: xLog ?? true, yLog: yLog ?? true,
          }),
        warnings,
      };
    }
    case "growth": {
      const t = col(table, "t");
      const series: Series[] = [];
      const annotations: Annotation[] = [];
      for (const name of ["n1", "n2", "n3", "n4", "n5", "n6"]) {
        const y = table.columns.get(name);
        if (y === undefined) continue;
        if (!nonTrivial(y)) {
          warnings.push(`series '${name}' empty: skipped`);
          continue;
        }
        series.push({ label: name, x: t, y });
        const slope = lastDecadeSlope(t, y);
        if (slope !== null) {
          annotations.push({
            kind: "text",
            label: `${name}: slope ${slope.toFixed(3)}`,
          });
        }
      }
      if (series.length === 0) {
        throw new EmptySeriesError("no growth curves present");
      }
      return {
        svg: renderChart(series, {
          title: "group orbits of the secular modes",
          xLabel: "t", yLabel: "H1 norm",
          xLog: xLog ?? true, yLog: yLog ?? true, annotations,
        }),
        warnings,
      };
    }
    case "modulation": {
      const tau = col(table, "tau");
      const series: Series[] = [];
      for (const name of ["q1", "q2", "q3", "q5"]) {
        const y = col(table, name);
        if (nonTrivial(y)) {
          series.push({ label: name, x: tau, y });
        } else {
          warnings.push(`series '${name}' empty: skipped`);
        }
      }
      series.push({
        label: "q4 - 1", x: tau,
        y: col(table, "q4").map((v) => v - 1.0),
      });
      return {
        svg: renderChart(series, {
          title: "modulation paths",
          xLabel: "tau", yLabel: "parameter value",
          xLog: xLog ?? true, yLog: yLog ?? false,
        }),
        warnings,
      };
    }
    case "surface": {
      const r = col(table, "r");
      return {
        svg: renderChart(
          [
            { label: "V", x: r, y: col(table, "V") },
            { label: "g - 1", x: r, y: col(table, "g").map((v) => v - 1) },
          ],
          {
            title: "reduced surface coefficients",
            xLabel: "r", yLabel: "value",
            xLog: xLog ?? false, yLog: yLog ?? false,
          }),
        warnings,
      };
    }
    default:
      throw new Error(`unhandled plot kind '${kind}'`);
  }
}
