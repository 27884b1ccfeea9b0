/**
 * Minimal deterministic SVG line-chart writer.  No timestamps, no random
 * identifiers, fixed number formatting: identical input data produces
 * byte-identical files.
 */

export interface Series {
  label: string;
  x: number[];
  y: number[];
}

export interface Annotation {
  kind: "hline" | "text";
  value?: number;
  label: string;
}

export interface ChartOptions {
  title: string;
  xLabel: string;
  yLabel: string;
  xLog?: boolean;
  yLog?: boolean;
  width?: number;
  height?: number;
  annotations?: Annotation[];
}

const PALETTE = ["#1f6feb", "#d32f2f", "#2e7d32", "#7b1fa2", "#ef6c00",
  "#00838f", "#5d4037", "#455a64"];

export function fmt(v: number): string {
  if (!Number.isFinite(v)) return "0";
  if (v === 0) return "0";
  const s = v.toPrecision(10);
  return s.includes(".") ? s.replace(/\.?0+($|e)/, "$1") : s;
}

interface Scale {
  (v: number): number;
}

function makeScale(lo: number, hi: number, outLo: number, outHi: number,
  log: boolean): Scale {
  if (log) {
    const a = Math.log10(lo);
    const b = Math.log10(hi);
    return (v) => outLo + ((Math.log10(v) - a) / (b - a || 1)) * (outHi - outLo);
  }
  return (v) => outLo + ((v - lo) / (hi - lo || 1)) * (outHi - outLo);
}

function niceTicks(lo: number, hi: number, log: boolean): number[] {
  if (log) {
    const ticks: number[] = [];
    const d0 = Math.ceil(Math.log10(lo) - 1e-12);
    const d1 = Math.floor(Math.log10(hi) + 1e-12);
    for (let d = d0; d <= d1; d++) ticks.push(10 ** d);
    if (ticks.length === 0) ticks.push(lo, hi);
    return ticks;
  }
  const span = hi - lo || 1;
  const step = 10 ** Math.floor(Math.log10(span / 4));
  const mult = span / step > 20 ? 5 : span / step > 8 ? 2 : 1;
  const s = step * mult;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / s) * s; v <= hi + 1e-12 * span; v += s) {
    ticks.push(v);
  }
  return ticks;
}

export function renderChart(series: Series[], opts: ChartOptions): string {
  const W = opts.width ?? 720;
  const H = opts.height ?? 480;
  const mL = 72, mR = 24, mT = 40, mB = 56;
  const xs: number[] = [];
  const ys: number[] = [];
  for (const s of series) {
    for (let i = 0; i < s.x.length; i++) {
      const xv = s.x[i], yv = s.y[i];
      if (!Number.isFinite(xv) || !Number.isFinite(yv)) continue;
      if (opts.xLog && xv <= 0) continue;
      if (opts.yLog && yv <= 0) continue;
      xs.push(xv);
      ys.push(yv);
    }
  }
  for (const a of opts.annotations ?? []) {
    if (a.kind === "hline" && a.value !== undefined &&
      (!opts.yLog || a.value > 0)) {
      ys.push(a.value);
    }
  }
  if (xs.length === 0) {
    throw new Error("nothing to plot after filtering");
  }
  let xLo = Math.min(...xs), xHi = Math.max(...xs);
  let yLo = Math.min(...ys), yHi = Math.max(...ys);
  if (!opts.yLog) {
    const pad = 0.05 * (yHi - yLo || Math.abs(yHi) || 1);
    yLo -= pad;
    yHi += pad;
  }
  const sx = makeScale(xLo, xHi, mL, W - mR, !!opts.xLog);
  const sy = makeScale(yLo, yHi, H - mB, mT, !!opts.yLog);

  const parts: string[] = [];
  parts.push(`<svg xmlns="http://www.w3.org/2000/svg" width="${W}" height="${H}" viewBox="0 0 ${W} ${H}">`);
  parts.push(`<rect width="${W}" height="${H}" fill="#ffffff"/>`);
  parts.push(`<text x="${W / 2}" y="24" text-anchor="middle" font-family="sans-serif" font-size="16">${opts.title}</text>`);

  for (const tv of niceTicks(xLo, xHi, !!opts.xLog)) {
    const px = sx(tv);
    parts.push(`<line x1="${fmt(px)}" y1="${mT}" x2="${fmt(px)}" y2="${H - mB}" stroke="#eeeeee"/>`);
    parts.push(`<text x="${fmt(px)}" y="${H - mB + 18}" text-anchor="middle" font-family="sans-serif" font-size="11">${fmt(tv)}</text>`);
  }
  for (const tv of niceTicks(yLo, yHi, !!opts.yLog)) {
    const py = sy(tv);
    parts.push(`<line x1="${mL}" y1="${fmt(py)}" x2="${W - mR}" y2="${fmt(py)}" stroke="#eeeeee"/>`);
    parts.push(`<text x="${mL - 6}" y="${fmt(py + 4)}" text-anchor="end" font-family="sans-serif" font-size="11">${fmt(tv)}</text>`);
  }
  parts.push(`<rect x="${mL}" y="${mT}" width="${W - mL - mR}" height="${H - mT - mB}" fill="none" stroke="#333333"/>`);
  parts.push(`<text x="${W / 2}" y="${H - 12}" text-anchor="middle" font-family="sans-serif" font-size="13">${opts.xLabel}</text>`);
  parts.push(`<text x="18" y="${H / 2}" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 18 ${H / 2})">${opts.yLabel}</text>`);

  series.forEach((s, k) => {
    const pts: string[] = [];
    for (let i = 0; i < s.x.length; i++) {
      const xv = s.x[i], yv = s.y[i];
      if (!Number.isFinite(xv) || !Number.isFinite(yv)) continue;
      if (opts.xLog && xv <= 0) continue;
      if (opts.yLog && yv <= 0) continue;
      pts.push(`${fmt(sx(xv))},${fmt(sy(yv))}`);
    }
    if (pts.length === 0) return;
    const color = PALETTE[k % PALETTE.length];
    parts.push(`<polyline fill="none" stroke="${color}" stroke-width="1.5" points="${pts.join(" ")}"/>`);
    parts.push(`<text x="${W - mR - 6}" y="${mT + 16 + 14 * k}" text-anchor="end" font-family="sans-serif" font-size="12" fill="${color}">${s.label}</text>`);
  });

  (opts.annotations ?? []).forEach((a, k) => {
    if (a.kind === "hline" && a.value !== undefined) {
      if (opts.yLog && a.value <= 0) return;
      const py = sy(a.value);
      parts.push(`<line x1="${mL}" y1="${fmt(py)}" x2="${W - mR}" y2="${fmt(py)}" stroke="#999999" stroke-dasharray="6 4"/>`);
      parts.push(`<text x="${mL + 6}" y="${fmt(py - 5)}" font-family="sans-serif" font-size="12" fill="#555555">${a.label}</text>`);
    } else if (a.kind === "text") {
      parts.push(`<text x="${mL + 10}" y="${mT + 18 + 15 * k}" font-family="sans-serif" font-size="12" fill="#333333">${a.label}</text>`);
    }
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
