import { describe, expect, it } from "vitest";

import { lastDecadeSlope, leastSquaresSlope } from "../src/fit.js";

describe("slope fitting", () => {
  it("recovers an exact quadratic on log-log axes", () => {
    const x = Array.from({ length: 200 }, (_, i) => 0.5 + i * 0.1);
    const y = x.map((v) => 3.0 * v * v);
    expect(lastDecadeSlope(x, y)).toBeCloseTo(2.0, 9);
  });

  it("recovers a decaying power", () => {
    const x = Array.from({ length: 300 }, (_, i) => 10 + i);
    const y = x.map((v) => 7.0 * v ** -2.8);
    expect(lastDecadeSlope(x, y)).toBeCloseTo(-2.8, 9);
  });

  it("declines to fit degenerate data", () => {
    expect(lastDecadeSlope([1, 2], [1, 1])).toBeNull();
    expect(lastDecadeSlope([1, 2, 3, 40], [0, 0, 0, 0])).toBeNull();
  });

  it("least squares on exact line", () => {
    const pairs: Array<[number, number]> = [[0, 1], [1, 3], [2, 5]];
    expect(leastSquaresSlope(pairs)).toBeCloseTo(2.0, 12);
  });
});
