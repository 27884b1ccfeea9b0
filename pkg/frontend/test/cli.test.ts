import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { run } from "../src/cli.js";

const FIXTURES = join(__dirname, "fixtures");

function tmp(): string {
  return mkdtempSync(join(tmpdir(), "plots-"));
}

describe("plot command", () => {
  it("renders every kind from the demo run and is byte-deterministic", () => {
    const dir = tmp();
    // the rotationally symmetric run has no translation/Galilean paths, so
    // the modulation plot legitimately warns about those empty series
    const expected: Record<string, number> = {
      rate: 0, nu6: 0, growth: 0, modulation: 4, surface: 0,
    };
    for (const kind of Object.keys(expected)) {
      const input = join(FIXTURES, `${kind}.csv`);
      const out1 = join(dir, `${kind}-1.svg`);
      const out2 = join(dir, `${kind}-2.svg`);
      expect(run(["--kind", kind, "--input", input, "--output", out1]))
        .toBe(expected[kind]);
      expect(run(["--kind", kind, "--input", input, "--output", out2]))
        .toBe(expected[kind]);
      expect(readFileSync(out1)).toEqual(readFileSync(out2));
      expect(readFileSync(out1, "utf-8")).toContain("<polyline");
    }
  });

  it("rejects a schema-violating file with exit 2", () => {
    const dir = tmp();
    const bad = join(dir, "bad.csv");
    writeFileSync(bad, "tau,wrong\n1,2\n");
    expect(run(["--kind", "nu6", "--input", bad,
      "--output", join(dir, "x.svg")])).toBe(2);
  });

  it("flags empty series with a warning exit", () => {
    const dir = tmp();
    const empty = join(dir, "empty.csv");
    writeFileSync(empty, "tau,nu6,nu6_scaled\n20,0,0\n30,0,0\n40,0,0\n");
    expect(run(["--kind", "nu6", "--input", empty,
      "--output", join(dir, "x.svg")])).toBe(4);
  });

  it("rejects bad invocations with exit 3", () => {
    expect(run(["--kind", "bogus", "--input", "a", "--output", "b"])).toBe(3);
    expect(run(["--kind", "rate"])).toBe(3);
    expect(run(["--kind", "rate", "--input", "/nonexistent.csv",
      "--output", "/tmp/x.svg"])).toBe(3);
  });
});
