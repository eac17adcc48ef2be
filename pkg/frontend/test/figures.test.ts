import { mkdtempSync, existsSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { buildContiguityHistogram, BANDS } from "../src/contiguityHistogram.js";
import { buildCpiBreakdown, COMPONENTS, SUM_TOLERANCE } from "../src/cpiBreakdown.js";
import { buildRelativeMissesChart } from "../src/relativeMisses.js";
import { main, renderFigure, FIGURE_KINDS } from "../src/cli.js";

const sweepCsv = readFileSync(new URL("./fixtures/sweep.csv", import.meta.url), "utf8");
const scanCsv = readFileSync(new URL("./fixtures/scan.csv", import.meta.url), "utf8");

describe("relative-misses figure", () => {
  it("renders grouped bars for every workload", () => {
    const { svg, bars } = buildRelativeMissesChart(sweepCsv);
    expect(svg).toContain("<svg");
    const workloads = new Set(bars.map((b) => b.workload));
    expect(workloads.size).toBe(4);
    const schemes = new Set(bars.map((b) => b.scheme));
    expect(schemes.size).toBeGreaterThanOrEqual(3);
  });

  it("puts every base bar at exactly 1.0", () => {
    const { bars } = buildRelativeMissesChart(sweepCsv);
    const baseBars = bars.filter((b) => b.scheme === "base");
    expect(baseBars.length).toBe(4);
    for (const b of baseBars) {
      expect(b.value).toBe(1.0);
    }
  });

  it("is deterministic", () => {
    expect(buildRelativeMissesChart(sweepCsv).svg).toBe(
      buildRelativeMissesChart(sweepCsv).svg,
    );
  });

  it("names a missing column", () => {
    expect(() => buildRelativeMissesChart("a,b\n1,2\n")).toThrow(
      /missing column: workload/,
    );
  });

  it("rejects an empty CSV", () => {
    const header = sweepCsv.split("\n")[0];
    expect(() => buildRelativeMissesChart(header + "\n")).toThrow(/empty CSV/);
  });
});

describe("contiguity-histogram figure", () => {
  it("renders four band bars per mapping on a log2(n+1) scale", () => {
    const { svg, bars } = buildContiguityHistogram(scanCsv);
    expect(svg).toContain("<svg");
    const mappings = new Set(bars.map((b) => b.mapping));
    expect(mappings.size).toBe(4);
    for (const mapping of mappings) {
      expect(bars.filter((b) => b.mapping === mapping).map((b) => b.band)).toEqual(BANDS);
    }
    for (const b of bars) {
      expect(b.scaled).toBeCloseTo(Math.log2(b.chunks + 1), 12);
    }
  });

  it("rejects unknown bands", () => {
    expect(() =>
      buildContiguityHistogram("mapping,band,chunks\nm,tiny,3\n"),
    ).toThrow(/unknown size band/);
  });
});

describe("cpi-breakdown figure", () => {
  it("stacks components that sum to the total-cycles column", () => {
    const { svg, rows } = buildCpiBreakdown(sweepCsv);
    expect(svg).toContain("<svg");
    expect(rows.length).toBe(32);
    for (const r of rows) {
      const sum = r.components.reduce((a, b) => a + b, 0);
      expect(Math.abs(sum - r.total)).toBeLessThanOrEqual(
        SUM_TOLERANCE * Math.max(1, r.total),
      );
    }
  });

  it("rejects inconsistent components", () => {
    const header =
      "workload,scheme,k_count,cycles_total,cycles_per_instruction," +
      COMPONENTS.map(([c]) => c).join(",");
    const bad = header + "\nw,base,,100,1,10,10,10,10,10\n";
    expect(() => buildCpiBreakdown(bad)).toThrow(/components sum/);
  });
});

describe("plots CLI", () => {
  const dir = mkdtempSync(join(tmpdir(), "plots-"));

  it("renders all three figure kinds end to end", () => {
    const inputs: Record<string, string> = {
      "relative-misses": join(dir, "sweep.csv"),
      "cpi-breakdown": join(dir, "sweep.csv"),
      "contiguity-histogram": join(dir, "scan.csv"),
    };
    writeFileSync(inputs["relative-misses"], sweepCsv);
    writeFileSync(inputs["contiguity-histogram"], scanCsv);
    for (const kind of FIGURE_KINDS) {
      const out = join(dir, `${kind}.svg`);
      expect(main([kind, "--in", inputs[kind], "--out", out])).toBe(0);
      expect(readFileSync(out, "utf8")).toContain("</svg>");
    }
  });

  it("writes nothing when the input is empty", () => {
    const input = join(dir, "empty.csv");
    writeFileSync(input, sweepCsv.split("\n")[0] + "\n");
    const out = join(dir, "nothing.svg");
    expect(main(["relative-misses", "--in", input, "--out", out])).toBe(1);
    expect(existsSync(out)).toBe(false);
  });

  it("rejects unknown kinds and non-svg outputs", () => {
    expect(main(["pie-chart", "--in", "x", "--out", "y.svg"])).toBe(2);
    expect(main(["relative-misses", "--in", "x", "--out", "y.png"])).toBe(2);
  });

  it("renderFigure matches the figure builders", () => {
    expect(renderFigure("relative-misses", sweepCsv)).toBe(
      buildRelativeMissesChart(sweepCsv).svg,
    );
  });
});
