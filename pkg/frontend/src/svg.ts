/**
 * Hand-rolled SVG bar charts: grouped bars and stacked bars.
 *
 * Deterministic output: same spec, same bytes.  Dimensions are fixed per
 * chart with the width growing with the number of groups.
 */

export interface Bar {
  label: string;
  value: number;
  color: string;
}

export interface BarGroup {
  label: string;
  bars: Bar[];
}

export interface StackSegment {
  name: string;
  value: number;
  color: string;
}

export interface StackedBar {
  label: string;
  group: string;
  segments: StackSegment[];
}

export interface ChartOpts {
  title: string;
  yLabel: string;
  /** Draw a dashed horizontal reference line at this y value. */
  referenceLine?: number;
  yTickFormat?: (v: number) => string;
}

const MARGIN = { top: 48, right: 24, bottom: 72, left: 64 };
const BAR_AREA_HEIGHT = 280;
const LEGEND_ROW = 16;

export function esc(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function fmtDefault(v: number): string {
  if (v === 0) return "0";
  if (Math.abs(v) >= 1000) return v.toExponential(1);
  return Number(v.toPrecision(3)).toString();
}

function niceMax(maxValue: number): number {
  if (maxValue <= 0) return 1;
  const mag = Math.pow(10, Math.floor(Math.log10(maxValue)));
  for (const m of [1, 1.2, 1.5, 2, 2.5, 3, 4, 5, 7.5, 10]) {
    if (maxValue <= m * mag) return m * mag;
  }
  return 10 * mag;
}

interface Frame {
  parts: string[];
  width: number;
  height: number;
  plotLeft: number;
  plotTop: number;
  plotWidth: number;
  plotHeight: number;
  yMax: number;
  yOf: (v: number) => number;
}

function openFrame(
  opts: ChartOpts,
  groupCount: number,
  barsPerGroup: number,
  maxValue: number,
  legendRows: number,
): Frame {
  const plotWidth = Math.max(360, groupCount * Math.max(60, barsPerGroup * 18 + 24));
  const plotHeight = BAR_AREA_HEIGHT;
  const width = MARGIN.left + plotWidth + MARGIN.right;
  const height =
    MARGIN.top + legendRows * LEGEND_ROW + plotHeight + MARGIN.bottom;
  const plotTop = MARGIN.top + legendRows * LEGEND_ROW;
  const yMax = niceMax(Math.max(maxValue, opts.referenceLine ?? 0));
  const yOf = (v: number) => plotTop + plotHeight - (v / yMax) * plotHeight;
  const parts = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" font-family="sans-serif">`,
    `<rect width="${width}" height="${height}" fill="white"/>`,
    `<text x="${width / 2}" y="24" text-anchor="middle" font-size="15" font-weight="bold">${esc(opts.title)}</text>`,
    `<text x="16" y="${plotTop + plotHeight / 2}" text-anchor="middle" font-size="12" transform="rotate(-90 16 ${plotTop + plotHeight / 2})">${esc(opts.yLabel)}</text>`,
  ];
  const fmt = opts.yTickFormat ?? fmtDefault;
  for (let t = 0; t <= 5; t++) {
    const v = (yMax * t) / 5;
    const y = yOf(v);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${y}" x2="${MARGIN.left + plotWidth}" y2="${y}" stroke="#ddd" stroke-width="1"/>`,
      `<text x="${MARGIN.left - 6}" y="${y + 4}" text-anchor="end" font-size="11">${esc(fmt(v))}</text>`,
    );
  }
  if (opts.referenceLine !== undefined) {
    const y = yOf(opts.referenceLine);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${y}" x2="${MARGIN.left + plotWidth}" y2="${y}" stroke="#555" stroke-width="1" stroke-dasharray="5,3"/>`,
    );
  }
  return {
    parts,
    width,
    height,
    plotLeft: MARGIN.left,
    plotTop,
    plotWidth,
    plotHeight,
    yMax,
    yOf,
  };
}

function legend(
  frame: Frame,
  entries: { label: string; color: string }[],
): void {
  let x = frame.plotLeft;
  let y = MARGIN.top - 8;
  for (const { label, color } of entries) {
    const w = 16 + label.length * 6.5 + 14;
    if (x + w > frame.plotLeft + frame.plotWidth) {
      x = frame.plotLeft;
      y += LEGEND_ROW;
    }
    frame.parts.push(
      `<rect x="${x}" y="${y - 9}" width="10" height="10" fill="${color}"/>`,
      `<text x="${x + 14}" y="${y}" font-size="11">${esc(label)}</text>`,
    );
    x += w;
  }
}

function groupAxisLabel(frame: Frame, cx: number, label: string): void {
  const y = frame.plotTop + frame.plotHeight + 16;
  frame.parts.push(
    `<text x="${cx}" y="${y}" text-anchor="end" font-size="11" transform="rotate(-30 ${cx} ${y})">${esc(label)}</text>`,
  );
}

export function buildGroupedBarSvg(groups: BarGroup[], opts: ChartOpts): string {
  const barLabels: string[] = [];
  const colorOf = new Map<string, string>();
  let maxValue = 0;
  for (const g of groups) {
    for (const b of g.bars) {
      if (!colorOf.has(b.label)) {
        colorOf.set(b.label, b.color);
        barLabels.push(b.label);
      }
      maxValue = Math.max(maxValue, b.value);
    }
  }
  const legendRows = Math.max(1, Math.ceil(barLabels.length / 6));
  const barsPerGroup = Math.max(...groups.map((g) => g.bars.length));
  const frame = openFrame(opts, groups.length, barsPerGroup, maxValue, legendRows);
  legend(frame, barLabels.map((label) => ({ label, color: colorOf.get(label)! })));

  const groupWidth = frame.plotWidth / groups.length;
  groups.forEach((g, gi) => {
    const slot = (groupWidth - 16) / Math.max(1, g.bars.length);
    const barWidth = Math.min(16, slot * 0.9);
    g.bars.forEach((b, bi) => {
      const x = frame.plotLeft + gi * groupWidth + 8 + bi * slot + (slot - barWidth) / 2;
      const y = frame.yOf(b.value);
      const h = frame.plotTop + frame.plotHeight - y;
      frame.parts.push(
        `<rect x="${x.toFixed(2)}" y="${y.toFixed(2)}" width="${barWidth.toFixed(2)}" height="${h.toFixed(2)}" fill="${b.color}"><title>${esc(`${g.label} ${b.label}: ${b.value}`)}</title></rect>`,
      );
    });
    groupAxisLabel(frame, frame.plotLeft + gi * groupWidth + groupWidth / 2, g.label);
  });
  frame.parts.push("</svg>");
  return frame.parts.join("\n");
}

export function buildStackedBarSvg(bars: StackedBar[], opts: ChartOpts): string {
  const segNames: string[] = [];
  const colorOf = new Map<string, string>();
  let maxValue = 0;
  for (const bar of bars) {
    let total = 0;
    for (const s of bar.segments) {
      if (!colorOf.has(s.name)) {
        colorOf.set(s.name, s.color);
        segNames.push(s.name);
      }
      total += s.value;
    }
    maxValue = Math.max(maxValue, total);
  }
  const groups = [...new Set(bars.map((b) => b.group))];
  const perGroup = Math.max(
    ...groups.map((g) => bars.filter((b) => b.group === g).length),
  );
  const legendRows = Math.max(1, Math.ceil(segNames.length / 6));
  const frame = openFrame(opts, groups.length, perGroup, maxValue, legendRows);
  legend(frame, segNames.map((label) => ({ label, color: colorOf.get(label)! })));

  const groupWidth = frame.plotWidth / groups.length;
  groups.forEach((g, gi) => {
    const members = bars.filter((b) => b.group === g);
    const slot = (groupWidth - 16) / Math.max(1, members.length);
    const barWidth = Math.min(18, slot * 0.9);
    members.forEach((bar, bi) => {
      const x = frame.plotLeft + gi * groupWidth + 8 + bi * slot + (slot - barWidth) / 2;
      let acc = 0;
      for (const s of bar.segments) {
        const y0 = frame.yOf(acc);
        const y1 = frame.yOf(acc + s.value);
        acc += s.value;
        if (y0 - y1 <= 0) continue;
        frame.parts.push(
          `<rect x="${x.toFixed(2)}" y="${y1.toFixed(2)}" width="${barWidth.toFixed(2)}" height="${(y0 - y1).toFixed(2)}" fill="${s.color}"><title>${esc(`${bar.label} ${s.name}: ${s.value}`)}</title></rect>`,
        );
      }
      const y = frame.plotTop + frame.plotHeight + 16;
      const cx = x + barWidth / 2;
      frame.parts.push(
        `<text x="${cx}" y="${y}" text-anchor="end" font-size="10" transform="rotate(-40 ${cx} ${y})">${esc(bar.label)}</text>`,
      );
    });
    frame.parts.push(
      `<text x="${frame.plotLeft + gi * groupWidth + groupWidth / 2}" y="${frame.height - 10}" text-anchor="middle" font-size="12" font-weight="bold">${esc(g)}</text>`,
    );
  });
  frame.parts.push("</svg>");
  return frame.parts.join("\n");
}
