import { dumpCsv, requireColumns, SchemaError, type Table } from "./csv.js";
import { extent, linearScale, logScale } from "./scales.js";
import {
  axes,
  document,
  errorBar,
  HEIGHT,
  legend,
  MARGIN,
  marker,
  PALETTE,
  polyline,
  WIDTH,
} from "./svg.js";

export type FigureKind = "nmse-vs-active" | "nmse-vs-power" | "rank-cdf";

export const FIGURE_KINDS: FigureKind[] = [
  "nmse-vs-active",
  "nmse-vs-power",
  "rank-cdf",
];

export interface Figure {
  svg: string;
  /** Exactly the rows that were plotted, raw tokens preserved. */
  dump: string;
  warnings: string[];
}

const AGG_COLUMNS = ["experiment", "estimator", "sweep_value", "mean", "std_err", "n_trials"];
const CDF_COLUMNS = ["experiment", "l_act", "l_total", "rank", "cdf"];

const PLOT_X0 = MARGIN.left;
const PLOT_X1 = WIDTH - MARGIN.right;
const PLOT_Y0 = HEIGHT - MARGIN.bottom;
const PLOT_Y1 = MARGIN.top;

function emptyFigure(
  columns: string[],
  xLabel: string,
  yLabel: string,
  title: string,
): Figure {
  const x = linearScale([0, 1], [PLOT_X0, PLOT_X1]);
  const y = linearScale([0, 1], [PLOT_Y0, PLOT_Y1]);
  return {
    svg: document(axes(x, y, xLabel, yLabel, title)),
    dump: dumpCsv(columns, []),
    warnings: ["input CSV has a header but no data rows; rendered empty axes"],
  };
}

function groupBy(
  rows: Record<string, string>[],
  key: (r: Record<string, string>) => string,
): Map<string, Record<string, string>[]> {
  const groups = new Map<string, Record<string, string>[]>();
  for (const row of rows) {
    const k = key(row);
    if (!groups.has(k)) groups.set(k, []);
    groups.get(k)!.push(row);
  }
  return groups;
}

function toNumber(token: string, column: string): number {
  const v = Number(token);
  if (token === "" || Number.isNaN(v)) {
    throw new SchemaError(`column "${column}" has non-numeric value "${token}"`);
  }
  return v;
}

/**
 * NMSE sweep figures: one log-scaled curve per estimator with +-1 standard
 * error bars. The x axis is the sweep value from the aggregate CSV, either
 * the active-element count or the uplink power in dBm.
 */
function nmseFigure(table: Table, xLabel: string, title: string): Figure {
  requireColumns(table, AGG_COLUMNS);
  if (table.rows.length === 0) {
    return emptyFigure(table.columns, xLabel, "NMSE", title);
  }
  const rows = [...table.rows].sort(
    (a, b) =>
      a.estimator.localeCompare(b.estimator) ||
      toNumber(a.sweep_value, "sweep_value") - toNumber(b.sweep_value, "sweep_value"),
  );
  const xs = rows.map((r) => toNumber(r.sweep_value, "sweep_value"));
  const means = rows.map((r) => toNumber(r.mean, "mean"));
  const errs = rows.map((r) => toNumber(r.std_err, "std_err"));
  const yLo = Math.min(...means.map((m, i) => Math.max(m - errs[i], m / 10)));
  const yHi = Math.max(...means.map((m, i) => m + errs[i]));
  const x = linearScale(extent(xs), [PLOT_X0, PLOT_X1]);
  const y = logScale(
    [Math.pow(10, Math.floor(Math.log10(yLo))), Math.pow(10, Math.ceil(Math.log10(yHi)))],
    [PLOT_Y0, PLOT_Y1],
  );

  const parts = [axes(x, y, xLabel, "NMSE", title, (v) => v.toExponential(0))];
  const groups = groupBy(rows, (r) => r.estimator);
  const entries: { label: string; color: string }[] = [];
  let i = 0;
  for (const [estimator, series] of groups) {
    const color = PALETTE[i % PALETTE.length];
    entries.push({ label: estimator, color });
    const pts: [number, number][] = series.map((r) => [
      x(toNumber(r.sweep_value, "sweep_value")),
      y(toNumber(r.mean, "mean")),
    ]);
    parts.push(polyline(pts, color));
    series.forEach((r, j) => {
      const m = toNumber(r.mean, "mean");
      const e = toNumber(r.std_err, "std_err");
      parts.push(marker(pts[j][0], pts[j][1], color));
      if (e > 0 && m - e > 0) {
        parts.push(errorBar(pts[j][0], y(m - e), y(m + e), color));
      }
    });
    i += 1;
  }
  parts.push(legend(entries));
  return {
    svg: document(parts.join("\n")),
    dump: dumpCsv(table.columns, rows),
    warnings: [],
  };
}

/**
 * Empirical CDF of the active-row covariance-factor rank, one step curve
 * per (L_act, L) pair. Curves are drawn as right-continuous steps anchored
 * at probability 0 just below the smallest observed rank.
 */
function rankCdfFigure(table: Table): Figure {
  requireColumns(table, CDF_COLUMNS);
  const title = "Rank CDF of the active covariance factor";
  if (table.rows.length === 0) {
    return emptyFigure(table.columns, "rank", "empirical CDF", title);
  }
  const rows = [...table.rows].sort(
    (a, b) =>
      toNumber(a.l_total, "l_total") - toNumber(b.l_total, "l_total") ||
      toNumber(a.l_act, "l_act") - toNumber(b.l_act, "l_act") ||
      toNumber(a.rank, "rank") - toNumber(b.rank, "rank"),
  );
  const ranks = rows.map((r) => toNumber(r.rank, "rank"));
  const x = linearScale(
    [Math.min(...ranks) - 1, Math.max(...ranks)],
    [PLOT_X0, PLOT_X1],
  );
  const y = linearScale([0, 1], [PLOT_Y0, PLOT_Y1]);

  const parts = [axes(x, y, "rank", "empirical CDF", title)];
  const groups = groupBy(rows, (r) => `L_act=${r.l_act}, L=${r.l_total}`);
  const entries: { label: string; color: string }[] = [];
  let i = 0;
  for (const [label, series] of groups) {
    const color = PALETTE[i % PALETTE.length];
    entries.push({ label, color });
    const pts: [number, number][] = [];
    let prev = 0;
    for (const r of series) {
      const rank = toNumber(r.rank, "rank");
      const p = toNumber(r.cdf, "cdf");
      pts.push([x(rank), y(prev)]);
      pts.push([x(rank), y(p)]);
      prev = p;
    }
    pts.push([PLOT_X1, y(prev)]);
    parts.push(polyline(pts, color));
    series.forEach((r) =>
      parts.push(marker(x(toNumber(r.rank, "rank")), y(toNumber(r.cdf, "cdf")), color)),
    );
    i += 1;
  }
  parts.push(legend(entries));
  return {
    svg: document(parts.join("\n")),
    dump: dumpCsv(table.columns, rows),
    warnings: [],
  };
}

export function renderFigure(kind: FigureKind, table: Table): Figure {
  switch (kind) {
    case "nmse-vs-active":
      return nmseFigure(table, "active elements", "NMSE vs. number of active elements");
    case "nmse-vs-power":
      return nmseFigure(table, "uplink power (dBm)", "NMSE vs. uplink transmit power");
    case "rank-cdf":
      return rankCdfFigure(table);
  }
}
