import type { Scale } from "./scales.js";

/** Tiny SVG assembly helpers; no DOM, just strings. */

export const WIDTH = 720;
export const HEIGHT = 480;
export const MARGIN = { top: 40, right: 160, bottom: 55, left: 70 };

export const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
];

const esc = (s: string) =>
  s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");

export function el(
  tag: string,
  attrs: Record<string, string | number>,
  body = "",
): string {
  const a = Object.entries(attrs)
    .map(([k, v]) => `${k}="${v}"`)
    .join(" ");
  return body === "" && tag !== "text"
    ? `<${tag} ${a}/>`
    : `<${tag} ${a}>${body}</${tag}>`;
}

export function text(
  x: number,
  y: number,
  s: string,
  attrs: Record<string, string | number> = {},
): string {
  return el("text", { x, y, "font-family": "sans-serif", "font-size": 13, ...attrs }, esc(s));
}

export function polyline(
  points: [number, number][],
  stroke: string,
  dash = "",
): string {
  const attrs: Record<string, string | number> = {
    points: points.map(([x, y]) => `${x.toFixed(2)},${y.toFixed(2)}`).join(" "),
    fill: "none",
    stroke,
    "stroke-width": 1.8,
  };
  if (dash) attrs["stroke-dasharray"] = dash;
  return el("polyline", attrs);
}

export function marker(x: number, y: number, color: string): string {
  return el("circle", { cx: x.toFixed(2), cy: y.toFixed(2), r: 3.2, fill: color });
}

export function errorBar(x: number, y0: number, y1: number, color: string): string {
  const cap = 4;
  return [
    el("line", { x1: x, y1: y0.toFixed(2), x2: x, y2: y1.toFixed(2), stroke: color }),
    el("line", { x1: x - cap, y1: y0.toFixed(2), x2: x + cap, y2: y0.toFixed(2), stroke: color }),
    el("line", { x1: x - cap, y1: y1.toFixed(2), x2: x + cap, y2: y1.toFixed(2), stroke: color }),
  ].join("");
}

export function axes(
  xScale: Scale,
  yScale: Scale,
  xLabel: string,
  yLabel: string,
  title: string,
  fmtY: (v: number) => string = (v) => String(v),
): string {
  const parts: string[] = [];
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom;
  const y1 = MARGIN.top;
  parts.push(el("line", { x1: x0, y1: y0, x2: x1, y2: y0, stroke: "#333" }));
  parts.push(el("line", { x1: x0, y1: y0, x2: x0, y2: y1, stroke: "#333" }));
  for (const t of xScale.ticks()) {
    const x = xScale(t);
    if (x < x0 - 0.5 || x > x1 + 0.5) continue;
    parts.push(el("line", { x1: x, y1: y0, x2: x, y2: y0 + 5, stroke: "#333" }));
    parts.push(text(x, y0 + 20, String(t), { "text-anchor": "middle" }));
  }
  for (const t of yScale.ticks()) {
    const y = yScale(t);
    if (y < y1 - 0.5 || y > y0 + 0.5) continue;
    parts.push(el("line", { x1: x0 - 5, y1: y, x2: x0, y2: y, stroke: "#333" }));
    parts.push(el("line", { x1: x0, y1: y, x2: x1, y2: y, stroke: "#ddd" }));
    parts.push(text(x0 - 9, y + 4, fmtY(t), { "text-anchor": "end" }));
  }
  parts.push(text((x0 + x1) / 2, HEIGHT - 12, xLabel, { "text-anchor": "middle" }));
  parts.push(
    text(18, (y0 + y1) / 2, yLabel, {
      "text-anchor": "middle",
      transform: `rotate(-90 18 ${(y0 + y1) / 2})`,
    }),
  );
  parts.push(
    text(WIDTH / 2, 22, title, { "text-anchor": "middle", "font-size": 16 }),
  );
  return parts.join("\n");
}

export function legend(entries: { label: string; color: string }[]): string {
  const x = WIDTH - MARGIN.right + 14;
  return entries
    .map(({ label, color }, i) => {
      const y = MARGIN.top + 10 + i * 20;
      return (
        el("line", { x1: x, y1: y, x2: x + 22, y2: y, stroke: color, "stroke-width": 2 }) +
        text(x + 28, y + 4, label)
      );
    })
    .join("\n");
}

export function document(body: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
    `viewBox="0 0 ${WIDTH} ${HEIGHT}">\n` +
    el("rect", { width: WIDTH, height: HEIGHT, fill: "white" }) +
    "\n" +
    body +
    "\n</svg>\n"
  );
}
