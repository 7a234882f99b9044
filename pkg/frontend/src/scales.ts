/** Minimal linear / log10 axis scales with tick generation. */

export interface Scale {
  (value: number): number;
  ticks(): number[];
}

export function linearScale(
  domain: [number, number],
  range: [number, number],
): Scale {
  let [d0, d1] = domain;
  if (d0 === d1) {
    d0 -= 0.5;
    d1 += 0.5;
  }
  const scale = ((v: number) =>
    range[0] + ((v - d0) / (d1 - d0)) * (range[1] - range[0])) as Scale;
  scale.ticks = () => {
    const span = d1 - d0;
    const rawStep = span / 5;
    const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
    const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => span / s <= 6)!;
    const ticks: number[] = [];
    for (let t = Math.ceil(d0 / step) * step; t <= d1 + 1e-12; t += step) {
      ticks.push(Math.abs(t) < 1e-12 ? 0 : t);
    }
    return ticks;
  };
  return scale;
}

export function logScale(
  domain: [number, number],
  range: [number, number],
): Scale {
  const lo = Math.log10(domain[0]);
  const hi = Math.log10(domain[1]);
  const inner = linearScale([lo, hi], range);
  const scale = ((v: number) => inner(Math.log10(v))) as Scale;
  scale.ticks = () => {
    // decade ticks spanning the domain
    const ticks: number[] = [];
    for (let e = Math.floor(lo); e <= Math.ceil(hi); e += 1) {
      ticks.push(Math.pow(10, e));
    }
    return ticks;
  };
  return scale;
}

export function extent(values: number[]): [number, number] {
  return [Math.min(...values), Math.max(...values)];
}
