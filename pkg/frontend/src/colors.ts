// Pure color scales. Contract: deviationColor(0) is the yellow end of
// YlOrRd, deviationColor(d >= dMax) the saturated red end; progressColor
// runs through the full RdYlBu diverging palette (0 red, 0.5 pale
// yellow, 1 blue) to encode time along a transition.

export const YLORRD = [
  "#ffffcc",
  "#ffeda0",
  "#fed976",
  "#feb24c",
  "#fd8d3c",
  "#fc4e2a",
  "#e31a1c",
  "#bd0026",
  "#800026",
];

export const RDYLBU = [
  "#a50026",
  "#d73027",
  "#f46d43",
  "#fdae61",
  "#fee090",
  "#ffffbf",
  "#e0f3f8",
  "#abd9e9",
  "#74add1",
  "#4575b4",
  "#313695",
];

function hexToRgb(hex: string): [number, number, number] {
  return [
    parseInt(hex.slice(1, 3), 16),
    parseInt(hex.slice(3, 5), 16),
    parseInt(hex.slice(5, 7), 16),
  ];
}

function rgbToHex(rgb: [number, number, number]): string {
  return "#" + rgb.map((c) => Math.round(c).toString(16).padStart(2, "0")).join("");
}

/** Piecewise-linear interpolation through a palette; t is clamped to [0, 1]. */
export function interpolatePalette(stops: string[], t: number): string {
  const clamped = Math.min(1, Math.max(0, t));
  const scaled = clamped * (stops.length - 1);
  const i = Math.min(stops.length - 2, Math.floor(scaled));
  const u = scaled - i;
  const a = hexToRgb(stops[i]);
  const b = hexToRgb(stops[i + 1]);
  return rgbToHex([a[0] + u * (b[0] - a[0]), a[1] + u * (b[1] - a[1]), a[2] + u * (b[2] - a[2])]);
}

export const DEFAULT_DEVIATION_MAX = 2.0;

export function deviationColor(deviation: number, dMax: number = DEFAULT_DEVIATION_MAX): string {
  return interpolatePalette(YLORRD, deviation / dMax);
}

export function progressColor(progress: number): string {
  return interpolatePalette(RDYLBU, progress);
}

/** Stable per-entity hue so a couple keeps its color across views. */
export function entityColor(index: number): string {
  const hue = (index * 137.508) % 360; // golden-angle spacing
  return `hsl(${hue.toFixed(1)}, 65%, 45%)`;
}
