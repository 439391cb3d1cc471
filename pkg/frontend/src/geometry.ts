// Rendering-side geometry only: coordinate mapping, neighbor highlights,
// and a hull walk for drawing shape outlines. Authoritative analytics
// (distances, collisions, heatmaps) always come from the service.

import type { ChoreographyDoc, FormationDoc, Point } from "./types.js";

export interface FloorTransform {
  toScreen(p: Point): Point;
  toFloor(p: Point): Point;
  width: number;
  height: number;
  metersToPixels: number;
}

/**
 * Map floor meters onto an SVG viewport. The audience ("front", +y) is
 * at the top of the screen, +x runs right, and the margin band around
 * the floor stays visible so off-floor entries can be placed.
 */
export function floorTransform(doc: ChoreographyDoc, pixelWidth = 640): FloorTransform {
  const { width, depth, margin } = doc.floor;
  const extentX = width + 2 * margin;
  const extentY = depth + 2 * margin;
  const scale = pixelWidth / extentX;
  const pixelHeight = extentY * scale;
  return {
    width: pixelWidth,
    height: pixelHeight,
    metersToPixels: scale,
    toScreen: ([x, y]) => [(x + extentX / 2) * scale, (extentY / 2 - y) * scale],
    toFloor: ([px, py]) => [px / scale - extentX / 2, extentY / 2 - py / scale],
  };
}

export const NEIGHBOR_COUNT = 4;
export const NEIGHBOR_RADIUS_M = 3.0;

/** Up to 4 nearest placed entities within 3 m: who you stand next to. */
export function neighbors(
  formation: FormationDoc,
  entityId: string,
  count = NEIGHBOR_COUNT,
  radius = NEIGHBOR_RADIUS_M,
): string[] {
  const self = formation.placements[entityId];
  if (!self) return [];
  const others = Object.entries(formation.placements)
    .filter(([id]) => id !== entityId)
    .map(([id, pl]) => ({
      id,
      d: Math.hypot(pl.position[0] - self.position[0], pl.position[1] - self.position[1]),
    }))
    .filter((o) => o.d <= radius)
    .sort((a, b) => a.d - b.d);
  return others.slice(0, count).map((o) => o.id);
}

export function pointInRect(p: Point, a: Point, b: Point): boolean {
  const [x1, x2] = [Math.min(a[0], b[0]), Math.max(a[0], b[0])];
  const [y1, y2] = [Math.min(a[1], b[1]), Math.max(a[1], b[1])];
  return p[0] >= x1 && p[0] <= x2 && p[1] >= y1 && p[1] <= y2;
}

function cross(o: Point, a: Point, b: Point): number {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

/** Monotone-chain hull for drawing shape outlines (render-only). */
export function hullForRender(points: Point[]): Point[] {
  const unique = [...new Map(points.map((p) => [`${p[0]},${p[1]}`, p])).values()].sort(
    (a, b) => a[0] - b[0] || a[1] - b[1],
  );
  if (unique.length <= 2) return unique;
  const lower: Point[] = [];
  for (const p of unique) {
    while (lower.length >= 2 && cross(lower[lower.length - 2], lower[lower.length - 1], p) <= 0)
      lower.pop();
    lower.push(p);
  }
  const upper: Point[] = [];
  for (const p of [...unique].reverse()) {
    while (upper.length >= 2 && cross(upper[upper.length - 2], upper[upper.length - 1], p) <= 0)
      upper.pop();
    upper.push(p);
  }
  return [...lower.slice(0, -1), ...upper.slice(0, -1)];
}

/** Continuous beat index of a timeline position (for rendering paths). */
export function beatIndex(doc: ChoreographyDoc, pos: { dance_index: number; bar: number; beat: number }): number {
  let beats = 0;
  for (let i = 0; i < pos.dance_index; i++) {
    beats += doc.dances[i].bar_count * doc.dances[i].beats_per_bar;
  }
  return beats + (pos.bar - 1) * doc.dances[pos.dance_index].beats_per_bar + (pos.beat - 1);
}

export interface RenderPath {
  times: number[];
  points: Point[];
}

/** The polyline a dancer follows through a transition (render-only). */
export function transitionRenderPath(
  doc: ChoreographyDoc,
  transitionIndex: number,
  entityId: string,
): RenderPath | null {
  const transition = doc.transitions[transitionIndex];
  if (!transition) return null;
  const from = doc.formations.find((f) => f.id === transition.from_formation_id)!;
  const to = doc.formations.find((f) => f.id === transition.to_formation_id)!;
  const start = from.placements[entityId];
  const end = to.placements[entityId];
  const t0 = beatIndex(doc, from.timeline_position);
  const t1 = beatIndex(doc, to.timeline_position);
  if (!start && !end) return null;
  if (!start || !end) {
    const held = (start ?? end)!.position;
    return { times: [t0, t1], points: [held, held] };
  }
  const times = [t0];
  const points: Point[] = [start.position];
  for (const wp of transition.waypoints[entityId] ?? []) {
    times.push(beatIndex(doc, wp.time));
    points.push(wp.position);
  }
  times.push(t1);
  points.push(end.position);
  return { times, points };
}

export function pathPosition(path: RenderPath, t: number): Point {
  const { times, points } = path;
  if (t <= times[0]) return points[0];
  if (t >= times[times.length - 1]) return points[points.length - 1];
  let i = 1;
  while (times[i] < t) i++;
  const u = (t - times[i - 1]) / (times[i] - times[i - 1]);
  return [
    points[i - 1][0] + u * (points[i][0] - points[i - 1][0]),
    points[i - 1][1] + u * (points[i][1] - points[i - 1][1]),
  ];
}

export function pathLength(path: RenderPath): number {
  let total = 0;
  for (let i = 1; i < path.points.length; i++) {
    total += Math.hypot(
      path.points[i][0] - path.points[i - 1][0],
      path.points[i][1] - path.points[i - 1][1],
    );
  }
  return total;
}
