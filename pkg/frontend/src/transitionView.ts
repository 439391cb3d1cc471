// Transition view: ghost of the previous formation, the current one,
// and each dancer's route between them as a polyline colored through
// the RdYlBu diverging palette by transition progress. Paths crossing
// with similar hues are the visual collision cue; confirmed events from
// the service add a badge. A bar chart shows path lengths in meters.

import { ApiClient } from "./api.js";
import { entityColor, progressColor } from "./colors.js";
import {
  floorTransform,
  pathPosition,
  transitionRenderPath,
  type RenderPath,
} from "./geometry.js";
import { StudioState } from "./state.js";
import type { CollisionEventDoc } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const COLOR_SEGMENTS = 24;

export class TransitionView {
  collisions: CollisionEventDoc[] = [];
  private animationHandle: number | null = null;

  constructor(
    private root: HTMLElement,
    private state: StudioState,
    private api: ApiClient,
  ) {}

  /** The transition arriving at the current formation (none for the first). */
  transitionIndex(): number {
    return this.state.formationIndex() - 1;
  }

  async refreshCollisions(threshold = 0.5): Promise<void> {
    const index = this.transitionIndex();
    this.collisions = [];
    if (index < 0 || !this.state.choreographyId || !this.state.doc) return;
    const payload = await this.api.collisions(this.state.choreographyId, threshold);
    this.collisions = payload.transitions[index]?.events ?? [];
  }

  render(): void {
    const doc = this.state.doc;
    this.root.replaceChildren();
    const index = this.transitionIndex();
    if (!doc || index < 0) return;
    const transition = doc.transitions[index];
    const from = doc.formations.find((f) => f.id === transition.from_formation_id)!;
    const to = doc.formations.find((f) => f.id === transition.to_formation_id)!;
    const t = floorTransform(doc);

    const svg = document.createElementNS(SVG_NS, "svg");
    svg.setAttribute("viewBox", `0 0 ${t.width} ${t.height}`);
    svg.setAttribute("width", String(t.width));
    svg.setAttribute("class", "transition-view");

    // previous formation as ghosts
    for (const placement of Object.values(from.placements)) {
      const [cx, cy] = t.toScreen(placement.position);
      const ghost = document.createElementNS(SVG_NS, "circle");
      ghost.setAttribute("cx", String(cx));
      ghost.setAttribute("cy", String(cy));
      ghost.setAttribute("r", "6");
      ghost.setAttribute("fill", "#999");
      ghost.setAttribute("opacity", "0.35");
      ghost.setAttribute("class", "ghost");
      svg.appendChild(ghost);
    }

    const entityIds = [...new Set([...Object.keys(from.placements), ...Object.keys(to.placements)])].sort();
    const lengths: { entityId: string; meters: number }[] = [];
    for (const entityId of entityIds) {
      const path = transitionRenderPath(doc, index, entityId);
      if (!path) continue;
      this.appendColoredPath(svg, t.toScreen.bind(t), path, entityId);
      lengths.push({ entityId, meters: this.pathMeters(path) });
    }

    // waypoint handles
    for (const [entityId, waypoints] of Object.entries(transition.waypoints)) {
      for (const wp of waypoints) {
        const [cx, cy] = t.toScreen(wp.position);
        const handle = document.createElementNS(SVG_NS, "rect");
        handle.setAttribute("x", String(cx - 4));
        handle.setAttribute("y", String(cy - 4));
        handle.setAttribute("width", "8");
        handle.setAttribute("height", "8");
        handle.setAttribute("fill", "#fff");
        handle.setAttribute("stroke", "#333");
        handle.setAttribute("class", "waypoint-handle");
        handle.setAttribute("data-entity", entityId);
        svg.appendChild(handle);
      }
    }

    // current formation on top
    const entityIndex = new Map(doc.entities.map((e, i) => [e.id, i]));
    for (const [entityId, placement] of Object.entries(to.placements).sort()) {
      const [cx, cy] = t.toScreen(placement.position);
      const dot = document.createElementNS(SVG_NS, "circle");
      dot.setAttribute("cx", String(cx));
      dot.setAttribute("cy", String(cy));
      dot.setAttribute("r", "7");
      dot.setAttribute("fill", entityColor(entityIndex.get(entityId) ?? 0));
      dot.setAttribute("data-entity", entityId);
      svg.appendChild(dot);
    }

    // collision badges from the service
    for (const event of this.collisions) {
      const [cx, cy] = t.toScreen(event.position_a);
      const badge = document.createElementNS(SVG_NS, "text");
      badge.setAttribute("x", String(cx));
      badge.setAttribute("y", String(cy - 12));
      badge.setAttribute("text-anchor", "middle");
      badge.setAttribute("class", "collision-badge");
      badge.textContent = `⚠ ${event.entity_a}×${event.entity_b}`;
      svg.appendChild(badge);
    }

    this.root.appendChild(svg);
    this.root.appendChild(this.renderBarChart(lengths));
  }

  private pathMeters(path: RenderPath): number {
    let total = 0;
    for (let i = 1; i < path.points.length; i++) {
      total += Math.hypot(
        path.points[i][0] - path.points[i - 1][0],
        path.points[i][1] - path.points[i - 1][1],
      );
    }
    return total;
  }

  private appendColoredPath(
    svg: SVGSVGElement,
    toScreen: (p: [number, number]) => [number, number],
    path: RenderPath,
    entityId: string,
  ): void {
    const t0 = path.times[0];
    const t1 = path.times[path.times.length - 1];
    if (t1 <= t0) return;
    for (let s = 0; s < COLOR_SEGMENTS; s++) {
      const ta = t0 + ((t1 - t0) * s) / COLOR_SEGMENTS;
      const tb = t0 + ((t1 - t0) * (s + 1)) / COLOR_SEGMENTS;
      const [x1, y1] = toScreen(pathPosition(path, ta));
      const [x2, y2] = toScreen(pathPosition(path, tb));
      const segment = document.createElementNS(SVG_NS, "line");
      segment.setAttribute("x1", String(x1));
      segment.setAttribute("y1", String(y1));
      segment.setAttribute("x2", String(x2));
      segment.setAttribute("y2", String(y2));
      segment.setAttribute("stroke", progressColor((s + 0.5) / COLOR_SEGMENTS));
      segment.setAttribute("stroke-width", "3");
      segment.setAttribute("class", "transition-segment");
      segment.setAttribute("data-entity", entityId);
      svg.appendChild(segment);
    }
  }

  /** Distance bar chart: path length per dancer, sorted by entity id. */
  private renderBarChart(lengths: { entityId: string; meters: number }[]): HTMLElement {
    const doc = this.state.doc!;
    const container = document.createElement("div");
    container.className = "distance-bar-chart";
    const max = Math.max(1, ...lengths.map((l) => l.meters));
    const entityIndex = new Map(doc.entities.map((e, i) => [e.id, i]));
    for (const { entityId, meters } of lengths) {
      const row = document.createElement("div");
      row.className = "bar-row";
      row.dataset.entity = entityId;
      const label = document.createElement("span");
      label.textContent = entityId;
      const bar = document.createElement("div");
      bar.className = "bar";
      bar.style.width = `${(100 * meters) / max}%`;
      bar.style.background = entityColor(entityIndex.get(entityId) ?? 0);
      const value = document.createElement("span");
      value.className = "meters";
      value.textContent = `${meters.toFixed(1)} m`;
      row.append(label, bar, value);
      container.appendChild(row);
    }
    return container;
  }

  /** Viewing-mode animation: advance dots along their paths. */
  animate(durationMs = 2000): void {
    const doc = this.state.doc;
    const index = this.transitionIndex();
    if (!doc || index < 0) return;
    const svg = this.root.querySelector("svg");
    if (!svg) return;
    const paths = new Map<string, RenderPath>();
    for (const dot of svg.querySelectorAll("circle[data-entity]")) {
      const entityId = (dot as SVGCircleElement).dataset.entity!;
      const path = transitionRenderPath(doc, index, entityId);
      if (path) paths.set(entityId, path);
    }
    const t = floorTransform(doc);
    const started = performance.now();
    const tick = (now: number) => {
      const progress = Math.min(1, (now - started) / durationMs);
      for (const [entityId, path] of paths) {
        const beat =
          path.times[0] + progress * (path.times[path.times.length - 1] - path.times[0]);
        const [cx, cy] = t.toScreen(pathPosition(path, beat));
        const dot = svg.querySelector(`circle[data-entity="${entityId}"]`);
        dot?.setAttribute("cx", String(cx));
        dot?.setAttribute("cy", String(cy));
      }
      if (progress < 1) this.animationHandle = requestAnimationFrame(tick);
    };
    this.animationHandle = requestAnimationFrame(tick);
  }

  stopAnimation(): void {
    if (this.animationHandle !== null) cancelAnimationFrame(this.animationHandle);
    this.animationHandle = null;
  }
}
