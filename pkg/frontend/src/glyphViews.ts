// Orientation, point-definition, and shape views.
//
// Orientation glyph: two semicircles, the darker one pointing where the
// body faces, plus a black "nose" line for the head. Point definition:
// foot pictograms (left/right foot, or both feet for a center), colored
// by the dancer standing on the point. Shape view: hull outlines of the
// stored entity selections.

import { entityColor } from "./colors.js";
import { floorTransform, hullForRender } from "./geometry.js";
import { StudioState } from "./state.js";
import type { PlacementDoc, Point } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

function polar(cx: number, cy: number, r: number, screenDegrees: number): Point {
  // orientation 0 faces front (up-screen); positive turns clockwise on screen
  const rad = ((screenDegrees - 90) * Math.PI) / 180;
  return [cx + r * Math.cos(rad), cy + r * Math.sin(rad)];
}

/** The two-semicircle body glyph with a head "nose" line. */
export function orientationGlyph(
  placement: PlacementDoc,
  cx: number,
  cy: number,
  r: number,
  color: string,
): SVGGElement {
  const g = document.createElementNS(SVG_NS, "g");
  g.setAttribute("class", "orientation-glyph");
  const body = placement.body_orientation;

  // the darker half faces the body orientation: split perpendicular to it
  const [sx, sy] = polar(cx, cy, r, body + 90);
  const [ex, ey] = polar(cx, cy, r, body - 90);
  const dark = document.createElementNS(SVG_NS, "path");
  dark.setAttribute("d", `M ${sx} ${sy} A ${r} ${r} 0 0 0 ${ex} ${ey} Z`);
  dark.setAttribute("fill", color);
  dark.setAttribute("class", "body-half dark");
  const light = document.createElementNS(SVG_NS, "path");
  light.setAttribute("d", `M ${sx} ${sy} A ${r} ${r} 0 0 1 ${ex} ${ey} Z`);
  light.setAttribute("fill", color);
  light.setAttribute("opacity", "0.35");
  light.setAttribute("class", "body-half light");
  g.appendChild(light);
  g.appendChild(dark);

  const [nx, ny] = polar(cx, cy, r * 1.4, placement.head_orientation);
  const nose = document.createElementNS(SVG_NS, "line");
  nose.setAttribute("x1", String(cx));
  nose.setAttribute("y1", String(cy));
  nose.setAttribute("x2", String(nx));
  nose.setAttribute("y2", String(ny));
  nose.setAttribute("stroke", "#000");
  nose.setAttribute("stroke-width", "2");
  nose.setAttribute("class", "head-nose");
  g.appendChild(nose);
  return g;
}

export class OrientationView {
  constructor(private root: HTMLElement, private state: StudioState) {}

  render(): void {
    const doc = this.state.doc;
    const formation = this.state.formation();
    this.root.replaceChildren();
    if (!doc || !formation) return;
    const t = floorTransform(doc);
    const svg = document.createElementNS(SVG_NS, "svg");
    svg.setAttribute("viewBox", `0 0 ${t.width} ${t.height}`);
    svg.setAttribute("width", String(t.width));
    svg.setAttribute("class", "orientation-view");
    const index = new Map(doc.entities.map((e, i) => [e.id, i]));
    for (const [entityId, placement] of Object.entries(formation.placements).sort()) {
      const [cx, cy] = t.toScreen(placement.position);
      const glyph = orientationGlyph(placement, cx, cy, 9, entityColor(index.get(entityId) ?? 0));
      glyph.setAttribute("data-entity", entityId);
      svg.appendChild(glyph);
    }
    this.root.appendChild(svg);
  }
}

const FOOT_GLYPHS: Record<string, string> = {
  left_foot: "L",
  right_foot: "R",
  body_center: "LR",
  couple_center: "LR",
};

export class PointDefinitionView {
  constructor(private root: HTMLElement, private state: StudioState) {}

  render(): void {
    const doc = this.state.doc;
    const formation = this.state.formation();
    this.root.replaceChildren();
    if (!doc || !formation) return;
    const t = floorTransform(doc);
    const svg = document.createElementNS(SVG_NS, "svg");
    svg.setAttribute("viewBox", `0 0 ${t.width} ${t.height}`);
    svg.setAttribute("width", String(t.width));
    svg.setAttribute("class", "point-definition-view");
    const index = new Map(doc.entities.map((e, i) => [e.id, i]));
    for (const [entityId, placement] of Object.entries(formation.placements).sort()) {
      const [cx, cy] = t.toScreen(placement.position);
      const g = document.createElementNS(SVG_NS, "g");
      g.setAttribute("data-entity", entityId);
      g.setAttribute("data-point", placement.point_definition);
      // color encodes which dancer of the couple owns the point
      const owner = placement.point_dancer ?? entityId;
      const color = entityColor(index.get(owner) ?? index.get(entityId) ?? 0);
      const feet = FOOT_GLYPHS[placement.point_definition] ?? "LR";
      for (const side of feet) {
        const foot = document.createElementNS(SVG_NS, "ellipse");
        const dx = feet.length === 2 ? (side === "L" ? -4 : 4) : 0;
        foot.setAttribute("cx", String(cx + dx));
        foot.setAttribute("cy", String(cy));
        foot.setAttribute("rx", "3.2");
        foot.setAttribute("ry", "7");
        foot.setAttribute("fill", color);
        foot.setAttribute("class", `foot ${side === "L" ? "left" : "right"}`);
        g.appendChild(foot);
      }
      svg.appendChild(g);
    }
    this.root.appendChild(svg);
  }
}

export class ShapeView {
  constructor(private root: HTMLElement, private state: StudioState) {}

  render(): void {
    const doc = this.state.doc;
    const formation = this.state.formation();
    this.root.replaceChildren();
    if (!doc || !formation) return;
    const t = floorTransform(doc);
    const svg = document.createElementNS(SVG_NS, "svg");
    svg.setAttribute("viewBox", `0 0 ${t.width} ${t.height}`);
    svg.setAttribute("width", String(t.width));
    svg.setAttribute("class", "shape-view");

    formation.shapes.forEach((shape, i) => {
      const points = shape.entity_ids
        .map((id) => formation.placements[id]?.position)
        .filter((p): p is [number, number] => !!p);
      if (points.length < 2) return;
      const hull = hullForRender(points).map((p) => t.toScreen(p));
      const polygon = document.createElementNS(SVG_NS, "polygon");
      polygon.setAttribute("points", hull.map(([x, y]) => `${x},${y}`).join(" "));
      polygon.setAttribute("fill", entityColor(i * 5 + 2));
      polygon.setAttribute("fill-opacity", "0.25");
      polygon.setAttribute("stroke", entityColor(i * 5 + 2));
      polygon.setAttribute("class", "shape-hull");
      polygon.setAttribute("data-label", shape.label);
      svg.appendChild(polygon);
    });

    for (const placement of Object.values(formation.placements)) {
      const [cx, cy] = t.toScreen(placement.position);
      const dot = document.createElementNS(SVG_NS, "circle");
      dot.setAttribute("cx", String(cx));
      dot.setAttribute("cy", String(cy));
      dot.setAttribute("r", "4");
      dot.setAttribute("fill", "#444");
      svg.appendChild(dot);
    }
    this.root.appendChild(svg);
  }
}
