// Dance floor view: dots per entity, hover highlights the direct
// neighbors, drag-and-drop moves a dancer.
//
// Edits are optimistic: the local document is updated and re-rendered
// immediately, then PUT to the service citing the base revision. On any
// error the edit rolls back and the dot snaps home.

import { ApiClient } from "./api.js";
import { entityColor } from "./colors.js";
import { floorTransform, neighbors, pointInRect, type FloorTransform } from "./geometry.js";
import { StudioState } from "./state.js";
import type { Point } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface EditOutcome {
  ok: boolean;
  error?: string;
}

export class FloorView {
  private transform: FloorTransform | null = null;
  private drag: { entityId: string; original: Point } | null = null;
  private brushStart: Point | null = null;
  private hovered: string | null = null;

  constructor(
    private root: HTMLElement,
    private state: StudioState,
    private api: ApiClient,
    private onError: (message: string) => void = () => {},
  ) {}

  render(): void {
    const doc = this.state.doc;
    const formation = this.state.formation();
    this.root.replaceChildren();
    if (!doc || !formation) return;
    this.transform = floorTransform(doc);
    const t = this.transform;

    const svg = document.createElementNS(SVG_NS, "svg");
    svg.setAttribute("viewBox", `0 0 ${t.width} ${t.height}`);
    svg.setAttribute("width", String(t.width));
    svg.setAttribute("class", "floor-view");

    // floor rectangle inside the margin band
    const [fx, fy] = t.toScreen([-doc.floor.width / 2, doc.floor.depth / 2]);
    const floorRect = document.createElementNS(SVG_NS, "rect");
    floorRect.setAttribute("x", String(fx));
    floorRect.setAttribute("y", String(fy));
    floorRect.setAttribute("width", String(doc.floor.width * t.metersToPixels));
    floorRect.setAttribute("height", String(doc.floor.depth * t.metersToPixels));
    floorRect.setAttribute("class", "floor-rect");
    floorRect.setAttribute("fill", "#f4f1ea");
    floorRect.setAttribute("stroke", "#888");
    svg.appendChild(floorRect);

    // a small arrow marks the front of the floor
    const arrow = document.createElementNS(SVG_NS, "path");
    const [ax, ay] = t.toScreen([0, doc.floor.depth / 2 + doc.floor.margin / 2]);
    arrow.setAttribute(
      "d",
      `M ${ax - 8} ${ay + 5} L ${ax} ${ay - 5} L ${ax + 8} ${ay + 5} Z`,
    );
    arrow.setAttribute("class", "front-arrow");
    arrow.setAttribute("fill", "#555");
    svg.appendChild(arrow);

    const neighborSet = this.hovered ? new Set(neighbors(formation, this.hovered)) : new Set<string>();

    const entityIndex = new Map(this.state.doc!.entities.map((e, i) => [e.id, i]));
    for (const [entityId, placement] of Object.entries(formation.placements).sort()) {
      const [cx, cy] = t.toScreen(placement.position);
      const entity = doc.entities.find((e) => e.id === entityId);
      const group = document.createElementNS(SVG_NS, "g");
      group.setAttribute("data-entity", entityId);
      group.setAttribute("class", this.classFor(entityId, neighborSet));

      const dot = document.createElementNS(SVG_NS, "circle");
      dot.setAttribute("cx", String(cx));
      dot.setAttribute("cy", String(cy));
      dot.setAttribute("r", entity?.kind === "couple" ? "9" : "7");
      dot.setAttribute("fill", entityColor(entityIndex.get(entityId) ?? 0));
      group.appendChild(dot);

      const label = document.createElementNS(SVG_NS, "text");
      label.setAttribute("x", String(cx));
      label.setAttribute("y", String(cy - 11));
      label.setAttribute("text-anchor", "middle");
      label.setAttribute("class", "entity-label");
      label.textContent = entity?.label || entityId;
      group.appendChild(label);

      group.addEventListener("pointerenter", () => this.setHovered(entityId));
      group.addEventListener("pointerleave", () => this.setHovered(null));
      group.addEventListener("pointerdown", (event) => {
        const floorPoint = this.eventToFloor(event, svg);
        if (floorPoint && this.state.editing) this.beginDrag(entityId);
      });
      svg.appendChild(group);
    }

    svg.addEventListener("pointermove", (event) => {
      const p = this.eventToFloor(event, svg);
      if (!p) return;
      if (this.drag) this.dragTo(p);
      else if (this.brushStart) this.previewBrush(this.brushStart, p);
    });
    svg.addEventListener("pointerup", (event) => {
      const p = this.eventToFloor(event, svg);
      if (this.drag && p) void this.endDrag(p);
      else if (this.brushStart && p) this.endBrush(this.brushStart, p);
    });
    svg.addEventListener("pointerdown", (event) => {
      if (event.target === svg || event.target === floorRect) {
        const p = this.eventToFloor(event, svg);
        if (p) this.beginBrush(p);
      }
    });

    this.root.appendChild(svg);
  }

  private classFor(entityId: string, neighborSet: Set<string>): string {
    const classes = ["entity"];
    if (this.state.view.selection.has(entityId)) classes.push("selected");
    if (this.hovered === entityId) classes.push("hovered");
    if (neighborSet.has(entityId)) classes.push("neighbor");
    return classes.join(" ");
  }

  private eventToFloor(event: MouseEvent, svg: SVGSVGElement): Point | null {
    if (!this.transform) return null;
    const rect = svg.getBoundingClientRect();
    return this.transform.toFloor([event.clientX - rect.left, event.clientY - rect.top]);
  }

  setHovered(entityId: string | null): void {
    this.hovered = entityId;
    this.render();
  }

  hoveredNeighbors(): string[] {
    const formation = this.state.formation();
    if (!formation || !this.hovered) return [];
    return neighbors(formation, this.hovered);
  }

  // -- drag edit (one gesture -> one service mutation) ----------------------

  beginDrag(entityId: string): void {
    const formation = this.state.formation();
    if (!this.state.editing || !formation || !(entityId in formation.placements)) return;
    this.drag = { entityId, original: [...formation.placements[entityId].position] };
  }

  dragTo(point: Point): void {
    const formation = this.state.formation();
    if (!this.drag || !formation) return;
    formation.placements[this.drag.entityId].position = [point[0], point[1]];
    this.render();
  }

  async endDrag(point: Point): Promise<EditOutcome> {
    const drag = this.drag;
    this.drag = null;
    const doc = this.state.doc;
    const formation = this.state.formation();
    if (!drag || !doc || !formation || !this.state.choreographyId) return { ok: false };

    formation.placements[drag.entityId].position = [point[0], point[1]];
    this.render(); // optimistic
    try {
      const revision = await this.api.putChoreography(this.state.choreographyId, doc);
      doc.revision = revision;
      return { ok: true };
    } catch (error) {
      formation.placements[drag.entityId].position = drag.original;
      this.render(); // snap back
      const message = error instanceof Error ? error.message : String(error);
      this.onError(message);
      return { ok: false, error: message };
    }
  }

  // -- brush selection -----------------------------------------------------

  beginBrush(point: Point): void {
    this.brushStart = point;
  }

  private previewBrush(_a: Point, _b: Point): void {
    // selection preview is cosmetic; the set is committed on release
  }

  endBrush(a: Point, b: Point): Set<string> {
    this.brushStart = null;
    const formation = this.state.formation();
    if (!formation) return new Set();
    const selected = new Set<string>();
    for (const [entityId, placement] of Object.entries(formation.placements)) {
      if (pointInRect(placement.position, a, b)) selected.add(entityId);
    }
    this.state.view.selection = selected;
    this.render();
    return selected;
  }
}
