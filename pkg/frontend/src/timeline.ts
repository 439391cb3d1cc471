// Musical timeline: bars as alternating gray rectangles grouped under a
// colored line per dance, formation markers on top. Hovering a marker
// shows a miniature floor preview; in edit mode markers drag to new
// bars (one reposition per drop), and arrow keys step formations.

import { ApiClient } from "./api.js";
import { entityColor } from "./colors.js";
import { beatIndex, floorTransform } from "./geometry.js";
import { StudioState } from "./state.js";
import type { FormationDoc, TimelinePositionDoc } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const BAR_PX = 14;
const HEIGHT = 48;

export class TimelineView {
  onFormationSelected: (id: string) => void = () => {};

  constructor(
    private root: HTMLElement,
    private state: StudioState,
    private api: ApiClient,
    private onError: (message: string) => void = () => {},
  ) {}

  totalBeats(): number {
    const doc = this.state.doc;
    if (!doc) return 0;
    return doc.dances.reduce((acc, d) => acc + d.bar_count * d.beats_per_bar, 0);
  }

  private beatToX(beat: number): number {
    const doc = this.state.doc!;
    let bars = 0;
    let beats = 0;
    for (const dance of doc.dances) {
      const danceBeats = dance.bar_count * dance.beats_per_bar;
      if (beat < beats + danceBeats) {
        return (bars + (beat - beats) / dance.beats_per_bar) * BAR_PX;
      }
      beats += danceBeats;
      bars += dance.bar_count;
    }
    return bars * BAR_PX;
  }

  render(): void {
    const doc = this.state.doc;
    this.root.replaceChildren();
    if (!doc) return;

    const totalBars = doc.dances.reduce((acc, d) => acc + d.bar_count, 0);
    const svg = document.createElementNS(SVG_NS, "svg");
    svg.setAttribute("width", String(totalBars * BAR_PX));
    svg.setAttribute("height", String(HEIGHT));
    svg.setAttribute("class", "timeline");
    svg.setAttribute("tabindex", "0");

    // bars in alternating shades of gray, one colored line per dance
    let barOffset = 0;
    doc.dances.forEach((dance, danceIndex) => {
      for (let bar = 0; bar < dance.bar_count; bar++) {
        const rect = document.createElementNS(SVG_NS, "rect");
        rect.setAttribute("x", String((barOffset + bar) * BAR_PX));
        rect.setAttribute("y", "14");
        rect.setAttribute("width", String(BAR_PX));
        rect.setAttribute("height", String(HEIGHT - 14));
        rect.setAttribute("fill", (barOffset + bar) % 2 ? "#d9d9d9" : "#eeeeee");
        rect.setAttribute("class", "timeline-bar");
        rect.setAttribute("data-dance", String(danceIndex));
        rect.setAttribute("data-bar", String(bar + 1));
        svg.appendChild(rect);
      }
      const line = document.createElementNS(SVG_NS, "line");
      line.setAttribute("x1", String(barOffset * BAR_PX));
      line.setAttribute("x2", String((barOffset + dance.bar_count) * BAR_PX));
      line.setAttribute("y1", "8");
      line.setAttribute("y2", "8");
      line.setAttribute("stroke", entityColor(danceIndex * 3 + 1));
      line.setAttribute("stroke-width", "4");
      line.setAttribute("class", "dance-line");
      svg.appendChild(line);
      barOffset += dance.bar_count;
    });

    for (const formation of doc.formations) {
      const x = this.beatToX(beatIndex(doc, formation.timeline_position));
      const marker = document.createElementNS(SVG_NS, "circle");
      marker.setAttribute("cx", String(x));
      marker.setAttribute("cy", String(HEIGHT / 2 + 6));
      marker.setAttribute("r", "6");
      marker.setAttribute(
        "class",
        formation.id === this.state.view.formationId ? "formation-marker current" : "formation-marker",
      );
      marker.setAttribute("fill", formation.id === this.state.view.formationId ? "#1a6" : "#333");
      marker.setAttribute("data-formation", formation.id);
      marker.addEventListener("click", () => {
        this.state.selectFormation(formation.id);
        this.onFormationSelected(formation.id);
        this.render();
      });
      marker.addEventListener("pointerenter", () => this.showPreview(formation, x));
      marker.addEventListener("pointerleave", () => this.hidePreview());
      svg.appendChild(marker);
    }

    svg.addEventListener("keydown", (event: KeyboardEvent) => {
      if (event.key === "ArrowRight" || event.key === "ArrowLeft") {
        const id = this.state.stepFormation(event.key === "ArrowRight" ? 1 : -1);
        if (id) this.onFormationSelected(id);
        this.render();
        event.preventDefault();
      }
    });

    this.root.appendChild(svg);
  }

  /** Miniature floor preview of the hovered formation. */
  private showPreview(formation: FormationDoc, x: number): void {
    this.hidePreview();
    const doc = this.state.doc!;
    const preview = document.createElement("div");
    preview.className = "formation-preview";
    preview.style.left = `${x}px`;
    const t = floorTransform(doc, 120);
    const svg = document.createElementNS(SVG_NS, "svg");
    svg.setAttribute("width", "120");
    svg.setAttribute("height", String(t.height));
    for (const placement of Object.values(formation.placements)) {
      const [cx, cy] = t.toScreen(placement.position);
      const dot = document.createElementNS(SVG_NS, "circle");
      dot.setAttribute("cx", String(cx));
      dot.setAttribute("cy", String(cy));
      dot.setAttribute("r", "2");
      dot.setAttribute("fill", "#333");
      svg.appendChild(dot);
    }
    preview.appendChild(svg);
    const caption = document.createElement("span");
    caption.textContent = formation.name || formation.id;
    preview.appendChild(caption);
    this.root.appendChild(preview);
  }

  private hidePreview(): void {
    this.root.querySelector(".formation-preview")?.remove();
  }

  /** Drop a formation marker onto a new bar (edit mode): one PUT. */
  async repositionFormation(formationId: string, target: TimelinePositionDoc): Promise<boolean> {
    const doc = this.state.doc;
    if (!doc || !this.state.editing || !this.state.choreographyId) return false;
    const formation = doc.formations.find((f) => f.id === formationId);
    if (!formation) return false;
    const original = formation.timeline_position;
    formation.timeline_position = target;
    this.render(); // optimistic
    try {
      doc.revision = await this.api.putChoreography(this.state.choreographyId, doc);
      return true;
    } catch (error) {
      formation.timeline_position = original;
      this.render();
      this.onError(error instanceof Error ? error.message : String(error));
      return false;
    }
  }
}
