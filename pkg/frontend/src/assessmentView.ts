// Assessment view: three linked panels.
//
//   floor    - planned position as a small circle, actual as a big one,
//              connected by a line and colored YlOrRd by deviation
//   video    - the user's local recording with bounding boxes drawn
//              over the selected dancers (the file never leaves the
//              browser; only track data went to the service)
//   timeline - RMSD of the selected dancers over time with formation
//              markers; scrubbing or clicking a marker seeks the video
//              and updates the floor panel

import { ApiClient } from "./api.js";
import { DEFAULT_DEVIATION_MAX, deviationColor } from "./colors.js";
import { floorTransform } from "./geometry.js";
import { StudioState } from "./state.js";
import type { AssessmentTimeline, DeviationSampleDoc, MarkerDoc, Point } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const TIMELINE_HEIGHT = 90;

interface TrackBox {
  frame: number;
  x: number;
  y: number;
  w: number;
  h: number;
}

/** Minimal client-side parse of the track XML for video overlays. */
export function parseTrackBoxes(tracksXml: string): Map<string, TrackBox[]> {
  const parsed = new DOMParser().parseFromString(tracksXml, "text/xml");
  const out = new Map<string, TrackBox[]>();
  for (const track of parsed.querySelectorAll("track")) {
    const entity = track.getAttribute("entity");
    if (!entity) continue;
    const boxes: TrackBox[] = [];
    for (const key of track.querySelectorAll("key")) {
      boxes.push({
        frame: Number(key.getAttribute("frame")),
        x: Number(key.getAttribute("x")),
        y: Number(key.getAttribute("y")),
        w: Number(key.getAttribute("w")),
        h: Number(key.getAttribute("h")),
      });
    }
    out.set(entity, boxes);
  }
  return out;
}

export function boxAtFrame(boxes: TrackBox[], frame: number): TrackBox | null {
  if (!boxes.length) return null;
  if (frame <= boxes[0].frame) return boxes[0];
  if (frame >= boxes[boxes.length - 1].frame) return boxes[boxes.length - 1];
  let i = 1;
  while (boxes[i].frame < frame) i++;
  const a = boxes[i - 1];
  const b = boxes[i];
  const u = (frame - a.frame) / (b.frame - a.frame);
  return {
    frame,
    x: a.x + u * (b.x - a.x),
    y: a.y + u * (b.y - a.y),
    w: a.w + u * (b.w - a.w),
    h: a.h + u * (b.h - a.h),
  };
}

export class AssessmentView {
  assessmentId: string | null = null;
  timeline: AssessmentTimeline | null = null;
  fps = 25;
  deviationMax = DEFAULT_DEVIATION_MAX;
  video: HTMLVideoElement | null = null;
  private trackBoxes: Map<string, TrackBox[]> = new Map();
  private currentSample: DeviationSampleDoc | null = null;

  constructor(
    private root: HTMLElement,
    private state: StudioState,
    private api: ApiClient,
  ) {}

  attachVideo(video: HTMLVideoElement, fps: number): void {
    this.video = video;
    this.fps = fps;
  }

  attachTracks(tracksXml: string): void {
    this.trackBoxes = parseTrackBoxes(tracksXml);
  }

  async loadAssessment(assessmentId: string, select?: string[]): Promise<void> {
    this.assessmentId = assessmentId;
    this.timeline = await this.api.assessmentTimeline(assessmentId, select);
  }

  /** Re-aggregate the difference timeline for the selected dancers. */
  async applySelection(select: string[]): Promise<void> {
    if (!this.assessmentId) return;
    this.timeline = await this.api.assessmentTimeline(
      this.assessmentId,
      select.length ? select : undefined,
    );
    this.render();
  }

  /** Seek everything to a frame: video, floor panel, playback state. */
  async seekToFrame(frame: number): Promise<void> {
    this.state.view.playback.frame = frame;
    if (this.video) this.video.currentTime = frame / this.fps;
    if (this.assessmentId) {
      const nearest = this.nearestSampledFrame(frame);
      if (nearest !== null) {
        this.currentSample = await this.api.assessmentFrame(this.assessmentId, nearest);
      }
    }
    this.render();
  }

  private nearestSampledFrame(frame: number): number | null {
    const frames = this.timeline?.frames;
    if (!frames || !frames.length) return null;
    let best = frames[0];
    for (const f of frames) {
      if (Math.abs(f - frame) < Math.abs(best - frame)) best = f;
    }
    return best;
  }

  render(): void {
    this.root.replaceChildren();
    if (!this.timeline) return;
    this.root.appendChild(this.renderFloorPanel());
    this.root.appendChild(this.renderVideoOverlay());
    this.root.appendChild(this.renderDifferenceTimeline());
  }

  private renderFloorPanel(): HTMLElement {
    const panel = document.createElement("div");
    panel.className = "assessment-floor";
    const doc = this.state.doc;
    if (!doc || !this.currentSample) return panel;
    const t = floorTransform(doc);
    const svg = document.createElementNS(SVG_NS, "svg");
    svg.setAttribute("viewBox", `0 0 ${t.width} ${t.height}`);
    svg.setAttribute("width", String(t.width));

    for (const [entityId, deviation] of Object.entries(this.currentSample.per_entity).sort()) {
      const color = deviationColor(deviation.deviation, this.deviationMax);
      const [px, py] = t.toScreen(deviation.planned as Point);
      const [ax, ay] = t.toScreen(deviation.actual as Point);

      const link = document.createElementNS(SVG_NS, "line");
      link.setAttribute("x1", String(px));
      link.setAttribute("y1", String(py));
      link.setAttribute("x2", String(ax));
      link.setAttribute("y2", String(ay));
      link.setAttribute("stroke", color);
      link.setAttribute("stroke-width", "2");
      svg.appendChild(link);

      const planned = document.createElementNS(SVG_NS, "circle");
      planned.setAttribute("cx", String(px));
      planned.setAttribute("cy", String(py));
      planned.setAttribute("r", "4");
      planned.setAttribute("fill", color);
      planned.setAttribute("class", "planned-dot");
      planned.setAttribute("data-entity", entityId);
      svg.appendChild(planned);

      const actual = document.createElementNS(SVG_NS, "circle");
      actual.setAttribute("cx", String(ax));
      actual.setAttribute("cy", String(ay));
      actual.setAttribute("r", "8");
      actual.setAttribute("fill", color);
      actual.setAttribute("class", "actual-dot");
      actual.setAttribute("data-entity", entityId);
      actual.addEventListener("click", () => {
        this.state.view.selection = new Set([entityId]);
        void this.applySelection([entityId]);
      });
      svg.appendChild(actual);
    }
    panel.appendChild(svg);
    return panel;
  }

  private renderVideoOverlay(): HTMLElement {
    const panel = document.createElement("div");
    panel.className = "assessment-video";
    if (!this.video) {
      panel.classList.add("video-missing"); // degrade gracefully
      panel.textContent = "attach a local video to validate findings";
      return panel;
    }
    const overlay = document.createElementNS(SVG_NS, "svg");
    overlay.setAttribute("class", "video-overlay");
    const frame = this.state.view.playback.frame;
    const selection = this.state.view.selection;
    for (const entityId of selection.size ? selection : this.trackBoxes.keys()) {
      const boxes = this.trackBoxes.get(entityId);
      if (!boxes) continue;
      const box = boxAtFrame(boxes, frame);
      if (!box) continue;
      const rect = document.createElementNS(SVG_NS, "rect");
      rect.setAttribute("x", String(box.x));
      rect.setAttribute("y", String(box.y));
      rect.setAttribute("width", String(box.w));
      rect.setAttribute("height", String(box.h));
      rect.setAttribute("fill", "none");
      rect.setAttribute("stroke", selection.has(entityId) ? "#ff0" : "#fff");
      rect.setAttribute("stroke-width", "2");
      rect.setAttribute("data-entity", entityId);
      rect.setAttribute("class", "track-box");
      overlay.appendChild(rect);
    }
    panel.appendChild(overlay);
    return panel;
  }

  private renderDifferenceTimeline(): HTMLElement {
    const panel = document.createElement("div");
    panel.className = "difference-timeline";
    const timeline = this.timeline!;
    const frames = timeline.frames;
    if (!frames.length) return panel;
    const fMin = frames[0];
    const fMax = frames[frames.length - 1];
    const width = 640;
    const toX = (frame: number) => ((frame - fMin) / Math.max(1, fMax - fMin)) * width;
    const values = timeline.rmsd.filter((r): r is number => r !== null);
    const vMax = Math.max(0.1, ...values);
    const toY = (rmsd: number) => TIMELINE_HEIGHT - (rmsd / vMax) * (TIMELINE_HEIGHT - 10);

    const svg = document.createElementNS(SVG_NS, "svg");
    svg.setAttribute("width", String(width));
    svg.setAttribute("height", String(TIMELINE_HEIGHT + 16));
    svg.setAttribute("class", "rmsd-timeline");

    const pointsAttr = frames
      .map((frame, i) => {
        const rmsd = timeline.rmsd[i];
        return rmsd === null ? null : `${toX(frame)},${toY(rmsd)}`;
      })
      .filter((s): s is string => s !== null)
      .join(" ");
    const series = document.createElementNS(SVG_NS, "polyline");
    series.setAttribute("points", pointsAttr);
    series.setAttribute("fill", "none");
    series.setAttribute("stroke", "#c33");
    series.setAttribute("stroke-width", "1.5");
    series.setAttribute("class", "rmsd-series");
    svg.appendChild(series);

    // formation markers ease finding the difficult parts
    for (const marker of timeline.markers) {
      svg.appendChild(this.renderMarker(marker, toX(marker.frame)));
    }

    svg.addEventListener("click", (event) => {
      const rect = svg.getBoundingClientRect();
      const frame = Math.round(fMin + ((event.clientX - rect.left) / width) * (fMax - fMin));
      void this.seekToFrame(frame);
    });

    panel.appendChild(svg);
    return panel;
  }

  private renderMarker(marker: MarkerDoc, x: number): SVGElement {
    const g = document.createElementNS(SVG_NS, "g");
    g.setAttribute("class", "formation-marker");
    g.setAttribute("data-formation", marker.formation_id);
    g.setAttribute("data-frame", String(marker.frame));
    const line = document.createElementNS(SVG_NS, "line");
    line.setAttribute("x1", String(x));
    line.setAttribute("x2", String(x));
    line.setAttribute("y1", "0");
    line.setAttribute("y2", String(TIMELINE_HEIGHT));
    line.setAttribute("stroke", "#36c");
    line.setAttribute("stroke-dasharray", "3,2");
    g.appendChild(line);
    const tick = document.createElementNS(SVG_NS, "circle");
    tick.setAttribute("cx", String(x));
    tick.setAttribute("cy", String(TIMELINE_HEIGHT + 8));
    tick.setAttribute("r", "5");
    tick.setAttribute("fill", "#36c");
    g.appendChild(tick);
    g.addEventListener("click", (event) => {
      event.stopPropagation();
      void this.seekToFrame(marker.frame); // seeks video to the formation's frame
    });
    return g;
  }
}
