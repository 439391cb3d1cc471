// Studio shell: loads a choreography, wires the views to the shared
// state, and gates editing to wide pointer-capable viewports.

import { ApiClient } from "./api.js";
import { AssessmentView } from "./assessmentView.js";
import { FloorView } from "./floorView.js";
import { OrientationView, PointDefinitionView, ShapeView } from "./glyphViews.js";
import { editingAllowed, StudioState, type ActiveView } from "./state.js";
import { TimelineView } from "./timeline.js";
import { TransitionView } from "./transitionView.js";

export class StudioApp {
  readonly state: StudioState;
  readonly api: ApiClient;
  readonly floor: FloorView;
  readonly timeline: TimelineView;
  readonly orientation: OrientationView;
  readonly pointDefinition: PointDefinitionView;
  readonly shape: ShapeView;
  readonly transition: TransitionView;
  readonly assessment: AssessmentView;

  constructor(
    private root: HTMLElement,
    baseUrl = "",
    fetchImpl?: typeof fetch,
    viewport = { width: window.innerWidth || 1280, pointer: true },
  ) {
    this.api = new ApiClient(baseUrl, fetchImpl);
    this.state = new StudioState(viewport);

    const panel = (className: string) => {
      const el = document.createElement("div");
      el.className = className;
      root.appendChild(el);
      return el;
    };

    const toolbar = panel("toolbar");
    this.buildToolbar(toolbar);
    const main = panel("main-view");
    const timelineHost = panel("timeline-host");

    const showError = (message: string) => this.showToast(message);
    this.floor = new FloorView(main, this.state, this.api, showError);
    this.timeline = new TimelineView(timelineHost, this.state, this.api, showError);
    this.orientation = new OrientationView(main, this.state);
    this.pointDefinition = new PointDefinitionView(main, this.state);
    this.shape = new ShapeView(main, this.state);
    this.transition = new TransitionView(main, this.state, this.api);
    this.assessment = new AssessmentView(main, this.state, this.api);

    this.timeline.onFormationSelected = () => this.renderActive();
  }

  async open(choreographyId: string): Promise<void> {
    const doc = await this.api.getChoreography(choreographyId);
    this.state.loadDocument(choreographyId, doc);
    this.timeline.render();
    this.renderActive();
  }

  setView(view: ActiveView): void {
    this.state.view.activeView = view;
    this.renderActive();
  }

  renderActive(): void {
    switch (this.state.view.activeView) {
      case "floor":
        return this.floor.render();
      case "orientation":
        return this.orientation.render();
      case "point_definition":
        return this.pointDefinition.render();
      case "shape":
        return this.shape.render();
      case "transition":
        void this.transition.refreshCollisions().then(() => this.transition.render());
        return this.transition.render();
      case "assessment":
        return this.assessment.render();
      case "heatmap":
        return void this.renderHeatmap();
    }
  }

  private async renderHeatmap(): Promise<void> {
    if (!this.state.choreographyId || !this.state.doc) return;
    const payload = await this.api.heatmap(this.state.choreographyId);
    const host = this.root.querySelector(".main-view");
    if (!host) return;
    host.replaceChildren();
    const table = document.createElement("table");
    table.className = "heatmap";
    const max = Math.max(1, ...payload.counts.flat());
    for (const row of [...payload.counts].reverse()) {
      const tr = document.createElement("tr");
      for (const count of row) {
        const td = document.createElement("td");
        td.style.background = count ? `rgba(200, 40, 20, ${count / max})` : "transparent";
        td.title = String(count);
        tr.appendChild(td);
      }
      table.appendChild(tr);
    }
    host.appendChild(table);
  }

  private buildToolbar(toolbar: HTMLElement): void {
    const views: ActiveView[] = [
      "floor",
      "orientation",
      "transition",
      "point_definition",
      "shape",
      "heatmap",
      "assessment",
    ];
    for (const view of views) {
      const button = document.createElement("button");
      button.textContent = view.replace("_", " ");
      button.dataset.view = view;
      button.addEventListener("click", () => this.setView(view));
      toolbar.appendChild(button);
    }
    const modeToggle = document.createElement("button");
    modeToggle.className = "mode-toggle";
    modeToggle.textContent = "edit";
    modeToggle.addEventListener("click", () => {
      const next = this.state.editing ? "viewing" : "editing";
      if (!this.state.setMode(next)) {
        this.showToast("editing needs a desktop browser");
        return;
      }
      modeToggle.textContent = this.state.editing ? "view" : "edit";
      this.renderActive();
    });
    toolbar.appendChild(modeToggle);

    window.addEventListener?.("resize", () => {
      this.state.setViewport({ width: window.innerWidth, pointer: true });
      if (!editingAllowed({ width: window.innerWidth, pointer: true })) {
        modeToggle.textContent = "edit";
      }
    });
  }

  private showToast(message: string): void {
    const toast = document.createElement("div");
    toast.className = "toast";
    toast.textContent = message;
    this.root.appendChild(toast);
    setTimeout(() => toast.remove(), 4000);
  }
}
