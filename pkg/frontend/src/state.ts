// Single source of truth for what the studio is showing.
//
// All geometry lives on the server; the UI holds a document snapshot,
// applies optimistic edits to it, and reconciles with the service
// response. Editing is gated to wide, pointer-capable viewports.

import type { ChoreographyDoc, FormationDoc } from "./types.js";

export type Mode = "viewing" | "editing";

export type ActiveView =
  | "floor"
  | "orientation"
  | "transition"
  | "point_definition"
  | "shape"
  | "heatmap"
  | "assessment";

export interface Viewport {
  width: number;
  pointer: boolean;
}

export const MIN_EDITING_WIDTH = 900;

export function editingAllowed(viewport: Viewport): boolean {
  return viewport.pointer && viewport.width >= MIN_EDITING_WIDTH;
}

export interface ViewState {
  mode: Mode;
  activeView: ActiveView;
  formationId: string | null;
  selection: Set<string>;
  playback: { frame: number; playing: boolean };
}

export class StudioState {
  doc: ChoreographyDoc | null = null;
  choreographyId: string | null = null;
  view: ViewState = {
    mode: "viewing",
    activeView: "floor",
    formationId: null,
    selection: new Set(),
    playback: { frame: 0, playing: false },
  };

  constructor(private viewport: Viewport = { width: 1280, pointer: true }) {}

  setViewport(viewport: Viewport): void {
    this.viewport = viewport;
    if (!editingAllowed(viewport)) this.view.mode = "viewing";
  }

  setMode(mode: Mode): boolean {
    if (mode === "editing" && !editingAllowed(this.viewport)) return false;
    this.view.mode = mode;
    return true;
  }

  get editing(): boolean {
    return this.view.mode === "editing";
  }

  loadDocument(id: string, doc: ChoreographyDoc): void {
    this.choreographyId = id;
    this.doc = doc;
    this.view.formationId = doc.formations[0]?.id ?? null;
    this.view.selection = new Set();
  }

  formation(): FormationDoc | null {
    if (!this.doc || !this.view.formationId) return null;
    return this.doc.formations.find((f) => f.id === this.view.formationId) ?? null;
  }

  formationIndex(): number {
    if (!this.doc || !this.view.formationId) return -1;
    return this.doc.formations.findIndex((f) => f.id === this.view.formationId);
  }

  /** Arrow-key navigation; returns the newly selected formation id. */
  stepFormation(delta: number): string | null {
    if (!this.doc || !this.doc.formations.length) return null;
    const index = Math.min(
      this.doc.formations.length - 1,
      Math.max(0, this.formationIndex() + delta),
    );
    this.view.formationId = this.doc.formations[index].id;
    this.pruneSelection();
    return this.view.formationId;
  }

  selectFormation(id: string): void {
    this.view.formationId = id;
    this.pruneSelection();
  }

  /** Selection may only contain entities placed in the current formation. */
  pruneSelection(): void {
    const formation = this.formation();
    if (!formation) {
      this.view.selection.clear();
      return;
    }
    for (const id of [...this.view.selection]) {
      if (!(id in formation.placements)) this.view.selection.delete(id);
    }
  }
}
