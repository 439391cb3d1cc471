// The assessment view's video linkage: clicking a formation marker on
// the difference timeline seeks the video to exactly that marker's
// frame, and the per-frame floor panel follows.

import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { AssessmentView, boxAtFrame, parseTrackBoxes } from "../src/assessmentView.js";
import { StudioState } from "../src/state.js";
import type { DeviationSampleDoc } from "../src/types.js";
import { FakeServer, fixtureDoc } from "./fakeServer.js";

const FPS = 25;

function sampleAt(frame: number): DeviationSampleDoc {
  return {
    frame,
    time: frame / FPS,
    aggregate_rmsd: 0.2 + frame / 1000,
    missing: [],
    per_entity: {
      d1: { actual: [1.1, 0.2], planned: [1.0, 0.0], deviation: 0.22 },
      d2: { actual: [-0.6, 0.1], planned: [-1.0, 0.0], deviation: 0.41 },
    },
  };
}

describe("assessment view video linkage", () => {
  let server: FakeServer;
  let api: ApiClient;
  let state: StudioState;
  let view: AssessmentView;
  let host: HTMLElement;
  let video: HTMLVideoElement;

  beforeEach(async () => {
    server = new FakeServer();
    server.seed("demo", fixtureDoc());
    server.seedAssessment({
      id: "a1",
      selection: ["d1", "d2"],
      samples: Array.from({ length: 21 }, (_, i) => sampleAt(i * 10)),
      markers: [
        { formation_id: "f1", frame: 0 },
        { formation_id: "f2", frame: 200 },
      ],
    });
    api = new ApiClient("", server.fetch);
    state = new StudioState({ width: 1400, pointer: true });
    host = document.createElement("div");
    document.body.replaceChildren(host);
    view = new AssessmentView(host, state, api);
    state.loadDocument("demo", await api.getChoreography("demo"));
    video = document.createElement("video");
    view.attachVideo(video, FPS);
    await view.loadAssessment("a1");
    view.render();
  });

  it("clicking a formation marker seeks the video to that frame", async () => {
    const marker = host.querySelector('.formation-marker[data-formation="f2"]') as SVGElement;
    expect(marker).toBeTruthy();
    marker.dispatchEvent(new MouseEvent("click", { bubbles: true }));
    await Promise.resolve(); // let the async seek settle
    expect(state.view.playback.frame).toBe(200);
    expect(video.currentTime).toBeCloseTo(200 / FPS, 10);
  });

  it("seeking updates the per-frame floor panel", async () => {
    await view.seekToFrame(200);
    const actualDots = host.querySelectorAll(".actual-dot");
    const plannedDots = host.querySelectorAll(".planned-dot");
    expect(actualDots.length).toBe(2);
    expect(plannedDots.length).toBe(2);
    // big actual circles, small planned circles, connected pairs
    expect(Number(actualDots[0].getAttribute("r"))).toBeGreaterThan(
      Number(plannedDots[0].getAttribute("r")),
    );
  });

  it("narrowing the selection re-aggregates the timeline", async () => {
    await view.applySelection(["d2"]);
    expect(view.timeline!.select).toEqual(["d2"]);
    // rmsd of a single entity equals its deviation
    expect(view.timeline!.rmsd[0]).toBeCloseTo(0.41, 10);
  });

  it("degrades gracefully without a video", () => {
    const bare = new AssessmentView(host, state, api);
    bare.timeline = view.timeline;
    bare.render();
    expect(host.querySelector(".video-missing")).toBeTruthy();
  });
});

describe("track-box overlay helpers", () => {
  const xml = `<?xml version="1.0"?>
    <tracks video_fps="25.0" frame_offset="0">
      <track entity="d1">
        <key frame="0" x="10" y="20" w="40" h="80"/>
        <key frame="10" x="30" y="20" w="40" h="80"/>
      </track>
    </tracks>`;

  it("parses keyframes per entity", () => {
    const boxes = parseTrackBoxes(xml);
    expect([...boxes.keys()]).toEqual(["d1"]);
    expect(boxes.get("d1")).toHaveLength(2);
  });

  it("interpolates boxes between keyframes and clamps outside", () => {
    const boxes = parseTrackBoxes(xml).get("d1")!;
    expect(boxAtFrame(boxes, 5)!.x).toBeCloseTo(20, 10);
    expect(boxAtFrame(boxes, -5)!.x).toBe(10);
    expect(boxAtFrame(boxes, 99)!.x).toBe(30);
  });
});
