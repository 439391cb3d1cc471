// An in-memory stand-in for the formationkit service, faithful to the
// wire contract the views rely on: revision compare-and-swap on PUT,
// JSON envelopes with schema_version, and assessment timeline routes.

import type { ChoreographyDoc, DeviationSampleDoc, MarkerDoc } from "../src/types.js";

const SCHEMA_VERSION = "1.0.0";

export interface FakeAssessment {
  id: string;
  selection: string[];
  samples: DeviationSampleDoc[];
  markers: MarkerDoc[];
}

export class FakeServer {
  choreographies = new Map<string, ChoreographyDoc>();
  assessments = new Map<string, FakeAssessment>();

  seed(id: string, doc: ChoreographyDoc): void {
    this.choreographies.set(id, structuredClone(doc));
  }

  seedAssessment(assessment: FakeAssessment): void {
    this.assessments.set(assessment.id, assessment);
  }

  /** A fetch-compatible handler to inject into the ApiClient. */
  fetch = async (url: string, init?: RequestInit): Promise<Response> => {
    const method = init?.method ?? "GET";
    const { pathname, searchParams } = new URL(url, "http://fake");
    const respond = (status: number, body: unknown) =>
      new Response(JSON.stringify(body), {
        status,
        headers: { "content-type": "application/json" },
      });

    let match = pathname.match(/^\/choreographies\/([^/]+)$/);
    if (match) {
      const id = match[1];
      if (method === "GET") {
        const doc = this.choreographies.get(id);
        if (!doc) return respond(404, { schema_version: SCHEMA_VERSION, error: { code: "NOT_FOUND", message: id } });
        return respond(200, doc);
      }
      if (method === "PUT") {
        const submitted = JSON.parse(String(init?.body)) as ChoreographyDoc;
        const current = this.choreographies.get(id)?.revision ?? 0;
        if (submitted.revision !== current) {
          return respond(409, {
            schema_version: SCHEMA_VERSION,
            error: { code: "REVISION_CONFLICT", message: "stale revision" },
            current_revision: current,
          });
        }
        const stored = structuredClone(submitted);
        stored.revision = current + 1;
        this.choreographies.set(id, stored);
        return respond(200, { schema_version: SCHEMA_VERSION, id, revision: stored.revision });
      }
    }

    match = pathname.match(/^\/choreographies\/([^/]+)\/analysis\/collisions$/);
    if (match && method === "GET") {
      return respond(200, {
        schema_version: SCHEMA_VERSION,
        collisions: {
          threshold: Number(searchParams.get("threshold") ?? "0.5"),
          transitions: (this.choreographies.get(match[1])?.transitions ?? []).map((t) => ({
            from: t.from_formation_id,
            to: t.to_formation_id,
            events: [],
          })),
        },
      });
    }

    match = pathname.match(/^\/assessments\/([^/]+)\/timeline$/);
    if (match && method === "GET") {
      const assessment = this.assessments.get(match[1]);
      if (!assessment) return respond(404, { error: { code: "NOT_FOUND", message: match[1] } });
      const select = searchParams.get("select")?.split(",") ?? assessment.selection;
      const rmsd = assessment.samples.map((s) => {
        const squares = select
          .filter((e) => e in s.per_entity)
          .map((e) => s.per_entity[e].deviation ** 2);
        return squares.length
          ? Math.sqrt(squares.reduce((a, b) => a + b, 0) / squares.length)
          : null;
      });
      return respond(200, {
        schema_version: SCHEMA_VERSION,
        assessment_id: assessment.id,
        select,
        frames: assessment.samples.map((s) => s.frame),
        times: assessment.samples.map((s) => s.time),
        rmsd,
        markers: assessment.markers,
      });
    }

    match = pathname.match(/^\/assessments\/([^/]+)\/frames\/(\d+)$/);
    if (match && method === "GET") {
      const assessment = this.assessments.get(match[1]);
      const sample = assessment?.samples.find((s) => s.frame === Number(match![2]));
      if (!sample) return respond(404, { error: { code: "NOT_FOUND", message: pathname } });
      return respond(200, { schema_version: SCHEMA_VERSION, ...sample });
    }

    return respond(404, { schema_version: SCHEMA_VERSION, error: { code: "NOT_FOUND", message: pathname } });
  };
}

/** A small valid choreography document for the tests. */
export function fixtureDoc(): ChoreographyDoc {
  const placements = (offset: number) =>
    Object.fromEntries(
      ["d1", "d2", "d3", "d4"].map((id, i) => [
        id,
        {
          position: [i * 2 - 3, offset] as [number, number],
          body_orientation: 0,
          head_orientation: 0,
          point_definition: "body_center" as const,
          point_dancer: null,
          pose_id: null,
        },
      ]),
    );
  return {
    schema_version: SCHEMA_VERSION,
    title: "Fixture",
    revision: 0,
    floor: { width: 16, depth: 16, margin: 2 },
    dances: [{ name: "Samba", bar_count: 16, beats_per_bar: 8 }],
    entities: ["d1", "d2", "d3", "d4"].map((id, i) => ({
      id,
      kind: "dancer" as const,
      role: i % 2 ? ("gentleman" as const) : ("lady" as const),
      label: `Dancer ${i + 1}`,
      member_ids: [],
    })),
    poses: [],
    formations: [
      {
        id: "f1",
        name: "Opening",
        timeline_position: { dance_index: 0, bar: 1, beat: 1 },
        video_time: 0.0,
        placements: placements(0),
        shapes: [{ entity_ids: ["d1", "d2", "d3"], label: "line" }],
      },
      {
        id: "f2",
        name: "Second",
        timeline_position: { dance_index: 0, bar: 5, beat: 1 },
        video_time: 8.0,
        placements: placements(3),
        shapes: [],
      },
    ],
    transitions: [{ from_formation_id: "f1", to_formation_id: "f2", waypoints: {} }],
  };
}
