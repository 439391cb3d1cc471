// Document and report shapes exchanged with the formationkit service.

export interface TimelinePositionDoc {
  dance_index: number;
  bar: number;
  beat: number;
}

export interface PlacementDoc {
  position: [number, number];
  body_orientation: number;
  head_orientation: number;
  point_definition: "couple_center" | "body_center" | "left_foot" | "right_foot";
  point_dancer: string | null;
  pose_id: string | null;
}

export interface ShapeDoc {
  entity_ids: string[];
  label: string;
}

export interface FormationDoc {
  id: string;
  name: string;
  timeline_position: TimelinePositionDoc;
  video_time: number | null;
  placements: Record<string, PlacementDoc>;
  shapes: ShapeDoc[];
}

export interface WaypointDoc {
  time: TimelinePositionDoc;
  position: [number, number];
}

export interface TransitionDoc {
  from_formation_id: string;
  to_formation_id: string;
  waypoints: Record<string, WaypointDoc[]>;
}

export interface EntityDoc {
  id: string;
  kind: "dancer" | "couple";
  role: "lady" | "gentleman" | "none";
  label: string;
  member_ids: string[];
}

export interface DanceDoc {
  name: string;
  bar_count: number;
  beats_per_bar: number;
}

export interface PoseDoc {
  id: string;
  joint_rotations: Record<string, [number, number, number]>;
}

export interface ChoreographyDoc {
  schema_version: string;
  title: string;
  revision: number;
  floor: { width: number; depth: number; margin: number; front_direction?: string };
  dances: DanceDoc[];
  entities: EntityDoc[];
  poses?: PoseDoc[];
  formations: FormationDoc[];
  transitions: TransitionDoc[];
}

export interface ChoreographyListing {
  id: string;
  title: string;
  revision: number;
}

export interface MarkerDoc {
  formation_id: string;
  frame: number;
}

export interface EntityDeviationDoc {
  actual: [number, number];
  planned: [number, number];
  deviation: number;
}

export interface DeviationSampleDoc {
  frame: number;
  time: number;
  aggregate_rmsd: number | null;
  missing: string[];
  per_entity: Record<string, EntityDeviationDoc>;
}

export interface AssessmentTimeline {
  assessment_id: string;
  select: string[];
  frames: number[];
  times: number[];
  rmsd: (number | null)[];
  markers: MarkerDoc[];
}

export interface DistancesPayload {
  accumulated: Record<string, number>;
  per_transition: { from: string; to: string; meters: Record<string, number> }[];
}

export interface CollisionEventDoc {
  entity_a: string;
  entity_b: string;
  t_closest: number;
  min_distance: number;
  position_a: [number, number];
  position_b: [number, number];
}

export interface CollisionsPayload {
  threshold: number;
  transitions: { from: string; to: string; events: CollisionEventDoc[] }[];
}

export interface HeatmapPayload {
  cell_size: number;
  origin: [number, number];
  counts: number[][];
  total: number;
}

export type Point = [number, number];
