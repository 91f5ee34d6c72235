/**
 * Wire types for the workbench service. Field names mirror the JSON
 * payloads exactly, so everything here is snake_case.
 */

export interface TrianglePayload {
  /** Three vertices, each [x, y, z] in mm. */
  v: [number, number, number][];
  /** Per-edge neighbor triangle indices, self-index when open. */
  nbr: number[];
}

export interface FacePayload {
  id: number;
  triangles: TrianglePayload[];
  /** Closed boundary polygons, each a list of [x, y, z] vertices. */
  loops: number[][][];
  neighbor_faces: number[];
}

export interface FeatureLabelPayload {
  type: string;
  face_ids: number[];
}

export interface MeshPayload {
  model_id: string;
  faces: FacePayload[];
  labels: FeatureLabelPayload[];
}

export interface FeatureRef {
  type: string;
  hint?: string;
}

export interface Operation {
  type: "move" | "rotate" | "delete" | "resize";
  parameters: Record<string, number | string>;
}

export interface CommandEntry {
  feature: FeatureRef;
  operation: Operation;
}

/** Parsed form of one natural-language command line. */
export interface StructuredCommand {
  commands: CommandEntry[];
  verified: boolean;
}

export interface ParseResponse {
  structured: StructuredCommand;
  source: string;
  raw: string;
}

export interface GenerateResponse {
  face_ids: number[];
  raw_sequence: number[];
  feature_type: string;
  seed_face_id: number;
}

export interface ApplySummary {
  changed_face_ids: number[];
  api_calls: { function: string; arguments: Record<string, unknown> }[];
  id_remap: Record<string, number> | null;
}

export interface ApplyResponse {
  summary: ApplySummary;
  mesh: MeshPayload;
}

export interface HealthResponse {
  status: string;
  sessions: number;
  checkpoint_loaded: boolean;
  llm_configured: boolean;
}

export interface ErrorBody {
  code: string;
  message: string;
  detail: unknown;
}
