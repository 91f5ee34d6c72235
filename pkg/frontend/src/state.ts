/**
 * View state and its transitions. All transitions are pure: they take a
 * state and return a new one, never mutating mesh data in place. The
 * mesh only ever changes to exactly what the service returned.
 */

import { CameraPose } from "./math.js";
import {
  ApplyResponse,
  GenerateResponse,
  MeshPayload,
  StructuredCommand,
} from "./types.js";

export interface ViewState {
  sessionId: string | null;
  camera: CameraPose;
  mesh: MeshPayload | null;
  pickedFaceId: number | null;
  /** Always a copy of lastGeneration.face_ids, or empty when none. */
  highlightedFaceIds: number[];
  lastGeneration: GenerateResponse | null;
  pendingCommand: StructuredCommand | null;
  status: { kind: "idle" | "busy" | "error" | "info"; text: string };
}

export function initialState(camera: CameraPose): ViewState {
  return {
    sessionId: null,
    camera,
    mesh: null,
    pickedFaceId: null,
    highlightedFaceIds: [],
    lastGeneration: null,
    pendingCommand: null,
    status: { kind: "idle", text: "no session" },
  };
}

function faceIdSet(mesh: MeshPayload | null): Set<number> {
  return new Set((mesh?.faces ?? []).map((f) => f.id));
}

/** Throws if the state violates its documented invariants. */
export function checkInvariants(state: ViewState): void {
  const known = faceIdSet(state.mesh);
  for (const id of state.highlightedFaceIds) {
    if (!known.has(id)) throw new Error(`highlighted face ${id} not in mesh`);
  }
  if (state.pickedFaceId !== null && !known.has(state.pickedFaceId)) {
    throw new Error(`picked face ${state.pickedFaceId} not in mesh`);
  }
  if (state.lastGeneration === null) {
    if (state.highlightedFaceIds.length !== 0) {
      throw new Error("highlight must be empty without a generation");
    }
  } else {
    const want = [...state.lastGeneration.face_ids].sort((a, b) => a - b);
    const got = [...state.highlightedFaceIds].sort((a, b) => a - b);
    if (want.length !== got.length || want.some((v, i) => v !== got[i])) {
      throw new Error("highlight differs from the last generation result");
    }
  }
}

export function sessionOpened(
  state: ViewState,
  sessionId: string,
  mesh: MeshPayload,
): ViewState {
  return {
    ...state,
    sessionId,
    mesh,
    pickedFaceId: null,
    highlightedFaceIds: [],
    lastGeneration: null,
    pendingCommand: null,
    status: { kind: "info", text: `session ${sessionId.slice(0, 8)} opened` },
  };
}

/** A miss leaves the state untouched; a hit records the picked face. */
export function facePicked(state: ViewState, faceId: number | null): ViewState {
  if (faceId === null) return state;
  if (!faceIdSet(state.mesh).has(faceId)) return state;
  return {
    ...state,
    pickedFaceId: faceId,
    status: { kind: "info", text: `picked face ${faceId}` },
  };
}

export function commandParsed(
  state: ViewState,
  command: StructuredCommand,
): ViewState {
  return {
    ...state,
    pendingCommand: command,
    status: { kind: "info", text: "command parsed; confirm to generate" },
  };
}

export function generationReceived(
  state: ViewState,
  generation: GenerateResponse,
): ViewState {
  return {
    ...state,
    lastGeneration: generation,
    highlightedFaceIds: [...generation.face_ids],
    status: {
      kind: "info",
      text: `generated ${generation.face_ids.length} faces for ${generation.feature_type}`,
    },
  };
}

export function applied(state: ViewState, response: ApplyResponse): ViewState {
  // deletes renumber surviving faces; carry the pick through the remap
  let picked = state.pickedFaceId;
  const remap = response.summary.id_remap;
  if (picked !== null && remap) {
    picked = remap[String(picked)] ?? null;
  }
  if (picked !== null && !faceIdSet(response.mesh).has(picked)) picked = null;
  return {
    ...state,
    mesh: response.mesh,
    pickedFaceId: picked,
    highlightedFaceIds: [],
    lastGeneration: null,
    pendingCommand: null,
    status: {
      kind: "info",
      text: `applied; ${response.summary.changed_face_ids.length} faces changed`,
    },
  };
}

export function undone(state: ViewState, mesh: MeshPayload): ViewState {
  let picked = state.pickedFaceId;
  if (picked !== null && !faceIdSet(mesh).has(picked)) picked = null;
  return {
    ...state,
    mesh,
    pickedFaceId: picked,
    highlightedFaceIds: [],
    lastGeneration: null,
    status: { kind: "info", text: "undo applied" },
  };
}

export function statusSet(
  state: ViewState,
  kind: ViewState["status"]["kind"],
  text: string,
): ViewState {
  return { ...state, status: { kind, text } };
}
