/**
 * DOM wiring for the viewer: one session per tab, one canvas, a command
 * box, and the parse -> generate -> confirm -> apply/undo loop. All
 * service calls run through a single in-flight gate so requests are
 * serialized client-side.
 */

import { ServiceClient, ServiceError } from "./client.js";
import { CameraPose, Vec3 } from "./math.js";
import { pickFace, pixelToNdc } from "./pick.js";
import { buildDrawList, paint } from "./render.js";
import {
  ViewState,
  applied,
  commandParsed,
  facePicked,
  generationReceived,
  initialState,
  sessionOpened,
  statusSet,
  undone,
} from "./state.js";
import { MeshPayload } from "./types.js";

const DEFAULT_TYPES = [
  "rect_through_slot",
  "rect_pocket",
  "circular_through_hole",
  "step",
];

interface Orbit {
  azimuthDeg: number;
  elevationDeg: number;
  radius: number;
  target: Vec3;
}

function orbitPose(orbit: Orbit, aspect: number): CameraPose {
  const az = (orbit.azimuthDeg * Math.PI) / 180;
  const el = (orbit.elevationDeg * Math.PI) / 180;
  const eye: Vec3 = [
    orbit.target[0] + orbit.radius * Math.cos(el) * Math.cos(az),
    orbit.target[1] + orbit.radius * Math.cos(el) * Math.sin(az),
    orbit.target[2] + orbit.radius * Math.sin(el),
  ];
  return { eye, target: orbit.target, up: [0, 0, 1], fovYDeg: 45, aspect };
}

function fitOrbit(mesh: MeshPayload): Orbit {
  const lo: Vec3 = [Infinity, Infinity, Infinity];
  const hi: Vec3 = [-Infinity, -Infinity, -Infinity];
  for (const face of mesh.faces) {
    for (const tri of face.triangles) {
      for (const v of tri.v) {
        for (let i = 0; i < 3; i++) {
          lo[i] = Math.min(lo[i]!, v[i]!);
          hi[i] = Math.max(hi[i]!, v[i]!);
        }
      }
    }
  }
  const target: Vec3 = [
    (lo[0] + hi[0]) / 2,
    (lo[1] + hi[1]) / 2,
    (lo[2] + hi[2]) / 2,
  ];
  const diag = Math.hypot(hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]);
  return { azimuthDeg: -60, elevationDeg: 25, radius: Math.max(diag, 1) * 1.6, target };
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

export function startApp(): void {
  const canvas = el<HTMLCanvasElement>("view");
  const ctx = canvas.getContext("2d");
  if (!ctx) throw new Error("2d canvas unavailable");

  const client = new ServiceClient(
    (el<HTMLInputElement>("service-url").value || "").trim() ||
      window.location.origin,
  );

  let state: ViewState = initialState(orbitPose(fitOrbit({ model_id: "", faces: [], labels: [] }), 1));
  let orbit: Orbit = { azimuthDeg: -60, elevationDeg: 25, radius: 4, target: [0, 0, 0] };
  let busy = false;

  function redraw(): void {
    const aspect = canvas.width / canvas.height;
    state = { ...state, camera: orbitPose(orbit, aspect) };
    if (state.mesh) {
      const list = buildDrawList(state.mesh, state.camera, canvas.width, canvas.height, {
        highlighted: state.highlightedFaceIds,
        picked: state.pickedFaceId,
      });
      paint(ctx!, list, canvas.width, canvas.height);
    } else {
      ctx!.clearRect(0, 0, canvas.width, canvas.height);
    }
    const status = el<HTMLSpanElement>("status");
    status.textContent = state.status.text;
    status.className = state.status.kind;
    el<HTMLPreElement>("structured").textContent = state.pendingCommand
      ? JSON.stringify(state.pendingCommand, null, 2)
      : "(no parsed command)";
    el<HTMLSpanElement>("picked").textContent =
      state.pickedFaceId === null ? "none" : String(state.pickedFaceId);
    el<HTMLSpanElement>("highlight").textContent =
      state.highlightedFaceIds.length
        ? state.highlightedFaceIds.join(", ")
        : "none";
  }

  /** Serialize service calls; errors land in the status line, retry is re-click. */
  async function guarded(label: string, action: () => Promise<void>): Promise<void> {
    if (busy) return;
    busy = true;
    state = statusSet(state, "busy", `${label}...`);
    redraw();
    try {
      await action();
    } catch (err) {
      const text =
        err instanceof ServiceError
          ? `${label} failed: ${err.code}: ${err.message}`
          : `${label} failed: ${err}`;
      state = statusSet(state, "error", text);
    } finally {
      busy = false;
      redraw();
    }
  }

  el<HTMLButtonElement>("open").addEventListener("click", () =>
    guarded("open session", async () => {
      const seed = Number(el<HTMLInputElement>("seed").value) || 0;
      const ticket = await client.createSyntheticSession(seed, DEFAULT_TYPES);
      state = sessionOpened(state, ticket.session_id, ticket.mesh);
      orbit = fitOrbit(ticket.mesh);
    }),
  );

  el<HTMLInputElement>("upload").addEventListener("change", (event) => {
    const input = event.target as HTMLInputElement;
    const file = input.files?.[0];
    if (!file) return;
    void guarded("upload model", async () => {
      const mesh = JSON.parse(await file.text()) as MeshPayload;
      const ticket = await client.createSessionFromModel(mesh);
      state = sessionOpened(state, ticket.session_id, ticket.mesh);
      orbit = fitOrbit(ticket.mesh);
    });
  });

  el<HTMLButtonElement>("parse").addEventListener("click", () =>
    guarded("parse", async () => {
      const sessionId = state.sessionId;
      if (!sessionId) throw new Error("open a session first");
      const text = el<HTMLInputElement>("command").value;
      const res = await client.parse(sessionId, text);
      state = commandParsed(state, res.structured);
      // one submit covers both steps: with a seed face picked, go straight
      // to generation so the feature highlight appears for confirmation
      if (state.pickedFaceId !== null) {
        const feature = res.structured.commands[0]?.feature.type;
        if (feature) {
          const gen = await client.generate(sessionId, state.pickedFaceId, feature);
          state = generationReceived(state, gen);
        }
      }
    }),
  );

  el<HTMLButtonElement>("generate").addEventListener("click", () =>
    guarded("generate", async () => {
      if (!state.sessionId) throw new Error("open a session first");
      if (!state.pendingCommand) throw new Error("parse a command first");
      if (state.pickedFaceId === null) {
        throw new Error("pick a seed face on the model first");
      }
      const feature = state.pendingCommand.commands[0]?.feature.type;
      if (!feature) throw new Error("parsed command names no feature");
      const res = await client.generate(state.sessionId, state.pickedFaceId, feature);
      state = generationReceived(state, res);
    }),
  );

  el<HTMLButtonElement>("apply").addEventListener("click", () =>
    guarded("apply", async () => {
      if (!state.sessionId) throw new Error("open a session first");
      if (!state.pendingCommand) throw new Error("parse a command first");
      if (!state.highlightedFaceIds.length) {
        throw new Error("generate feature faces first");
      }
      const res = await client.apply(
        state.sessionId,
        state.pendingCommand,
        state.highlightedFaceIds,
      );
      state = applied(state, res);
    }),
  );

  el<HTMLButtonElement>("undo").addEventListener("click", () =>
    guarded("undo", async () => {
      if (!state.sessionId) throw new Error("open a session first");
      const res = await client.undo(state.sessionId);
      state = undone(state, res.mesh);
    }),
  );

  // click to pick; drag to orbit; wheel to zoom
  let down: { x: number; y: number } | null = null;
  let dragged = false;
  canvas.addEventListener("pointerdown", (event) => {
    down = { x: event.offsetX, y: event.offsetY };
    dragged = false;
  });
  canvas.addEventListener("pointermove", (event) => {
    if (!down || !(event.buttons & 1)) return;
    const dx = event.offsetX - down.x;
    const dy = event.offsetY - down.y;
    if (Math.abs(dx) + Math.abs(dy) > 3) dragged = true;
    if (dragged) {
      orbit.azimuthDeg -= dx * 0.5;
      orbit.elevationDeg = Math.max(-85, Math.min(85, orbit.elevationDeg + dy * 0.5));
      down = { x: event.offsetX, y: event.offsetY };
      redraw();
    }
  });
  canvas.addEventListener("pointerup", (event) => {
    const wasDrag = dragged;
    down = null;
    dragged = false;
    if (wasDrag || !state.mesh) return;
    const [nx, ny] = pixelToNdc(event.offsetX, event.offsetY, canvas.width, canvas.height);
    const hit = pickFace(state.mesh, state.camera, nx, ny);
    state = facePicked(state, hit ? hit.faceId : null);
    redraw();
  });
  canvas.addEventListener("wheel", (event) => {
    event.preventDefault();
    orbit.radius *= event.deltaY > 0 ? 1.1 : 1 / 1.1;
    redraw();
  });

  redraw();
}

startApp();
