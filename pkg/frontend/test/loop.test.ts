/**
 * The full interaction loop against a scripted service: open session,
 * parse, generate, apply, undo. The service client is real; only fetch
 * is replaced with canned JSON responses in the service wire format.
 * The closing check is the round-trip contract: after undo, rendering
 * the state's mesh reproduces the pre-apply draw list exactly.
 */

import { describe, expect, it } from "vitest";

import { FetchLike, ServiceClient } from "../src/client.js";
import { CameraPose } from "../src/math.js";
import { buildDrawList } from "../src/render.js";
import {
  ViewState,
  applied,
  checkInvariants,
  commandParsed,
  facePicked,
  generationReceived,
  initialState,
  sessionOpened,
  undone,
} from "../src/state.js";
import { cubeMesh, moveCommand, translatedCube } from "./fixtures.js";

const CAMERA: CameraPose = {
  eye: [3, 0.5, 0.5],
  target: [0.5, 0.5, 0.5],
  up: [0, 0, 1],
  fovYDeg: 45,
  aspect: 1,
};

interface Call {
  url: string;
  method: string;
  body: unknown;
}

/** Routes requests by method + path suffix to canned JSON bodies. */
function scriptedFetch(
  routes: Record<string, { status?: number; body: unknown }>,
  calls: Call[],
): FetchLike {
  return async (url, init) => {
    const method = init?.method ?? "GET";
    const path = url.replace(/^https?:\/\/[^/]+/, "");
    calls.push({
      url: path,
      method,
      body: init?.body ? JSON.parse(String(init.body)) : undefined,
    });
    const route = routes[`${method} ${path}`];
    if (!route) throw new Error(`unscripted route: ${method} ${path}`);
    return new Response(JSON.stringify(route.body), {
      status: route.status ?? 200,
      headers: { "content-type": "application/json" },
    });
  };
}

describe("interaction loop", () => {
  it("apply then undo re-renders the pre-edit mesh", async () => {
    const before = cubeMesh();
    const after = translatedCube([6], [3, 0, 0]);
    const calls: Call[] = [];
    const client = new ServiceClient(
      "http://service.test",
      scriptedFetch(
        {
          "POST /sessions": {
            status: 201,
            body: { session_id: "s1", mesh: cubeMesh() },
          },
          "POST /sessions/s1/parse": {
            body: { structured: moveCommand(3), source: "grammar", raw: "" },
          },
          "POST /sessions/s1/generate": {
            body: {
              face_ids: [6],
              raw_sequence: [6, 0],
              feature_type: "rect_through_slot",
              seed_face_id: 6,
            },
          },
          "POST /sessions/s1/apply": {
            body: {
              summary: {
                changed_face_ids: [6],
                api_calls: [
                  {
                    function: "move_faces",
                    arguments: {
                      face_ids: [6],
                      axis: "X",
                      sign: "+",
                      distance_mm: 3,
                    },
                  },
                ],
                id_remap: null,
              },
              mesh: after,
            },
          },
          "POST /sessions/s1/undo": { body: { mesh: cubeMesh() } },
        },
        calls,
      ),
    );

    let state: ViewState = initialState(CAMERA);
    const ticket = await client.createSessionFromModel(before);
    state = sessionOpened(state, ticket.session_id, ticket.mesh);

    const preApplyDraw = buildDrawList(state.mesh!, CAMERA, 720, 540);

    // pick the seed face, parse, generate: highlight must equal the result
    state = facePicked(state, 6);
    const parsed = await client.parse(state.sessionId!, "move the slot 3 mm forward");
    state = commandParsed(state, parsed.structured);
    const gen = await client.generate(state.sessionId!, 6, "rect_through_slot");
    state = generationReceived(state, gen);
    expect(state.highlightedFaceIds).toEqual(gen.face_ids);
    checkInvariants(state);

    // apply: the rendered scene must change
    const applyRes = await client.apply(
      state.sessionId!,
      state.pendingCommand!,
      state.highlightedFaceIds,
    );
    state = applied(state, applyRes);
    checkInvariants(state);
    const appliedDraw = buildDrawList(state.mesh!, CAMERA, 720, 540);
    expect(appliedDraw).not.toEqual(preApplyDraw);

    // undo: the rendered scene must match the pre-apply draw list exactly
    const undoRes = await client.undo(state.sessionId!);
    state = undone(state, undoRes.mesh);
    checkInvariants(state);
    const undoneDraw = buildDrawList(state.mesh!, CAMERA, 720, 540);
    expect(undoneDraw).toEqual(preApplyDraw);

    // the loop spoke to the service in order, with the wire payloads
    expect(calls.map((c) => `${c.method} ${c.url}`)).toEqual([
      "POST /sessions",
      "POST /sessions/s1/parse",
      "POST /sessions/s1/generate",
      "POST /sessions/s1/apply",
      "POST /sessions/s1/undo",
    ]);
    expect(calls[2]!.body).toEqual({
      seed_face_id: 6,
      feature_type: "rect_through_slot",
    });
    expect(calls[3]!.body).toEqual({
      command: moveCommand(3),
      face_ids: [6],
    });
  });

  it("parse failure leaves highlight and mesh untouched", async () => {
    const calls: Call[] = [];
    const client = new ServiceClient(
      "http://service.test",
      scriptedFetch(
        {
          "POST /sessions": {
            status: 201,
            body: { session_id: "s1", mesh: cubeMesh() },
          },
          "POST /sessions/s1/parse": {
            status: 422,
            body: {
              code: "parse_failure",
              message: "command could not be parsed",
              detail: "clause 1 (offset 0): no verb found",
            },
          },
        },
        calls,
      ),
    );
    let state: ViewState = initialState(CAMERA);
    const ticket = await client.createSessionFromModel(cubeMesh());
    state = sessionOpened(state, ticket.session_id, ticket.mesh);
    const snapshot = { ...state };

    await expect(client.parse("s1", "gibberish")).rejects.toMatchObject({
      status: 422,
      code: "parse_failure",
    });
    // the state transition never ran, so nothing changed
    expect(state.highlightedFaceIds).toEqual(snapshot.highlightedFaceIds);
    expect(state.mesh).toBe(snapshot.mesh);
    checkInvariants(state);
  });
});
