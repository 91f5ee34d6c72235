/**
 * Shared test fixtures: a unit cube mesh in the service wire format and
 * helpers to derive edited variants. Face plan: 1 z=0, 2 z=1, 3 y=0,
 * 4 y=1, 5 x=0, 6 x=1.
 */

import { MeshPayload, StructuredCommand } from "../src/types.js";

export function cubeMesh(): MeshPayload {
  return {
    model_id: "unit_cube",
    faces: [
      {
        id: 1,
        triangles: [
          { v: [[1, 0, 0], [0, 0, 0], [0, 1, 0]], nbr: [1, 0, 0] },
          { v: [[0, 1, 0], [1, 1, 0], [1, 0, 0]], nbr: [0, 1, 1] },
        ],
        loops: [[[0, 0, 0], [0, 1, 0], [1, 1, 0], [1, 0, 0]]],
        neighbor_faces: [3, 4, 5, 6],
      },
      {
        id: 2,
        triangles: [
          { v: [[0, 1, 1], [0, 0, 1], [1, 0, 1]], nbr: [1, 0, 0] },
          { v: [[1, 0, 1], [1, 1, 1], [0, 1, 1]], nbr: [0, 1, 1] },
        ],
        loops: [[[0, 0, 1], [1, 0, 1], [1, 1, 1], [0, 1, 1]]],
        neighbor_faces: [3, 4, 5, 6],
      },
      {
        id: 3,
        triangles: [
          { v: [[0, 0, 1], [0, 0, 0], [1, 0, 0]], nbr: [1, 0, 0] },
          { v: [[1, 0, 0], [1, 0, 1], [0, 0, 1]], nbr: [0, 1, 1] },
        ],
        loops: [[[0, 0, 0], [1, 0, 0], [1, 0, 1], [0, 0, 1]]],
        neighbor_faces: [1, 2, 5, 6],
      },
      {
        id: 4,
        triangles: [
          { v: [[1, 1, 1], [1, 1, 0], [0, 1, 0]], nbr: [1, 0, 0] },
          { v: [[0, 1, 0], [0, 1, 1], [1, 1, 1]], nbr: [0, 1, 1] },
        ],
        loops: [[[1, 1, 0], [0, 1, 0], [0, 1, 1], [1, 1, 1]]],
        neighbor_faces: [1, 2, 5, 6],
      },
      {
        id: 5,
        triangles: [
          { v: [[0, 1, 1], [0, 1, 0], [0, 0, 0]], nbr: [1, 0, 0] },
          { v: [[0, 0, 0], [0, 0, 1], [0, 1, 1]], nbr: [0, 1, 1] },
        ],
        loops: [[[0, 1, 0], [0, 0, 0], [0, 0, 1], [0, 1, 1]]],
        neighbor_faces: [1, 2, 3, 4],
      },
      {
        id: 6,
        triangles: [
          { v: [[1, 0, 1], [1, 0, 0], [1, 1, 0]], nbr: [1, 0, 0] },
          { v: [[1, 1, 0], [1, 1, 1], [1, 0, 1]], nbr: [0, 1, 1] },
        ],
        loops: [[[1, 0, 0], [1, 1, 0], [1, 1, 1], [1, 0, 1]]],
        neighbor_faces: [1, 2, 3, 4],
      },
    ],
    labels: [],
  };
}

/** Copy of the cube with the listed faces translated by [dx, dy, dz]. */
export function translatedCube(
  faceIds: number[],
  delta: [number, number, number],
): MeshPayload {
  const mesh = cubeMesh();
  const targets = new Set(faceIds);
  for (const face of mesh.faces) {
    if (!targets.has(face.id)) continue;
    for (const tri of face.triangles) {
      tri.v = tri.v.map(
        (v) => [v[0] + delta[0], v[1] + delta[1], v[2] + delta[2]] as [number, number, number],
      );
    }
    face.loops = face.loops.map((loop) =>
      loop.map((v) => [v[0]! + delta[0], v[1]! + delta[1], v[2]! + delta[2]]),
    );
  }
  return mesh;
}

export function moveCommand(distanceMm: number): StructuredCommand {
  return {
    commands: [
      {
        feature: { type: "rect_through_slot" },
        operation: {
          type: "move",
          parameters: { axis: "X", sign: "+", distance_mm: distanceMm },
        },
      },
    ],
    verified: true,
  };
}
