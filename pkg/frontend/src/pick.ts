/**
 * Face picking: cast a ray from the camera through a screen point and
 * return the owning face of the nearest intersected triangle.
 */

import { CameraPose, Ray, Vec3, intersectTriangle, rayFromNdc } from "./math.js";
import { MeshPayload } from "./types.js";

export interface PickHit {
  faceId: number;
  /** Ray parameter of the hit; dir is unit length so this is distance. */
  distance: number;
  point: Vec3;
}

/**
 * Nearest hit wins; ties (a ray down a shared edge between faces) break
 * toward the lower face id so repeated picks are deterministic.
 */
export function pickRay(mesh: MeshPayload, ray: Ray): PickHit | null {
  let best: PickHit | null = null;
  for (const face of mesh.faces) {
    for (const tri of face.triangles) {
      const [a, b, c] = tri.v;
      if (!a || !b || !c) continue;
      const t = intersectTriangle(ray, a as Vec3, b as Vec3, c as Vec3);
      if (t === null) continue;
      if (
        best === null ||
        t < best.distance - 1e-12 ||
        (Math.abs(t - best.distance) <= 1e-12 && face.id < best.faceId)
      ) {
        best = {
          faceId: face.id,
          distance: t,
          point: [
            ray.origin[0] + ray.dir[0] * t,
            ray.origin[1] + ray.dir[1] * t,
            ray.origin[2] + ray.dir[2] * t,
          ],
        };
      }
    }
  }
  return best;
}

/** Pick through a normalized-device-coordinate screen point. */
export function pickFace(
  mesh: MeshPayload,
  pose: CameraPose,
  ndcX: number,
  ndcY: number,
): PickHit | null {
  return pickRay(mesh, rayFromNdc(pose, ndcX, ndcY));
}

/** Convert canvas pixel coordinates to NDC (y flipped: pixel y grows down). */
export function pixelToNdc(
  px: number,
  py: number,
  width: number,
  height: number,
): [number, number] {
  return [(px / width) * 2 - 1, -((py / height) * 2 - 1)];
}
