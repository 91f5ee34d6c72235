/**
 * Minimal 3D math for the viewer: vectors, a perspective camera, ray
 * construction from normalized device coordinates, and ray-triangle
 * intersection. No rendering library; everything is plain numbers so the
 * test suite can check picks analytically.
 */

export type Vec3 = [number, number, number];

export function sub(a: Vec3, b: Vec3): Vec3 {
  return [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
}

export function add(a: Vec3, b: Vec3): Vec3 {
  return [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
}

export function scale(a: Vec3, s: number): Vec3 {
  return [a[0] * s, a[1] * s, a[2] * s];
}

export function dot(a: Vec3, b: Vec3): number {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

export function cross(a: Vec3, b: Vec3): Vec3 {
  return [
    a[1] * b[2] - a[2] * b[1],
    a[2] * b[0] - a[0] * b[2],
    a[0] * b[1] - a[1] * b[0],
  ];
}

export function length(a: Vec3): number {
  return Math.hypot(a[0], a[1], a[2]);
}

export function normalize(a: Vec3): Vec3 {
  const n = length(a);
  if (n === 0) throw new Error("cannot normalize zero vector");
  return [a[0] / n, a[1] / n, a[2] / n];
}

/** Look-at perspective camera; fov is the vertical opening angle. */
export interface CameraPose {
  eye: Vec3;
  target: Vec3;
  up: Vec3;
  fovYDeg: number;
  aspect: number;
}

export interface Ray {
  origin: Vec3;
  dir: Vec3;
}

interface Basis {
  forward: Vec3;
  right: Vec3;
  up: Vec3;
}

export function cameraBasis(pose: CameraPose): Basis {
  const forward = normalize(sub(pose.target, pose.eye));
  const right = normalize(cross(forward, pose.up));
  const up = cross(right, forward);
  return { forward, right, up };
}

/**
 * Ray through a point in normalized device coordinates: x right, y up,
 * both in [-1, 1], (0, 0) at the view center.
 */
export function rayFromNdc(pose: CameraPose, ndcX: number, ndcY: number): Ray {
  const { forward, right, up } = cameraBasis(pose);
  const halfH = Math.tan((pose.fovYDeg * Math.PI) / 360);
  const halfW = halfH * pose.aspect;
  const dir = normalize(
    add(forward, add(scale(right, ndcX * halfW), scale(up, ndcY * halfH))),
  );
  return { origin: pose.eye, dir };
}

/** Perspective projection of a world point into NDC plus view depth. */
export function projectPoint(
  pose: CameraPose,
  p: Vec3,
): { x: number; y: number; depth: number } | null {
  const { forward, right, up } = cameraBasis(pose);
  const rel = sub(p, pose.eye);
  const depth = dot(rel, forward);
  if (depth <= 1e-9) return null; // behind or at the eye plane
  const halfH = Math.tan((pose.fovYDeg * Math.PI) / 360);
  const halfW = halfH * pose.aspect;
  return {
    x: dot(rel, right) / (depth * halfW),
    y: dot(rel, up) / (depth * halfH),
    depth,
  };
}

const EDGE_EPS = 1e-12;

/**
 * Moller-Trumbore ray-triangle intersection. Returns the ray parameter t
 * (distance in units of |dir|) or null. Edge and vertex hits count as
 * hits so rays through shared edges cannot fall between triangles.
 */
export function intersectTriangle(
  ray: Ray,
  a: Vec3,
  b: Vec3,
  c: Vec3,
): number | null {
  const e1 = sub(b, a);
  const e2 = sub(c, a);
  const p = cross(ray.dir, e2);
  const det = dot(e1, p);
  if (Math.abs(det) < EDGE_EPS) return null; // parallel or degenerate
  const inv = 1 / det;
  const s = sub(ray.origin, a);
  const u = dot(s, p) * inv;
  if (u < -EDGE_EPS || u > 1 + EDGE_EPS) return null;
  const q = cross(s, e1);
  const v = dot(ray.dir, q) * inv;
  if (v < -EDGE_EPS || u + v > 1 + EDGE_EPS) return null;
  const t = dot(e2, q) * inv;
  return t > EDGE_EPS ? t : null;
}
