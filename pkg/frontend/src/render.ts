/**
 * Turns a mesh plus camera into an ordered 2D draw list. Painter's
 * algorithm: triangles sorted far to near by view depth of their
 * centroid, so later entries overdraw earlier ones. Faces get a stable
 * per-id color; highlighted faces get a single override color and the
 * picked face an outline flag, which is how feature membership and the
 * seed face are shown.
 */

import { CameraPose, Vec3, projectPoint } from "./math.js";
import { MeshPayload } from "./types.js";

export interface DrawTriangle {
  faceId: number;
  /** Canvas pixel coordinates, y down. */
  points: [number, number][];
  depth: number;
  fill: string;
  outlined: boolean;
}

export const HIGHLIGHT_COLOR = "#f2a33c";

/** Stable face color: hue from the id, fixed saturation and lightness. */
export function faceColor(faceId: number): string {
  const hue = (faceId * 47) % 360;
  return `hsl(${hue}, 45%, 62%)`;
}

export interface RenderOptions {
  highlighted?: Iterable<number>;
  picked?: number | null;
}

export function buildDrawList(
  mesh: MeshPayload,
  pose: CameraPose,
  width: number,
  height: number,
  options: RenderOptions = {},
): DrawTriangle[] {
  const highlighted = new Set(options.highlighted ?? []);
  const picked = options.picked ?? null;
  const out: DrawTriangle[] = [];
  for (const face of mesh.faces) {
    for (const tri of face.triangles) {
      const points: [number, number][] = [];
      let depth = 0;
      let visible = true;
      for (const v of tri.v) {
        const proj = projectPoint(pose, v as Vec3);
        if (proj === null) {
          visible = false;
          break;
        }
        points.push([
          ((proj.x + 1) / 2) * width,
          ((1 - proj.y) / 2) * height,
        ]);
        depth += proj.depth / 3;
      }
      if (!visible) continue;
      out.push({
        faceId: face.id,
        points,
        depth,
        fill: highlighted.has(face.id) ? HIGHLIGHT_COLOR : faceColor(face.id),
        outlined: face.id === picked,
      });
    }
  }
  // far to near; ties broken by face id then insertion so output is stable
  out.sort((a, b) => b.depth - a.depth || a.faceId - b.faceId);
  return out;
}

/** Paint a draw list onto a 2D canvas context. */
export function paint(
  ctx: CanvasRenderingContext2D,
  list: DrawTriangle[],
  width: number,
  height: number,
): void {
  ctx.clearRect(0, 0, width, height);
  ctx.lineJoin = "round";
  for (const tri of list) {
    const [p0, p1, p2] = tri.points;
    if (!p0 || !p1 || !p2) continue;
    ctx.beginPath();
    ctx.moveTo(p0[0], p0[1]);
    ctx.lineTo(p1[0], p1[1]);
    ctx.lineTo(p2[0], p2[1]);
    ctx.closePath();
    ctx.fillStyle = tri.fill;
    ctx.fill();
    ctx.strokeStyle = tri.outlined ? "#222" : "rgba(0,0,0,0.25)";
    ctx.lineWidth = tri.outlined ? 2.5 : 1;
    ctx.stroke();
  }
}
