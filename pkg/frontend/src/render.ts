/** Corridor rendering: WebGL point sprites with a 2D-canvas fallback.
 *
 * The projection math is pure and shared by both paths (and by tests);
 * only the final rasterization differs. The fallback caps the number of
 * points it draws per frame to stay responsive on weak machines.
 */

import type { SceneView } from "./scene.js";

export interface Camera {
  /** distance travelled along the corridor (world z) */
  pathPosition: number;
  /** orbit angle around the corridor axis, radians */
  orbit: number;
  /** eye height */
  height: number;
}

export interface Viewport {
  width: number;
  height: number;
}

export interface ProjectedPoint {
  x: number;
  y: number;
  depth: number;
  size: number;
  alpha: number;
  upper: boolean;
  glyph: string | null;
}

const EYE_DISTANCE = 90;
const FOCAL = 420;
export const FALLBACK_POINT_CAP = 2000;

/** Perspective projection of one world point into viewport pixels. */
export function project(
  wx: number,
  wy: number,
  wz: number,
  camera: Camera,
  viewport: Viewport,
): { x: number; y: number; depth: number } | null {
  // camera sits beside the path, orbiting the corridor axis
  const dx = wx - Math.sin(camera.orbit) * EYE_DISTANCE;
  const dy = wy - camera.height;
  const dz = wz - camera.pathPosition + Math.cos(camera.orbit) * EYE_DISTANCE;
  if (dz <= 1) return null; // behind the eye
  return {
    x: viewport.width / 2 + (FOCAL * dx) / dz,
    y: viewport.height / 2 - (FOCAL * dy) / dz,
    depth: dz,
  };
}

/** Flatten the scene into a depth-sorted draw list for the current
 * camera; this is everything a rasterizer needs. */
export function buildDrawList(
  scene: SceneView,
  camera: Camera,
  viewport: Viewport,
  pulsation: number,
  cap: number = Infinity,
): ProjectedPoint[] {
  const out: ProjectedPoint[] = [];
  for (const monument of scene.monuments) {
    const positions = monument.positions();
    const points = monument.monument.points;
    const upperEntries = monument.monument.keywords_upper.entries;
    const lowerEntries = monument.monument.keywords_lower.entries;
    for (let i = 0; i < monument.pointCount; i++) {
      const projected = project(
        positions[3 * i]!,
        positions[3 * i + 1]!,
        positions[3 * i + 2]!,
        camera,
        viewport,
      );
      if (!projected) continue;
      const point = points[i]!;
      const entries = point.segment === "upper" ? upperEntries : lowerEntries;
      const glyph = point.keyword === null ? null : (entries[point.keyword]?.term ?? null);
      out.push({
        x: projected.x,
        y: projected.y,
        depth: projected.depth,
        size: Math.max(1, 140 / projected.depth),
        alpha: glyph === null ? 0.55 : pulsation,
        upper: point.segment === "upper",
        glyph,
      });
    }
  }
  out.sort((a, b) => b.depth - a.depth);
  if (out.length > cap) {
    // keep the nearest points; the far end of the corridor fades anyway
    return out.slice(out.length - cap);
  }
  return out;
}

export interface Renderer {
  kind: "webgl" | "canvas2d";
  draw(scene: SceneView, camera: Camera, nowSeconds: number): void;
}

const VERTEX_SHADER = `
attribute vec3 a_position;
attribute float a_upper;
uniform vec3 u_eye;
uniform float u_pathPosition;
uniform vec2 u_viewport;
varying float v_upper;
void main() {
  vec3 d = a_position - u_eye;
  d.z += ${EYE_DISTANCE.toFixed(1)};
  d.z -= u_pathPosition;
  float depth = max(d.z, 1.0);
  vec2 screen = vec2(${FOCAL.toFixed(1)} * d.x / depth, ${FOCAL.toFixed(1)} * d.y / depth);
  vec2 clip = screen / (u_viewport * 0.5);
  gl_Position = vec4(clip.x, clip.y, 0.0, 1.0);
  gl_PointSize = max(1.0, 140.0 / depth);
  v_upper = a_upper;
}
`;

const FRAGMENT_SHADER = `
precision mediump float;
uniform float u_pulse;
varying float v_upper;
void main() {
  vec3 lower = vec3(0.55, 0.58, 0.66);
  vec3 upper = vec3(0.72, 0.85, 0.83);
  gl_FragColor = vec4(mix(lower, upper, v_upper), u_pulse);
}
`;

class WebGLRenderer implements Renderer {
  readonly kind = "webgl";
  private program: WebGLProgram;
  private buffer: WebGLBuffer;
  private upperBuffer: WebGLBuffer;

  constructor(private gl: WebGLRenderingContext, private canvas: HTMLCanvasElement) {
    const compile = (type: number, source: string) => {
      const shader = gl.createShader(type)!;
      gl.shaderSource(shader, source);
      gl.compileShader(shader);
      if (!gl.getShaderParameter(shader, gl.COMPILE_STATUS)) {
        throw new Error(gl.getShaderInfoLog(shader) ?? "shader compile failed");
      }
      return shader;
    };
    const program = gl.createProgram()!;
    gl.attachShader(program, compile(gl.VERTEX_SHADER, VERTEX_SHADER));
    gl.attachShader(program, compile(gl.FRAGMENT_SHADER, FRAGMENT_SHADER));
    gl.linkProgram(program);
    if (!gl.getProgramParameter(program, gl.LINK_STATUS)) {
      throw new Error(gl.getProgramInfoLog(program) ?? "program link failed");
    }
    this.program = program;
    this.buffer = gl.createBuffer()!;
    this.upperBuffer = gl.createBuffer()!;
    gl.enable(gl.BLEND);
    gl.blendFunc(gl.SRC_ALPHA, gl.ONE_MINUS_SRC_ALPHA);
  }

  draw(scene: SceneView, camera: Camera, nowSeconds: number): void {
    const gl = this.gl;
    gl.viewport(0, 0, this.canvas.width, this.canvas.height);
    gl.clearColor(0.04, 0.045, 0.06, 1.0); // dim, solemn ambient
    gl.clear(gl.COLOR_BUFFER_BIT);
    gl.useProgram(this.program);

    let total = 0;
    for (const m of scene.monuments) total += m.pointCount;
    const positions = new Float32Array(total * 3);
    const upper = new Float32Array(total);
    let offset = 0;
    for (const monument of scene.monuments) {
      const world = monument.positions();
      positions.set(world, offset * 3);
      for (let i = 0; i < monument.pointCount; i++) {
        upper[offset + i] = monument.monument.points[i]!.segment === "upper" ? 1 : 0;
      }
      offset += monument.pointCount;
    }

    const positionLoc = gl.getAttribLocation(this.program, "a_position");
    gl.bindBuffer(gl.ARRAY_BUFFER, this.buffer);
    gl.bufferData(gl.ARRAY_BUFFER, positions, gl.DYNAMIC_DRAW);
    gl.enableVertexAttribArray(positionLoc);
    gl.vertexAttribPointer(positionLoc, 3, gl.FLOAT, false, 0, 0);

    const upperLoc = gl.getAttribLocation(this.program, "a_upper");
    gl.bindBuffer(gl.ARRAY_BUFFER, this.upperBuffer);
    gl.bufferData(gl.ARRAY_BUFFER, upper, gl.DYNAMIC_DRAW);
    gl.enableVertexAttribArray(upperLoc);
    gl.vertexAttribPointer(upperLoc, 1, gl.FLOAT, false, 0, 0);

    gl.uniform3f(
      gl.getUniformLocation(this.program, "u_eye"),
      Math.sin(camera.orbit) * EYE_DISTANCE,
      camera.height,
      Math.cos(camera.orbit) * EYE_DISTANCE,
    );
    gl.uniform1f(gl.getUniformLocation(this.program, "u_pathPosition"), camera.pathPosition);
    gl.uniform2f(
      gl.getUniformLocation(this.program, "u_viewport"),
      this.canvas.width,
      this.canvas.height,
    );
    gl.uniform1f(gl.getUniformLocation(this.program, "u_pulse"), scene.pulsation(nowSeconds));
    gl.drawArrays(gl.POINTS, 0, total);
  }
}

class Canvas2DRenderer implements Renderer {
  readonly kind = "canvas2d";

  constructor(private ctx: CanvasRenderingContext2D, private canvas: HTMLCanvasElement) {}

  draw(scene: SceneView, camera: Camera, nowSeconds: number): void {
    const ctx = this.ctx;
    const viewport = { width: this.canvas.width, height: this.canvas.height };
    ctx.fillStyle = "#0a0b0f";
    ctx.fillRect(0, 0, viewport.width, viewport.height);
    const list = buildDrawList(
      scene,
      camera,
      viewport,
      scene.pulsation(nowSeconds),
      FALLBACK_POINT_CAP,
    );
    for (const p of list) {
      if (p.glyph) {
        ctx.globalAlpha = p.alpha;
        ctx.fillStyle = p.upper ? "#b8d9d6" : "#9aa0b0";
        ctx.font = `${Math.max(8, p.size * 3)}px serif`;
        ctx.fillText(p.glyph, p.x, p.y);
      } else {
        ctx.globalAlpha = p.alpha;
        ctx.fillStyle = p.upper ? "#8db4b1" : "#70758a";
        ctx.fillRect(p.x, p.y, p.size, p.size);
      }
    }
    ctx.globalAlpha = 1;
  }
}

/** WebGL when available, otherwise the capped 2D projection. */
export function createRenderer(canvas: HTMLCanvasElement): Renderer {
  try {
    const gl = canvas.getContext("webgl");
    if (gl) return new WebGLRenderer(gl, canvas);
  } catch {
    // fall through to 2D
  }
  const ctx = canvas.getContext("2d");
  if (!ctx) throw new Error("neither WebGL nor 2D canvas is available");
  return new Canvas2DRenderer(ctx, canvas);
}
