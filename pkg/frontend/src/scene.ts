/** Scene state: corridor assembly, aggregate/disperse interpolation.
 *
 * Static point positions are data from the scene document and are never
 * mutated; the dispersed state adds each point's displacement vector
 * scaled by an interpolation factor. Re-aggregating drives the factor
 * back to exactly 0, so the static positions are restored bit for bit.
 */

import type { DisplayMode, Monument, SceneDocument } from "./types.js";

export class SceneValidationError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SceneValidationError";
  }
}

export const SCENE_FORMAT = "monument-scene/1";

export function validateScene(data: unknown): SceneDocument {
  const doc = data as SceneDocument;
  if (!doc || typeof doc !== "object" || doc.format !== SCENE_FORMAT) {
    throw new SceneValidationError(`unsupported scene format: ${String((doc as { format?: unknown })?.format)}`);
  }
  if (!Array.isArray(doc.monuments) || !doc.animation || !doc.layout) {
    throw new SceneValidationError("scene document is missing monuments, animation or layout");
  }
  for (const monument of doc.monuments) {
    if (!Array.isArray(monument.points) || !monument.position) {
      throw new SceneValidationError(`monument ${monument.author_id} has no point data`);
    }
  }
  return doc;
}

export interface WorldPoint {
  x: number;
  y: number;
  z: number;
  segment: "lower" | "upper";
  keyword: number | null;
}

export class MonumentView {
  readonly basePositions: Float64Array; // world coordinates, never mutated
  readonly disperseVectors: Float64Array;
  readonly pointCount: number;
  mode: DisplayMode = "static";
  /** 0 = fully aggregated, 1 = fully dispersed */
  t = 0;

  constructor(readonly monument: Monument) {
    this.pointCount = monument.points.length;
    this.basePositions = new Float64Array(this.pointCount * 3);
    this.disperseVectors = new Float64Array(this.pointCount * 3);
    monument.points.forEach((p, i) => {
      this.basePositions[3 * i] = monument.position.x + p.x;
      this.basePositions[3 * i + 1] = p.y;
      this.basePositions[3 * i + 2] = monument.position.z + p.z;
      this.disperseVectors[3 * i] = p.disperse.x;
      this.disperseVectors[3 * i + 1] = p.disperse.y;
      this.disperseVectors[3 * i + 2] = p.disperse.z;
    });
  }

  toggle(): DisplayMode {
    this.mode = this.mode === "static" ? "dispersed" : "static";
    return this.mode;
  }

  /** Advance the interpolation toward the current mode's endpoint and
   * clamp exactly onto it, so a completed re-aggregation is exact. */
  step(dtSeconds: number, disperseSpeed: number, amplitude: number): void {
    if (amplitude <= 0) {
      this.t = this.mode === "dispersed" ? 1 : 0;
      return;
    }
    const rate = disperseSpeed / amplitude; // full transition in amplitude/speed seconds
    const delta = rate * dtSeconds;
    if (this.mode === "dispersed") {
      this.t = Math.min(1, this.t + delta);
    } else {
      this.t = Math.max(0, this.t - delta);
    }
  }

  /** Current world positions. At t=0 this returns the static positions
   * unchanged (the exact same numbers the scene document carries). */
  positions(): Float64Array {
    if (this.t === 0) return this.basePositions.slice();
    const out = new Float64Array(this.basePositions.length);
    for (let i = 0; i < out.length; i++) {
      out[i] = this.basePositions[i]! + this.t * this.disperseVectors[i]!;
    }
    return out;
  }
}

export class SceneView {
  readonly monuments: MonumentView[];

  constructor(readonly document: SceneDocument) {
    // the layout order is death-date order; trust but verify
    this.monuments = document.monuments.map((m) => new MonumentView(m));
    const order = this.monuments.map((m) => m.monument.author_id);
    const expected = [...document.layout.order];
    if (expected.length && JSON.stringify(order) !== JSON.stringify(expected)) {
      throw new SceneValidationError("monument order disagrees with the layout order");
    }
  }

  get order(): string[] {
    return this.monuments.map((m) => m.monument.author_id);
  }

  get deathDates(): string[] {
    return this.monuments.map((m) => m.monument.death_date);
  }

  byAuthor(authorId: string): MonumentView | undefined {
    return this.monuments.find((m) => m.monument.author_id === authorId);
  }

  /** Opacity multiplier for the pulsating glyphs. */
  pulsation(nowSeconds: number): number {
    const period = this.document.animation.pulsation_period;
    if (period <= 0) return 1;
    return 0.75 + 0.25 * Math.sin((2 * Math.PI * nowSeconds) / period);
  }
}

/** Assemble a full scene document from per-monument fragments (the
 * summaries fix the corridor order). */
export function assembleScene(
  fragments: { fragment: import("./types.js").SceneFragment }[],
): SceneDocument {
  if (fragments.length === 0) {
    throw new SceneValidationError("no monuments to assemble");
  }
  const first = fragments[0]!.fragment;
  const monuments: Monument[] = fragments.map((f) => f.fragment.monument);
  return validateScene({
    format: first.format,
    seed: first.seed,
    data_version: first.data_version,
    built_at: first.built_at,
    density: first.density,
    animation: first.animation,
    geometry: first.geometry,
    layout: {
      spacing: 0,
      side_offset: 0,
      order: monuments.map((m) => m.author_id),
    },
    monuments,
  });
}
