/** Wire types mirroring the monument service's published schemas. */

export interface Vec3 {
  x: number;
  y: number;
  z: number;
}

export interface ScenePoint {
  x: number;
  y: number;
  z: number;
  segment: "lower" | "upper";
  keyword: number | null;
  disperse: Vec3;
}

export interface KeywordEntry {
  term: string;
  weight: number;
  label_en?: string;
}

export interface KeywordSet {
  author_id: string;
  segment: "lower" | "upper";
  entries: KeywordEntry[];
}

export interface Monument {
  author_id: string;
  display_name: string;
  death_date: string;
  height_lower: number;
  height_upper: number;
  keywords_lower: KeywordSet;
  keywords_upper: KeywordSet;
  position: { x: number; z: number };
  points: ScenePoint[];
}

export interface Animation {
  disperse_amplitude: number;
  disperse_speed: number;
  pulsation_period: number;
}

export interface SceneDocument {
  format: string;
  seed: number;
  data_version: number;
  built_at: string;
  density: number;
  animation: Animation;
  geometry: { column_radius: number; column_sides: number; keyword_fraction: number };
  layout: { spacing: number; side_offset: number; order: string[] };
  monuments: Monument[];
}

export interface MonumentSummary {
  author_id: string;
  display_name: string;
  death_date: string;
  height_lower: number;
  height_upper: number;
  data_version: number;
}

export interface SceneFragment {
  format: string;
  seed: number;
  data_version: number;
  built_at: string;
  density: number;
  animation: Animation;
  geometry: SceneDocument["geometry"];
  monument: Monument;
}

export interface LabeledKeyword {
  term: string;
  weight: number;
  label: string;
  fallback: boolean;
}

export interface KeywordsResponse {
  author_id: string;
  lang: "zh" | "en";
  data_version: number;
  lower: LabeledKeyword[];
  upper: LabeledKeyword[];
}

export interface CuratedPost {
  post_id: string;
  author_id: string;
  text: string;
  created_at: string;
  score: number;
  keywords: string[];
}

export interface TributeMatch {
  kind: "keyword" | "post";
  ref: string;
  score: number;
  display: string;
}

export interface TributeResponse {
  status: "approved" | "rejected";
  tribute_id?: string;
  rejection_reason?: string;
  matches: TributeMatch[];
}

export type Lang = "zh" | "en";
export type DisplayMode = "static" | "dispersed";
