/** Explorer controller: everything main.ts wires to the DOM.
 *
 * View state is ephemeral by design: reloading the page loses only
 * the camera, language and selection, never data. Language switches
 * refetch keyword labels but leave the loaded scene geometry untouched.
 */

import { ApiClient, ApiError } from "./api.js";
import { SceneValidationError, SceneView, assembleScene, validateScene } from "./scene.js";
import { TributeDraft } from "./tribute.js";
import type {
  CuratedPost,
  KeywordsResponse,
  Lang,
  MonumentSummary,
  SceneFragment,
} from "./types.js";

export interface ViewState {
  lang: Lang;
  selectedAuthor: string | null;
  activeKeyword: string | null;
  camera: { pathPosition: number; orbit: number; height: number };
}

export type ScenePhase =
  | { phase: "loading" }
  | { phase: "empty" }
  | { phase: "ready"; scene: SceneView }
  | { phase: "error"; message: string };

export class ExplorerApp {
  state: ViewState = {
    lang: "zh",
    selectedAuthor: null,
    activeKeyword: null,
    camera: { pathPosition: -40, orbit: 0, height: 40 },
  };
  scenePhase: ScenePhase = { phase: "loading" };
  summaries: MonumentSummary[] = [];
  keywordsByAuthor = new Map<string, KeywordsResponse>();
  posts: CuratedPost[] | null = null;

  constructor(readonly api: ApiClient) {}

  get scene(): SceneView | null {
    return this.scenePhase.phase === "ready" ? this.scenePhase.scene : null;
  }

  /** Fetch summaries and every monument fragment, assemble the corridor. */
  async loadScene(): Promise<ScenePhase> {
    this.scenePhase = { phase: "loading" };
    try {
      this.summaries = await this.api.monuments();
      if (this.summaries.length === 0) {
        this.scenePhase = { phase: "empty" };
        return this.scenePhase;
      }
      const fragments: { fragment: SceneFragment }[] = [];
      for (const summary of this.summaries) {
        fragments.push({ fragment: await this.api.monumentScene(summary.author_id) });
      }
      const document = assembleScene(fragments);
      this.scenePhase = { phase: "ready", scene: new SceneView(validateScene(document)) };
    } catch (error) {
      // a schema mismatch or transport failure must surface, not blank out
      const message =
        error instanceof SceneValidationError || error instanceof ApiError
          ? error.message
          : String(error);
      this.scenePhase = { phase: "error", message };
    }
    return this.scenePhase;
  }

  async selectAuthor(authorId: string): Promise<KeywordsResponse | null> {
    this.state.selectedAuthor = authorId;
    this.state.activeKeyword = null;
    this.posts = null;
    return this.keywordsFor(authorId);
  }

  private async keywordsFor(authorId: string): Promise<KeywordsResponse | null> {
    const cacheKey = `${authorId}:${this.state.lang}`;
    const cached = this.keywordsByAuthor.get(cacheKey);
    if (cached) return cached;
    try {
      const response = await this.api.keywords(authorId, this.state.lang);
      this.keywordsByAuthor.set(cacheKey, response);
      return response;
    } catch {
      return null;
    }
  }

  /** Keyword drill-down: fetch the curated original posts. */
  async drillDown(keyword: string): Promise<CuratedPost[]> {
    if (!this.state.selectedAuthor) return [];
    this.state.activeKeyword = keyword;
    this.posts = await this.api.posts(this.state.selectedAuthor, keyword);
    return this.posts;
  }

  /** Swap labels only; scene geometry is not refetched or rebuilt. */
  async setLanguage(lang: Lang): Promise<void> {
    if (lang === this.state.lang) return;
    this.state.lang = lang;
    if (this.state.selectedAuthor) {
      await this.keywordsFor(this.state.selectedAuthor);
    }
  }

  toggleMonument(authorId: string): "static" | "dispersed" | null {
    const monument = this.scene?.byAuthor(authorId);
    return monument ? monument.toggle() : null;
  }

  newTribute(): TributeDraft | null {
    if (!this.state.selectedAuthor) return null;
    return new TributeDraft(this.api, this.state.selectedAuthor, this.state.lang);
  }
}
