import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api.js";
import { ExplorerApp } from "../src/app.js";
import { loadFixture } from "./fixture.js";
import type { SceneDocument } from "../src/types.js";

function jsonResponse(payload: unknown, status = 200): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

/** fetch stub backed by the scene fixture, mimicking the service. */
function fixtureFetch(doc: SceneDocument) {
  return vi.fn(async (input: RequestInfo | URL) => {
    const url = String(input);
    if (url.endsWith("/api/monuments")) {
      return jsonResponse({
        data_version: doc.data_version,
        monuments: doc.monuments.map((m) => ({
          author_id: m.author_id,
          display_name: m.display_name,
          death_date: m.death_date,
          height_lower: m.height_lower,
          height_upper: m.height_upper,
          data_version: doc.data_version,
        })),
      });
    }
    const fragment = url.match(/\/api\/monuments\/([^/]+)\/scene$/);
    if (fragment) {
      const monument = doc.monuments.find((m) => m.author_id === decodeURIComponent(fragment[1]!));
      if (!monument) return jsonResponse({ error: "unknown_author" }, 404);
      return jsonResponse({
        format: doc.format,
        seed: doc.seed,
        data_version: doc.data_version,
        built_at: doc.built_at,
        density: doc.density,
        animation: doc.animation,
        geometry: doc.geometry,
        monument,
      });
    }
    const keywords = url.match(/\/api\/keywords\/([^/?]+)\?lang=(zh|en)$/);
    if (keywords) {
      const monument = doc.monuments.find((m) => m.author_id === decodeURIComponent(keywords[1]!));
      if (!monument) return jsonResponse({ error: "unknown_author" }, 404);
      const lang = keywords[2] as "zh" | "en";
      const present = (entries: typeof monument.keywords_upper.entries) =>
        entries.map((e) => ({
          term: e.term,
          weight: e.weight,
          label: lang === "en" ? (e.label_en ?? e.term) : e.term,
          fallback: lang === "en" && !e.label_en,
        }));
      return jsonResponse({
        author_id: monument.author_id,
        lang,
        data_version: doc.data_version,
        lower: present(monument.keywords_lower.entries),
        upper: present(monument.keywords_upper.entries),
      });
    }
    if (url.includes("/api/posts")) {
      return jsonResponse({ posts: [] });
    }
    return jsonResponse({ error: "not_found" }, 404);
  });
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("explorer app", () => {
  it("loads the corridor from summaries plus fragments", async () => {
    const fetchMock = fixtureFetch(loadFixture());
    vi.stubGlobal("fetch", fetchMock);
    const app = new ExplorerApp(new ApiClient(""));
    const phase = await app.loadScene();
    expect(phase.phase).toBe("ready");
    expect(app.scene?.order).toHaveLength(7);
    expect(app.scene?.order[0]).toBe("yang-jiang");
  });

  it("language toggle refetches labels but never scene geometry", async () => {
    const fetchMock = fixtureFetch(loadFixture());
    vi.stubGlobal("fetch", fetchMock);
    const app = new ExplorerApp(new ApiClient(""));
    await app.loadScene();
    await app.selectAuthor("jin-yong");
    const geometryBefore = app.scene;
    const positionsBefore = Array.from(app.scene!.monuments[0]!.basePositions);
    const sceneCallsBefore = fetchMock.mock.calls.filter(([u]) => String(u).includes("/scene")).length;

    await app.setLanguage("en");

    const sceneCallsAfter = fetchMock.mock.calls.filter(([u]) => String(u).includes("/scene")).length;
    expect(sceneCallsAfter).toBe(sceneCallsBefore); // no geometry refetch
    expect(app.scene).toBe(geometryBefore); // same objects, not rebuilt
    expect(Array.from(app.scene!.monuments[0]!.basePositions)).toEqual(positionsBefore);
    const keywordCalls = fetchMock.mock.calls.filter(([u]) => String(u).includes("/api/keywords"));
    expect(keywordCalls.some(([u]) => String(u).endsWith("lang=en"))).toBe(true);
  });

  it("reports an empty corridor distinctly from an error", async () => {
    vi.stubGlobal("fetch", vi.fn(async () => jsonResponse({ data_version: 0, monuments: [] })));
    const app = new ExplorerApp(new ApiClient(""));
    const phase = await app.loadScene();
    expect(phase.phase).toBe("empty");
  });

  it("surfaces schema mismatches as a visible error state", async () => {
    vi.stubGlobal("fetch", vi.fn(async (input: RequestInfo | URL) => {
      const url = String(input);
      if (url.endsWith("/api/monuments")) {
        return jsonResponse({
          data_version: 1,
          monuments: [{ author_id: "x", display_name: "X", death_date: "2020-01-01",
                        height_lower: 1, height_upper: 1, data_version: 1 }],
        });
      }
      return jsonResponse({ format: "wrong/0", monument: {} });
    }));
    const app = new ExplorerApp(new ApiClient(""));
    const phase = await app.loadScene();
    expect(phase.phase).toBe("error");
    if (phase.phase === "error") expect(phase.message).toContain("format");
  });

  it("surfaces transport failures as a visible error state", async () => {
    vi.stubGlobal("fetch", vi.fn(async () => jsonResponse({ error: "no_scene" }, 503)));
    const app = new ExplorerApp(new ApiClient(""));
    const phase = await app.loadScene();
    expect(phase.phase).toBe("error");
    if (phase.phase === "error") expect(phase.message).toContain("503");
  });

  it("drill-down queries the posts endpoint for the active author", async () => {
    const fetchMock = fixtureFetch(loadFixture());
    vi.stubGlobal("fetch", fetchMock);
    const app = new ExplorerApp(new ApiClient(""));
    await app.loadScene();
    await app.selectAuthor("qiong-yao");
    await app.drillDown("翩然");
    const postCalls = fetchMock.mock.calls.map(([u]) => String(u)).filter((u) => u.includes("/api/posts"));
    expect(postCalls).toHaveLength(1);
    expect(postCalls[0]).toContain("author_id=qiong-yao");
    expect(postCalls[0]).toContain(encodeURIComponent("翩然"));
    expect(app.state.activeKeyword).toBe("翩然");
  });
});
