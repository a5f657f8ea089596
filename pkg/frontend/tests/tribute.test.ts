import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api.js";
import { TributeDraft } from "../src/tribute.js";

function jsonResponse(payload: unknown, status = 200): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("tribute draft", () => {
  it("shows the rejection reason verbatim from the API", async () => {
    const fetchMock = vi.fn(async () =>
      jsonResponse({ status: "rejected", rejection_reason: "blocklist", matches: [] }),
    );
    vi.stubGlobal("fetch", fetchMock);
    const draft = new TributeDraft(new ApiClient(""), "jin-yong", "zh");
    draft.edit("加微信");
    const state = await draft.submit();
    expect(state).toEqual({ phase: "rejected", reason: "blocklist" });
    expect(draft.text).toBe("加微信"); // rejected drafts stay editable
  });

  it("returns matches on approval and clears the draft", async () => {
    const matches = [{ kind: "keyword", ref: "江湖", score: 1, display: "江湖" }];
    vi.stubGlobal("fetch", vi.fn(async () =>
      jsonResponse({ status: "approved", tribute_id: "t-000001", matches }),
    ));
    const draft = new TributeDraft(new ApiClient(""), "jin-yong", "zh");
    draft.edit("江湖");
    const state = await draft.submit();
    expect(state.phase).toBe("approved");
    if (state.phase === "approved") {
      expect(state.matches).toEqual(matches);
      expect(state.tributeId).toBe("t-000001");
    }
    expect(draft.text).toBe("");
  });

  it("keeps the draft and flags retriable on network failure", async () => {
    vi.stubGlobal("fetch", vi.fn(async () => {
      throw new TypeError("network down");
    }));
    const draft = new TributeDraft(new ApiClient(""), "jin-yong", "zh");
    draft.edit("一路走好");
    const state = await draft.submit();
    expect(state.phase).toBe("error");
    if (state.phase === "error") expect(state.retriable).toBe(true);
    expect(draft.text).toBe("一路走好");
  });

  it("maps 429 to a retriable error", async () => {
    vi.stubGlobal("fetch", vi.fn(async () =>
      jsonResponse({ error: "rate_limited", retriable: true }, 429),
    ));
    const draft = new TributeDraft(new ApiClient(""), "jin-yong", "zh");
    draft.edit("一路走好");
    const state = await draft.submit();
    expect(state.phase).toBe("error");
    if (state.phase === "error") expect(state.retriable).toBe(true);
  });

  it("does not touch the network until submitted", () => {
    const fetchMock = vi.fn();
    vi.stubGlobal("fetch", fetchMock);
    const draft = new TributeDraft(new ApiClient(""), "jin-yong", "zh");
    draft.edit("未提交的草稿");
    draft.edit("还在修改");
    expect(fetchMock).not.toHaveBeenCalled();
  });
});
