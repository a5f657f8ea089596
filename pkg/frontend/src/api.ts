/** Thin fetch client for the monument service. All persistent state
 * lives behind this API; the explorer itself is a pure client. */

import type {
  CuratedPost,
  KeywordsResponse,
  Lang,
  MonumentSummary,
  SceneFragment,
  TributeResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
    readonly retriable: boolean,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  let response: Response;
  try {
    response = await fetch(url, init);
  } catch (cause) {
    // network failures are always worth retrying
    throw new ApiError(`network error: ${String(cause)}`, 0, true);
  }
  if (!response.ok) {
    const retriable = response.status === 429 || response.status === 503;
    let detail = response.statusText;
    try {
      const body = (await response.json()) as { error?: string };
      if (body.error) detail = body.error;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(`${response.status} ${detail}`, response.status, retriable);
  }
  return (await response.json()) as T;
}

export class ApiClient {
  private inflight = new Map<string, Promise<unknown>>();

  constructor(readonly baseUrl: string = "") {}

  /** GETs are de-duplicated per URL while a request is in flight. */
  private get<T>(path: string): Promise<T> {
    const url = `${this.baseUrl}${path}`;
    const pending = this.inflight.get(url);
    if (pending) return pending as Promise<T>;
    const promise = request<T>(url).finally(() => this.inflight.delete(url));
    this.inflight.set(url, promise);
    return promise;
  }

  async monuments(): Promise<MonumentSummary[]> {
    const payload = await this.get<{ monuments: MonumentSummary[] }>("/api/monuments");
    return payload.monuments;
  }

  monumentScene(authorId: string): Promise<SceneFragment> {
    return this.get<SceneFragment>(`/api/monuments/${encodeURIComponent(authorId)}/scene`);
  }

  keywords(authorId: string, lang: Lang): Promise<KeywordsResponse> {
    return this.get<KeywordsResponse>(
      `/api/keywords/${encodeURIComponent(authorId)}?lang=${lang}`,
    );
  }

  async posts(authorId: string, keyword: string): Promise<CuratedPost[]> {
    const payload = await this.get<{ posts: CuratedPost[] }>(
      `/api/posts?author_id=${encodeURIComponent(authorId)}&keyword=${encodeURIComponent(keyword)}`,
    );
    return payload.posts;
  }

  submitTribute(authorId: string, text: string, lang: Lang): Promise<TributeResponse> {
    return request<TributeResponse>(`${this.baseUrl}/api/tributes`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ author_id: authorId, text, lang }),
    });
  }
}
