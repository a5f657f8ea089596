/** Tribute draft state machine.
 *
 * A draft never leaves the client until submit() is called. Rejection
 * reasons are surfaced verbatim from the API; network failures keep the
 * draft text so the visitor can retry.
 */

import { ApiClient, ApiError } from "./api.js";
import type { Lang, TributeMatch } from "./types.js";

export type TributeState =
  | { phase: "composing" }
  | { phase: "submitting" }
  | { phase: "approved"; tributeId: string | undefined; matches: TributeMatch[] }
  | { phase: "rejected"; reason: string }
  | { phase: "error"; retriable: boolean; message: string };

export class TributeDraft {
  text = "";
  state: TributeState = { phase: "composing" };

  constructor(
    private readonly api: ApiClient,
    readonly authorId: string,
    readonly lang: Lang,
  ) {}

  edit(text: string): void {
    this.text = text;
    if (this.state.phase !== "submitting") {
      this.state = { phase: "composing" };
    }
  }

  async submit(): Promise<TributeState> {
    if (this.state.phase === "submitting") return this.state;
    this.state = { phase: "submitting" };
    try {
      const response = await this.api.submitTribute(this.authorId, this.text, this.lang);
      if (response.status === "approved") {
        this.state = {
          phase: "approved",
          tributeId: response.tribute_id,
          matches: response.matches,
        };
        this.text = "";
      } else {
        // the reason string is shown to the visitor exactly as returned
        this.state = { phase: "rejected", reason: response.rejection_reason ?? "rejected" };
      }
    } catch (error) {
      const retriable = error instanceof ApiError ? error.retriable : true;
      this.state = {
        phase: "error",
        retriable,
        message: error instanceof Error ? error.message : String(error),
      };
      // draft text is preserved for retry
    }
    return this.state;
  }
}
