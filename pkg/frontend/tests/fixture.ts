import { readFileSync } from "node:fs";

import type { SceneDocument } from "../src/types.js";

export function loadFixture(): SceneDocument {
  const url = new URL("./fixtures/scene7.json", import.meta.url);
  return JSON.parse(readFileSync(url, "utf-8")) as SceneDocument;
}
