/** DOM bootstrap: language gate, corridor canvas, panels, tribute form. */

import { ApiClient } from "./api.js";
import { ExplorerApp } from "./app.js";
import { t } from "./i18n.js";
import { createRenderer } from "./render.js";
import { TributeDraft } from "./tribute.js";
import type { Lang } from "./types.js";

const API_BASE = (window as { STELE_API_BASE?: string }).STELE_API_BASE ?? "";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function show(node: HTMLElement, visible: boolean): void {
  node.style.display = visible ? "" : "none";
}

async function start(lang: Lang): Promise<void> {
  const app = new ExplorerApp(new ApiClient(API_BASE));
  app.state.lang = lang;

  const gate = el<HTMLDivElement>("language-gate");
  const stage = el<HTMLDivElement>("stage");
  const status = el<HTMLDivElement>("status");
  const authorList = el<HTMLUListElement>("authors");
  const keywordPanel = el<HTMLDivElement>("keywords");
  const postsPanel = el<HTMLDivElement>("posts");
  const tributeForm = el<HTMLFormElement>("tribute-form");
  const tributeText = el<HTMLTextAreaElement>("tribute-text");
  const tributeStatus = el<HTMLDivElement>("tribute-status");
  const toggleButton = el<HTMLButtonElement>("toggle");
  const langButton = el<HTMLButtonElement>("lang-toggle");
  show(gate, false);
  show(stage, true);
  document.title = t(lang, "title");
  status.textContent = t(lang, "loading");

  const phase = await app.loadScene();
  if (phase.phase !== "ready") {
    status.textContent =
      phase.phase === "error"
        ? `${t(app.state.lang, "scene_error")}: ${phase.message}`
        : t(app.state.lang, "empty_scene");
    return;
  }
  status.textContent = "";
  const scene = phase.scene;

  const canvas = el<HTMLCanvasElement>("corridor");
  canvas.width = canvas.clientWidth || 960;
  canvas.height = canvas.clientHeight || 540;
  const renderer = createRenderer(canvas);

  let last = performance.now();
  const frame = (now: number) => {
    const dt = (now - last) / 1000;
    last = now;
    const animation = scene.document.animation;
    for (const monument of scene.monuments) {
      monument.step(dt, animation.disperse_speed, animation.disperse_amplitude);
    }
    renderer.draw(scene, app.state.camera, now / 1000);
    requestAnimationFrame(frame);
  };
  requestAnimationFrame(frame);

  // walk the corridor with the wheel, orbit with arrows
  canvas.addEventListener("wheel", (event) => {
    event.preventDefault();
    app.state.camera.pathPosition += event.deltaY * 0.1;
  });
  window.addEventListener("keydown", (event) => {
    if (event.key === "ArrowLeft") app.state.camera.orbit -= 0.05;
    if (event.key === "ArrowRight") app.state.camera.orbit += 0.05;
    if (event.key === "ArrowUp") app.state.camera.pathPosition += 4;
    if (event.key === "ArrowDown") app.state.camera.pathPosition -= 4;
  });

  const renderKeywords = async () => {
    const author = app.state.selectedAuthor;
    keywordPanel.innerHTML = "";
    if (!author) return;
    const response = await app.api.keywords(author, app.state.lang);
    for (const [segment, title] of [
      ["upper", t(app.state.lang, "upper_segment")],
      ["lower", t(app.state.lang, "lower_segment")],
    ] as const) {
      const heading = document.createElement("h3");
      heading.textContent = title;
      keywordPanel.appendChild(heading);
      const list = document.createElement("div");
      list.className = "keyword-list";
      for (const entry of response[segment].slice(0, 24)) {
        const chip = document.createElement("button");
        chip.type = "button";
        chip.className = "keyword-chip";
        chip.textContent = entry.label;
        chip.title = `${entry.term} (${entry.weight.toFixed(3)})`;
        chip.addEventListener("click", async () => {
          const posts = await app.drillDown(entry.term);
          postsPanel.innerHTML = `<h3>${t(app.state.lang, "posts_for")}: ${entry.label}</h3>`;
          if (posts.length === 0) {
            postsPanel.insertAdjacentHTML("beforeend", `<p>${t(app.state.lang, "no_posts")}</p>`);
            return;
          }
          for (const post of posts) {
            const item = document.createElement("blockquote");
            // post text keeps its source language regardless of UI language
            item.textContent = post.text;
            const meta = document.createElement("footer");
            meta.textContent = `${post.post_id} · ${post.created_at} · ♥${post.score}`;
            item.appendChild(meta);
            postsPanel.appendChild(item);
          }
        });
        list.appendChild(chip);
      }
      keywordPanel.appendChild(list);
    }
  };

  authorList.innerHTML = "";
  for (const summary of app.summaries) {
    const item = document.createElement("li");
    const button = document.createElement("button");
    button.type = "button";
    button.textContent = `${summary.display_name} (${summary.death_date.slice(0, 7)})`;
    button.addEventListener("click", async () => {
      await app.selectAuthor(summary.author_id);
      const monument = scene.byAuthor(summary.author_id);
      if (monument) {
        app.state.camera.pathPosition = monument.monument.position.z - 60;
      }
      postsPanel.innerHTML = "";
      tributeStatus.textContent = "";
      await renderKeywords();
    });
    item.appendChild(button);
    authorList.appendChild(item);
  }

  toggleButton.addEventListener("click", () => {
    const author = app.state.selectedAuthor ?? scene.order[0] ?? null;
    if (!author) return;
    const mode = app.toggleMonument(author);
    toggleButton.textContent = t(app.state.lang, mode === "dispersed" ? "aggregate" : "disperse");
  });
  toggleButton.textContent = t(lang, "disperse");

  langButton.textContent = lang === "zh" ? "EN" : "中文";
  langButton.addEventListener("click", async () => {
    const next: Lang = app.state.lang === "zh" ? "en" : "zh";
    await app.setLanguage(next);
    langButton.textContent = next === "zh" ? "EN" : "中文";
    document.title = t(next, "title");
    toggleButton.textContent = t(next, "disperse");
    await renderKeywords();
  });

  let draft: TributeDraft | null = null;
  tributeText.placeholder = t(lang, "tribute_placeholder");
  tributeForm.addEventListener("submit", async (event) => {
    event.preventDefault();
    if (!app.state.selectedAuthor) return;
    if (!draft || draft.state.phase === "approved") {
      draft = app.newTribute();
    }
    if (!draft) return;
    draft.edit(tributeText.value);
    const state = await draft.submit();
    if (state.phase === "approved") {
      tributeStatus.textContent = t(app.state.lang, "tribute_approved");
      tributeText.value = "";
      const monument = scene.byAuthor(draft.authorId);
      if (monument && monument.mode === "static") {
        // brief absorption gesture: disperse and re-gather
        monument.toggle();
        setTimeout(() => {
          if (monument.mode === "dispersed") monument.toggle();
        }, 1200);
      }
      if (state.matches.length > 0) {
        const lines = state.matches
          .map((m) => `${m.display} (${(m.score * 100).toFixed(0)}%)`)
          .join(" · ");
        tributeStatus.textContent += ` · ${t(app.state.lang, "matches_title")}: ${lines}`;
      }
      await renderKeywords(); // the new term is part of the upper set now
    } else if (state.phase === "rejected") {
      // verbatim reason from the service
      tributeStatus.textContent = `${t(app.state.lang, "tribute_rejected")}: ${state.reason}`;
    } else if (state.phase === "error") {
      tributeStatus.textContent = `${t(app.state.lang, "tribute_retry")} (${state.message})`;
    }
  });
}

function init(): void {
  const gate = el<HTMLDivElement>("language-gate");
  show(el<HTMLDivElement>("stage"), false);
  gate.querySelectorAll<HTMLButtonElement>("button[data-lang]").forEach((button) => {
    button.addEventListener("click", () => {
      void start((button.dataset.lang as Lang) ?? "zh");
    });
  });
}

init();
