/** UI strings for the bilingual mode. Keyword labels come from the
 * service (translation table); these are only the chrome strings. */

import type { Lang } from "./types.js";

const STRINGS = {
  zh: {
    title: "纪念之路",
    choose_language: "请选择语言",
    enter: "进入",
    loading: "正在加载纪念碑……",
    empty_scene: "尚无纪念碑。运行数据管线后刷新。",
    scene_error: "场景数据无法读取",
    keywords: "关键词",
    lower_segment: "生前作品",
    upper_segment: "身后纪念",
    posts_for: "相关原帖",
    no_posts: "这个词还没有相关帖子",
    tribute_title: "写下你的悼词",
    tribute_placeholder: "写一个词，或一句话……",
    tribute_submit: "献上",
    tribute_approved: "已汇入纪念碑",
    tribute_rejected: "未能通过审核",
    tribute_retry: "提交失败，稍后重试",
    matches_title: "与你心意相近的缅怀",
    disperse: "消散",
    aggregate: "聚合",
  },
  en: {
    title: "Path of Remembrance",
    choose_language: "Choose your language",
    enter: "Enter",
    loading: "Loading monuments…",
    empty_scene: "No monuments yet. Run the data pipeline, then refresh.",
    scene_error: "The scene data could not be read",
    keywords: "Keywords",
    lower_segment: "Lifetime works",
    upper_segment: "Public remembrance",
    posts_for: "Original posts",
    no_posts: "No posts for this word yet",
    tribute_title: "Leave a tribute",
    tribute_placeholder: "A word, or a sentence…",
    tribute_submit: "Offer",
    tribute_approved: "Absorbed into the monument",
    tribute_rejected: "Not accepted by moderation",
    tribute_retry: "Submission failed, try again later",
    matches_title: "Others mourned in similar words",
    disperse: "Disperse",
    aggregate: "Gather",
  },
} as const;

export type StringKey = keyof (typeof STRINGS)["zh"];

export function t(lang: Lang, key: StringKey): string {
  return STRINGS[lang][key];
}
