#!/usr/bin/env python3
"""Regenerate the synthetic sample corpus under data/.

Everything except the campaign-level metrics in authors.csv is
synthetic: post texts are assembled from small phrase pools, engagement
counts are drawn from seeded heavy-tailed distributions, and the
publication counts are invented placeholders the operator should
replace for a real deployment. Death dates carry month precision only.

Run from the repository root:

    python3 tools/make_corpus.py
"""

from __future__ import annotations

import json
from datetime import datetime, timedelta, timezone
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "data"
SEED = 8400

# campaign-level metrics (reading/discussion/interaction/originality in
# ten-thousands) with month-precision death dates; publication counts
# are synthetic placeholders
AUTHORS = [
    # author_id, display_name, death_date, pubs, reading, discussion, interaction, originality
    ("qiong-yao",   "Qiong Yao",   "2024-12-01", 64, 86000,  35.5,   193.8,  6.7),
    ("qi-bangyuan", "Qi Bangyuan", "2024-03-01", 12, 16000,  2.1,    7.1,    0.2414),
    ("yang-yi",     "Yang Yi",     "2023-01-01", 24, 3786.4, 0.8175, 6.2,    0.0483),
    ("hu-xudong",   "Hu Xudong",   "2021-08-01", 9,  1453.2, 0.2873, 0.3426, 0.0194),
    ("jin-yong",    "Jin Yong",    "2018-10-01", 15, 210000, 140.7,  167.6,  15),
    ("huang-yi",    "Huang Yi",    "2017-04-01", 88, 1510.3, 0.8072, 0.9615, 0.0816),
    ("yang-jiang",  "Yang Jiang",  "2016-05-01", 30, 14000,  14.9,   20.5,   3.9),
]

SHARED_PHRASES = [
    "一路走好", "先生千古", "愿您安息", "天堂再无病痛", "感谢您的文字",
    "经典永流传", "泪目了", "万分不舍", "再见了", "谢谢你陪伴我的青春",
    "文字不朽", "永远怀念", "夜读旧作", "合上书页", "童年回忆", "点一盏灯",
]

SIGNATURE = {
    "qiong-yao":   ["翩然", "言情", "月光", "庭院", "深情", "烟雨"],
    "qi-bangyuan": ["回忆", "岁月", "大河", "故土", "师者", "讲台"],
    "yang-yi":     ["译笔", "文心", "长夜", "灯下", "原野", "书房"],
    "hu-xudong":   ["诗歌", "诗人", "热情", "课堂", "远方", "口哨"],
    "jin-yong":    ["江湖", "大侠", "武侠", "恩怨", "刀光", "侠义"],
    "huang-yi":    ["穿越", "玄幻", "时空", "奇想", "烽火", "棋局"],
    "yang-jiang":  ["先生", "学者", "淡泊", "从容", "百年", "书香"],
}

WORKS_ONLY = {
    "qiong-yao":   ["晚风", "心事", "花影"],
    "qi-bangyuan": ["渡口", "行旅", "家书"],
    "yang-yi":     ["风声", "星霜", "彼岸"],
    "hu-xudong":   ["山径", "雨季", "信札"],
    "jin-yong":    ["剑影", "孤城", "风雪"],
    "huang-yi":    ["星尘", "迷宫", "龙城"],
    "yang-jiang":  ["灯影", "旧宅", "杂忆"],
}

SPAM = [
    "代购正品直邮，点击链接下单",
    "互关互粉走一波，秒回",
    "加微信领取限量福利",
    "低价代购，假一赔十，点击链接",
]

TRANSLATIONS = {
    "一路走好": "rest well on the road ahead",
    "先生千古": "may the master live on",
    "愿您安息": "rest in peace",
    "天堂再无病痛": "no more pain in heaven",
    "感谢您的文字": "thank you for your words",
    "经典永流传": "the classics endure",
    "泪目了": "moved to tears",
    "万分不舍": "so hard to let go",
    "再见了": "goodbye",
    "谢谢你陪伴我的青春": "thank you for my youth",
    "文字不朽": "words are immortal",
    "永远怀念": "remembered forever",
    "夜读旧作": "rereading old works at night",
    "合上书页": "closing the book",
    "童年回忆": "childhood memories",
    "点一盏灯": "lighting a lamp",
    "翩然": "gracefully",
    "言情": "romance",
    "月光": "moonlight",
    "庭院": "courtyard",
    "深情": "deep affection",
    "烟雨": "misty rain",
    "回忆": "memories",
    "岁月": "years",
    "大河": "great river",
    "故土": "homeland",
    "师者": "teacher",
    "讲台": "lectern",
    "译笔": "translator's pen",
    "文心": "literary heart",
    "长夜": "long night",
    "灯下": "under the lamp",
    "原野": "open fields",
    "书房": "study room",
    "诗歌": "poetry",
    "诗人": "poet",
    "热情": "passion",
    "课堂": "classroom",
    "远方": "far away",
    "口哨": "whistle",
    "江湖": "rivers and lakes",
    "大侠": "great hero",
    "武侠": "martial heroes",
    "恩怨": "grudges and debts",
    "刀光": "flash of blades",
    "侠义": "chivalry",
    "穿越": "time travel",
    "玄幻": "fantasy",
    "时空": "spacetime",
    "奇想": "wild ideas",
    "烽火": "beacon fires",
    "棋局": "the chessboard",
    "先生": "the master",
    "学者": "scholar",
    "淡泊": "quiet detachment",
    "从容": "composure",
    "百年": "a century",
    "书香": "scent of books",
}


def make_posts(rng: np.random.Generator, author_id: str, death: datetime, scale: float) -> list[dict]:
    n = int(190 + rng.integers(0, 21))
    shared = list(rng.choice(SHARED_PHRASES, size=10, replace=False))
    signature = SIGNATURE[author_id]
    posts = []
    for i in range(n):
        offset_days = float(min(rng.exponential(25.0), 89.5))
        created = death + timedelta(days=offset_days, seconds=int(rng.integers(0, 86400)))
        roll = rng.random()
        if roll < 0.04:
            text = str(rng.choice(SPAM))
        elif roll < 0.06:
            text = ""  # dropped by the non-textual rule
        elif roll < 0.08:
            text = "好"  # dropped by the min-length rule
        else:
            parts = list(rng.choice(shared, size=int(rng.integers(1, 3)), replace=False))
            if rng.random() < 0.75:
                parts.extend(rng.choice(signature, size=int(rng.integers(1, 3)), replace=False))
            rng.shuffle(parts)
            text = "，".join(parts) + "。"
        decay = float(np.exp(-offset_days / 30.0))
        mean = np.log(scale * decay + 1.5)
        reposts = int(rng.lognormal(mean, 1.1))
        comments = int(rng.lognormal(mean - 0.5, 1.0))
        likes = int(rng.lognormal(mean + 0.7, 1.2))
        posts.append({
            "id": f"{author_id}-{i:04d}",
            "author_tag": author_id,
            "text": text,
            "created_at": created.strftime("%Y-%m-%dT%H:%M:%SZ"),
            "reposts": reposts,
            "comments": comments,
            "likes": likes,
            "is_original": bool(rng.random() < 0.72),
        })
    posts.sort(key=lambda p: (p["created_at"], p["id"]))
    return posts


def make_works(rng: np.random.Generator, author_id: str) -> str:
    vocab = SIGNATURE[author_id] + WORKS_ONLY[author_id]
    lines = []
    for _ in range(int(rng.integers(18, 28))):
        words = rng.choice(vocab, size=int(rng.integers(1, 3)), replace=False)
        lines.append("《" + "".join(words) + "》")
    return "\n".join(lines) + "\n"


def main() -> None:
    rng = np.random.default_rng(SEED)
    (DATA / "posts").mkdir(parents=True, exist_ok=True)
    (DATA / "works").mkdir(parents=True, exist_ok=True)

    with (DATA / "authors.csv").open("w", encoding="utf-8") as fh:
        fh.write("author_id,display_name,death_date,publication_count,"
                 "reading_volume,discussion_volume,interaction_volume,originality_volume\n")
        for author_id, name, death, pubs, r, d, i, o in AUTHORS:
            fh.write(f"{author_id},{name},{death},{pubs},{r},{d},{i},{o}\n")

    for author_id, _, death, _, _, _, interaction, _ in AUTHORS:
        death_dt = datetime.fromisoformat(death).replace(tzinfo=timezone.utc)
        scale = 3.0 + 4.0 * np.log1p(interaction)
        posts = make_posts(rng, author_id, death_dt, scale)
        with (DATA / "posts" / f"{author_id}.jsonl").open("w", encoding="utf-8") as fh:
            for post in posts:
                fh.write(json.dumps(post, ensure_ascii=False) + "\n")
        (DATA / "works" / f"{author_id}.txt").write_text(make_works(rng, author_id), encoding="utf-8")

    lexicon = sorted(set(SHARED_PHRASES) | {w for ws in SIGNATURE.values() for w in ws}
                     | {w for ws in WORKS_ONLY.values() for w in ws})
    (DATA / "lexicon.txt").write_text(
        "# segmentation lexicon for the sample corpus (longest match wins)\n"
        + "\n".join(lexicon) + "\n",
        encoding="utf-8",
    )

    with (DATA / "translations.csv").open("w", encoding="utf-8") as fh:
        fh.write("term,label_en\n")
        for term, label in sorted(TRANSLATIONS.items()):
            fh.write(f"{term},{label}\n")

    (DATA / "stopwords.txt").write_text(
        "# stop words: one term per line, full-line # comments\n"
        "的\n了\n是\n我\n你\n他\n她\n它\n我们\n你们\n他们\n这个\n那个\n"
        "the\na\nan\nof\nto\nin\nand\nor\nfor\n",
        encoding="utf-8",
    )

    print(f"wrote sample corpus under {DATA}")


if __name__ == "__main__":
    main()
