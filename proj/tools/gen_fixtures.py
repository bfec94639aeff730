#!/usr/bin/env python3
"""Regenerates the bundled fixtures under data/.

  data/mini/positive.jsonl, data/mini/negative.jsonl
      20 + 20 synthetic abstracts. Every background word has the same
      document frequency in both corpora (score 0.5); six planted words are
      strongly skewed toward the positive corpus and are the only words that
      clear the default 0.05 / 0.70 thresholds.
  data/mini/votes.csv
      129 screening records whose decision classes are 68 majority,
      5 inconclusive, 10 expert override and 46 excluded, with 244 Yes,
      280 No and 116 Not Sure answers in total (2 to 8 answers per article).

The output is deterministic; rerun after editing and commit the results.
"""
import json
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent / "data" / "mini"

BACKGROUND = """study analysis data method results model approach significant observed group
levels response design effect measured population associated increased compared factors
outcome evidence framework performance network software students education community policy
energy environment values process quality system training estimate""".split()

# word: (df in positive, df in negative)
PLANTED = {
    "carcinoma": (12, 1),
    "biopsy": (9, 1),
    "histology": (6, 1),
    "tumor": (14, 3),
    "lesion": (8, 2),
    "metastasis": (5, 1),
}
# Skewed but below the score threshold.
DISTRACTORS = {
    "clinical": (8, 4),   # 0.667
    "patients": (10, 7),  # 0.588
    "imaging": (3, 2),    # 0.6
}
TEMPLATES = [
    "The {} of the {} was {}.",
    "We {} {} and {} in this {}.",
    "In {n} {}-{}, the {} was {}.",
    "This {} is {} with {}.",
    "Our {} and {} are {} for {}.",
]
N_DOCS = 20


def spread(rng, df):
    return set(rng.sample(range(N_DOCS), df))


def render(rng, words):
    words = list(words)
    rng.shuffle(words)
    sentences = []
    i = 0
    while i < len(words):
        template = rng.choice(TEMPLATES)
        slots = template.count("{}")
        chunk = words[i:i + slots]
        i += slots
        while len(chunk) < slots:
            chunk.append(rng.choice(words))
        sentences.append(template.format(*chunk, n=rng.randint(2, 99)))
    return " ".join(sentences)


def corpora():
    rng = random.Random(20161231)
    background = [set(rng.sample(BACKGROUND, rng.randint(6, 10))) for _ in range(N_DOCS)]
    extra = {"positive": [set() for _ in range(N_DOCS)], "negative": [set() for _ in range(N_DOCS)]}
    for word, (df_p, df_n) in {**PLANTED, **DISTRACTORS}.items():
        for i in spread(rng, df_p):
            extra["positive"][i].add(word)
        for i in spread(rng, df_n):
            extra["negative"][i].add(word)
    out = {}
    for label, prefix in (("positive", "P"), ("negative", "N")):
        docs = []
        for i in range(N_DOCS):
            words = sorted(background[i] | extra[label][i])
            title_words = sorted(words)[:3]
            docs.append({
                "id": f"{prefix}{i + 1:04d}",
                "title": " ".join(w.capitalize() for w in title_words) + ": a report",
                "abstract": render(rng, words),
                "pub_date": f"2016-{i % 12 + 1:02d}-{i % 28 + 1:02d}",
                "source": "local",
            })
        out[label] = docs
    return out


def write_corpus(label, docs):
    path = ROOT / f"{label}.jsonl"
    with path.open("w", encoding="utf-8") as f:
        f.write(json.dumps({"label": label, "n_docs": len(docs)}, separators=(",", ":")) + "\n")
        for d in docs:
            f.write(json.dumps(d, separators=(",", ":"), ensure_ascii=False) + "\n")


def votes():
    rng = random.Random(2017)
    rows = []
    # 5 two-answer split votes.
    rows += [(1, 1, 0, 0)] * 5
    majority = [(3, 1, 1, 0)] * 68
    override = [(1, 3, 1, 1)] * 10
    exclude = [(1, 4, 1, 0)] * 46
    rows += majority + override + exclude
    target = {"yes": 244, "no": 280, "ns": 116}

    def totals(rs):
        return (sum(r[0] for r in rs), sum(r[1] for r in rs), sum(r[2] for r in rs))

    # Nudge individual articles toward the reported totals while keeping
    # every article in its class and within 3..8 answers.
    def ok(r, cls):
        y, n, s, e = r
        if not 3 <= y + n + s <= 8:
            return False
        eff = y + n
        if cls == "majority":
            return eff > 0 and 2 * y >= eff and not (eff <= 2 and y >= 1 and n >= 1)
        if cls == "override":
            return eff > 2 and 2 * y < eff and e >= 1 and e <= y
        return eff > 2 and 2 * y < eff and e == 0

    classes = ["tie"] * 5 + ["majority"] * 68 + ["override"] * 10 + ["exclude"] * 46
    rows = [list(r) for r in rows]
    # One article carries the maximum of 8 answers and stays fixed.
    pinned = 5 + 68 + 10
    rows[pinned] = [1, 5, 2, 0]
    for _ in range(200000):
        y, n, s = totals(rows)
        if (y, n, s) == (target["yes"], target["no"], target["ns"]):
            break
        i = rng.randrange(5, len(rows))
        if i == pinned:
            continue
        j = rng.randrange(3)
        want = [target["yes"] - y, target["no"] - n, target["ns"] - s][j]
        if want == 0:
            continue
        cand = rows[i][:]
        cand[j] += 1 if want > 0 else -1
        if cand[j] < 0:
            continue
        if ok(cand, classes[i]):
            rows[i] = cand
    assert totals(rows) == (244, 280, 116), totals(rows)
    sizes = [sum(r[:3]) for r in rows]
    assert (min(sizes), max(sizes)) == (2, 8), (min(sizes), max(sizes))
    order = list(range(len(rows)))
    rng.shuffle(order)
    with (ROOT / "votes.csv").open("w") as f:
        f.write("article_id,yes,no,not_sure,expert_yes\n")
        for k, idx in enumerate(order):
            y, n, s, e = rows[idx]
            f.write(f"A{k + 1:03d},{y},{n},{s},{e}\n")


if __name__ == "__main__":
    ROOT.mkdir(parents=True, exist_ok=True)
    for label, docs in corpora().items():
        write_corpus(label, docs)
    votes()
