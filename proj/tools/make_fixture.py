#!/usr/bin/env python3
"""Writes the bundled end-to-end fixture into data/fixture/.

Every name and filler word is a generated pseudo-word used exactly where the
fixture needs it, so lexical overlap between a question and its answer-bearing
passages is what drives retrieval, and the answer is the only non-question
word repeated across the top contexts.
"""

import argparse
import json
import random
from pathlib import Path

SYLLABLES = [
    "bar", "dor", "ven", "kal", "mir", "tos", "lun", "gra", "pel", "zan", "rik", "fol",
    "quen", "sar", "vel", "dun", "bri", "hol", "mak", "ser", "tav", "nor", "cil", "por",
    "wen", "jal", "kes", "ro", "dra", "fen", "gul", "ilm", "yor", "zet", "om", "ack",
]


class Words:
    def __init__(self, rng):
        self.rng = rng
        self.used = set()

    def word(self, n=None):
        while True:
            k = n or self.rng.choice([2, 3])
            w = "".join(self.rng.choice(SYLLABLES) for _ in range(k))
            if w not in self.used:
                self.used.add(w)
                return w

    def name(self):
        return self.word().capitalize()

    def person(self):
        return f"{self.name()} {self.name()}"


def filler(words, n_sentences):
    out = []
    for _ in range(n_sentences):
        a, b, c = words.word(), words.word(), words.word()
        out.append(f"{a.capitalize()} {b} {c}.")
    return " ".join(out)


TEXT_RELATIONS = [
    ("was born in", "Where was {s} born?"),
    ("founded the town of", "Which town was founded by {s}?"),
    ("composed the opera", "Which opera was composed by {s}?"),
    ("discovered the comet", "Which comet was discovered by {s}?"),
    ("painted the mural", "Which mural was painted by {s}?"),
]

TABLE_SCHEMAS = [
    (["Player", "Club", "Season"], "Which club did the player {s} join that season?", 1),
    (["Skater", "Coach", "Rank"], "Which coach trained the skater {s} to that rank?", 1),
    (["Pilot", "Aircraft", "Year"], "Which aircraft did the pilot {s} fly that year?", 1),
]

KB_PREDICATES = [
    ("award received", "What award was received by {s}?"),
    ("spouse", "Who is the spouse of {s}?"),
    ("employer", "Which employer did {s} work for?"),
    ("member of", "{s} was a member of which group?"),
    ("place of burial", "What is the place of burial of {s}?"),
]


def build(seed):
    rng = random.Random(seed)
    words = Words(rng)
    passages, tables, relations, questions, linking = [], [], [], [], []

    # Text: 30 questions, each answered by 3 passages; 110 distractors.
    for i in range(30):
        subject = words.person()
        answer = words.name()
        rel, qtmpl = TEXT_RELATIONS[i % len(TEXT_RELATIONS)]
        for v in range(3):
            lead = [
                f"{subject} {rel} {answer}.",
                f"It was {subject} who {rel} {answer}.",
                f"{subject} also {rel} {answer}.",
            ][v]
            passages.append({
                "id": f"text-{i:02d}-{v}",
                "source": "text",
                "title": subject,
                "text": f"{lead} {filler(words, 3)}",
            })
        questions.append({"id": f"q{len(questions):02d}", "text": qtmpl.format(s=subject),
                          "answers": [answer], "dataset": "text"})
    for d in range(110):
        decoy = words.person()
        kind = "list" if d % 10 == 0 else "text"
        passages.append({
            "id": f"distractor-{d:03d}",
            "source": kind,
            "title": decoy,
            "text": f"{decoy} {words.word()} {words.name()}. {filler(words, 4)}",
        })

    # Tables: 18 content tables (one with a nested table), one service table,
    # one single-row table. 10 questions are answered from table rows.
    for t in range(18):
        header, qtmpl, col = TABLE_SCHEMAS[t % len(TABLE_SCHEMAS)]
        rows = [[{"text": h, "is_header_markup": True} for h in header]]
        people = []
        for _ in range(5):
            person = words.person()
            people.append(person)
            value = words.name()
            third = str(1900 + rng.randrange(120)) if header[2] in ("Season", "Year") else str(rng.randrange(1, 30))
            rows.append([{"text": person}, {"text": value}, {"text": third}])
        table = {
            "id": f"table-{t:02d}",
            "page_title": f"{words.name()} {header[0]}s",
            "caption": f"List of {header[0].lower()}s",
            "css_class": "wikitable",
            "rows": rows,
        }
        if t == 3:
            # A nested table inside a cell of the last row.
            nested_rows = [[{"text": "Note", "is_header_markup": True}], [{"text": words.word()}], [{"text": words.word()}]]
            rows[-1][2]["nested"] = [{"rows": nested_rows}]
        if t < 10:
            r = 1 + (t % 5)
            questions.append({"id": f"q{len(questions):02d}", "text": qtmpl.format(s=people[r - 1]),
                              "answers": [rows[r][col]["text"]], "dataset": "tables"})
        tables.append(table)
    tables.append({
        "id": "table-navbox", "page_title": "Navigation", "caption": "Related pages",
        "css_class": "navbox collapsible",
        "rows": [[{"text": words.name()}, {"text": words.name()}], [{"text": words.name()}, {"text": words.name()}]],
    })
    tables.append({
        "id": "table-single", "page_title": words.name(), "caption": "",
        "css_class": "wikitable", "rows": [[{"text": words.name()}, {"text": words.name()}]],
    })

    # KB: 40 entities, 100 relations (every fifth has a qualifier), 10 questions.
    entities = [{"id": f"E{e:02d}", "surface": words.person()} for e in range(40)]
    for r in range(100):
        subj = entities[r % 40]
        pred, _ = KB_PREDICATES[(r // 40 + r) % len(KB_PREDICATES)]
        if r % 3 == 0:
            obj = {"literal": words.name()}
        else:
            o = entities[(r * 7 + 3) % 40]
            obj = {"id": o["id"], "surface": o["surface"]}
        rel = {"id": f"R{r:03d}", "subject": dict(subj), "predicate": pred, "object": obj}
        if r % 5 == 0:
            rel["qualifiers"] = [{"predicate": "start time", "object": {"literal": str(1950 + r)}}]
        relations.append(rel)
    kb_targets = [r for r in relations if "literal" in r["object"]][:10]
    for rel in kb_targets:
        pred = rel["predicate"]
        qtmpl = dict(KB_PREDICATES)[pred]
        qid = f"q{len(questions):02d}"
        questions.append({"id": qid, "text": qtmpl.format(s=rel["subject"]["surface"]),
                          "answers": [rel["object"]["literal"]], "dataset": "kb"})
        linking.append({"question_id": qid, "entities": [rel["subject"]["id"]]})
    # A few text questions get (irrelevant) links too.
    for q in questions[:5]:
        linking.append({"question_id": q["id"], "entities": [entities[int(q["id"][1:]) + 30]["id"]]})
    linking.sort(key=lambda x: x["question_id"])
    return passages, tables, relations, questions, linking


HTML_PAGE = """<html><head><title>Sample</title><style>td { color: red; }</style></head>
<body>
<p>Intro text that is not part of any table.</p>
<table class="wikitable">
  <caption>Winners &amp; runners-up</caption>
  <tr><th>Year</th><th>Winner</th></tr>
  <tr><td>1998</td><td>Spain<br>(first title)</td></tr>
  <tr><td>2002</td><td>Brazil <table><tr><td>nested note</td></tr></table></td></tr>
</table>
<!-- <table><tr><td>commented out</td></tr></table> -->
<table class="navbox"><tr><td>Nav</td></tr></table>
</body></html>
"""

CONFIG = """# Hermetic end-to-end run over the bundled fixture.
text = {d}/text.jsonl
tables = {d}/tables.jsonl
kb = {d}/kb.jsonl
questions = {d}/questions.jsonl
linking = {d}/linking.jsonl
output_dir = out/e2e
token_limit = 100
k_total = 100
kb_quota = 10
embedder = stub
embed_dim = 256
reader = baseline
reader_contexts = 10
seed = 13
"""


def write_jsonl(path, rows):
    with open(path, "w", encoding="utf-8") as f:
        for r in rows:
            f.write(json.dumps(r, sort_keys=True, ensure_ascii=False) + "\n")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data" / "fixture"))
    ap.add_argument("--seed", type=int, default=20240611)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    passages, tables, relations, questions, linking = build(args.seed)
    write_jsonl(out / "text.jsonl", passages)
    write_jsonl(out / "tables.jsonl", tables)
    write_jsonl(out / "kb.jsonl", relations)
    write_jsonl(out / "questions.jsonl", questions)
    write_jsonl(out / "linking.jsonl", linking)
    (out / "page.html").write_text(HTML_PAGE, encoding="utf-8")
    (out / "e2e.conf").write_text(CONFIG.format(d="data/fixture"), encoding="utf-8")
    print(f"{len(passages)} passages, {len(tables)} tables, {len(relations)} relations, "
          f"{len(questions)} questions -> {out}")


if __name__ == "__main__":
    main()
