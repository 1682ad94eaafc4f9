#!/usr/bin/env python3
"""Count articles, paragraphs, questions and answers in a SQuAD v1.1 file.

Independent of the Rust loader; used to cross-check its counts.
"""
import json
import sys


def count(path):
    with open(path, encoding="utf-8") as f:
        doc = json.load(f)
    articles = doc["data"]
    paragraphs = [p for a in articles for p in a["paragraphs"]]
    qas = [q for p in paragraphs for q in p["qas"]]
    answers = sum(len(q["answers"]) for q in qas)
    return {"articles": len(articles), "paragraphs": len(paragraphs), "questions": len(qas), "answers": answers}


if __name__ == "__main__":
    for path in sys.argv[1:]:
        print(path, json.dumps(count(path)))
