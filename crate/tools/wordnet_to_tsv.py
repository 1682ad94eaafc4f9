#!/usr/bin/env python3
"""Convert WordNet 3.0 data files into the lexicon TSV read by advqa.

    python3 tools/wordnet_to_tsv.py /path/to/WordNet-3.0/dict > lexicon.tsv

Output: one line per lemma, `lemma<TAB>synonyms<TAB>antonyms`, lists
comma-separated and sorted. Synonyms are the other lemmas of every synset
the lemma belongs to (no hypernyms). Antonyms come from the lexical `!`
pointers. Multi-word lemmas are dropped because the generator swaps single
tokens. The loader computes the symmetric closure, but the output is already
symmetric.
"""
import argparse
import os
import re
import sys
from collections import defaultdict

POS_FILES = ["data.noun", "data.verb", "data.adj", "data.adv"]
ADJ_MARKER = re.compile(r"\((a|p|ip)\)$")


def clean(word):
    return ADJ_MARKER.sub("", word).lower()


def parse_line(line):
    """(words, antonym pointers) of one synset line; pointers are
    (target offset, target pos, source word index, target word index)."""
    fields = line.split(" | ", 1)[0].split()
    w_cnt = int(fields[3], 16)
    words = [clean(fields[4 + 2 * i]) for i in range(w_cnt)]
    i = 4 + 2 * w_cnt
    p_cnt = int(fields[i])
    i += 1
    pointers = []
    for _ in range(p_cnt):
        symbol, offset, pos, st = fields[i:i + 4]
        i += 4
        if symbol == "!":
            pointers.append((offset, pos, int(st[:2], 16), int(st[2:], 16)))
    return fields[0], words, pointers


def convert(dict_dir):
    synsets = {}
    for name in POS_FILES:
        path = os.path.join(dict_dir, name)
        pos_key = name.split(".")[1][0]
        with open(path, encoding="latin-1") as f:
            for line in f:
                if line.startswith("  "):
                    continue
                offset, words, pointers = parse_line(line)
                synsets[(pos_key, offset)] = (words, pointers)

    syn = defaultdict(set)
    ant = defaultdict(set)
    # Adjective satellites ("s") live in data.adj alongside heads.
    norm = {"n": "n", "v": "v", "a": "a", "s": "a", "r": "r"}
    for (pos, _), (words, pointers) in synsets.items():
        for w in words:
            syn[w].update(x for x in words if x != w)
        for offset, tpos, src, tgt in pointers:
            target = synsets.get((norm[tpos], offset))
            if target is None or src == 0 or tgt == 0:
                continue
            a, b = words[src - 1], target[0][tgt - 1]
            if a != b:
                ant[a].add(b)
                ant[b].add(a)

    keep = lambda w: "_" not in w and " " not in w and "-" not in w
    out = []
    for lemma in sorted(set(syn) | set(ant)):
        if not keep(lemma):
            continue
        s = sorted(x for x in syn[lemma] if keep(x))
        a = sorted(x for x in ant[lemma] if keep(x))
        if s or a:
            out.append(f"{lemma}\t{','.join(s)}\t{','.join(a)}")
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("dict_dir", help="WordNet 3.0 dict/ directory holding data.noun etc.")
    args = ap.parse_args()
    sys.stdout.write("# lemma<TAB>synonyms<TAB>antonyms (WordNet 3.0)\n")
    for line in convert(args.dict_dir):
        sys.stdout.write(line + "\n")


if __name__ == "__main__":
    main()
