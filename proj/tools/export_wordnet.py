#!/usr/bin/env python3
"""Writes a lexicon directory (synsets.tsv, exceptions.tsv, stopwords.txt)
from the NLTK copy of WordNet.

    python3 tools/export_wordnet.py OUT_DIR

Needs nltk with the wordnet and stopwords corpora downloaded.
"""

import argparse
import os

from nltk.corpus import stopwords
from nltk.corpus import wordnet as wn

POS_NAMES = {"n": "noun", "v": "verb", "a": "adj", "s": "adj", "r": "adv"}


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("out_dir")
    args = parser.parse_args()
    os.makedirs(args.out_dir, exist_ok=True)

    # Synsets in WordNet sense order: iterate lemmas, keep first appearance.
    seen = set()
    with open(os.path.join(args.out_dir, "synsets.tsv"), "w", encoding="utf-8") as f:
        f.write("# id\tpos\tlemmas\tgloss\n")
        for lemma in sorted(wn.all_lemma_names()):
            for syn in wn.synsets(lemma):
                if syn.name() in seen:
                    continue
                seen.add(syn.name())
                gloss = " ".join(syn.definition().split())
                lemmas = ",".join(l.name().lower() for l in syn.lemmas())
                f.write(f"{syn.name()}\t{POS_NAMES[syn.pos()]}\t{lemmas}\t{gloss}\n")

    with open(os.path.join(args.out_dir, "exceptions.tsv"), "w", encoding="utf-8") as f:
        f.write("# inflected\tpos\tlemma\n")
        for pos, table in sorted(wn._exception_map.items()):  # no public accessor
            for inflected, lemmas in sorted(table.items()):
                for lemma in lemmas:
                    f.write(f"{inflected}\t{POS_NAMES[pos]}\t{lemma}\n")

    with open(os.path.join(args.out_dir, "stopwords.txt"), "w", encoding="utf-8") as f:
        for word in sorted(set(stopwords.words("english"))):
            f.write(word + "\n")


if __name__ == "__main__":
    main()
