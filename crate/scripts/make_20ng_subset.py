"""Build the small 20 Newsgroups fixture used by the acceptance suite.

Input: the tab-separated 20 Newsgroups train/test files shipped inside the
`orange3-text` wheel (orangecontrib/text/datasets/20newsgroups-*.tab).
Output: gzipped JSON-lines corpus, one object per message with fields
id, text, topics.

The subset is stratified on comp.sys.ibm.pc.hardware so the topic keeps its
natural prevalence.
"""
import argparse
import csv
import gzip
import json
import random

TOPIC = "comp.sys.ibm.pc.hardware"


def read_tab(path, split):
    csv.field_size_limit(1 << 30)
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh, delimiter="\t"))[3:]
    out = []
    for i, row in enumerate(rows):
        if len(row) != 2 or not row[1].strip():
            continue
        out.append({"id": f"{split}-{i:05d}", "text": row[1], "topics": [row[0]]})
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--train", required=True)
    ap.add_argument("--test", required=True)
    ap.add_argument("--size", type=int, default=5000)
    ap.add_argument("--seed", type=int, default=20230610)
    ap.add_argument("--out", required=True)
    args = ap.parse_args()

    docs = read_tab(args.train, "train") + read_tab(args.test, "test")
    rng = random.Random(args.seed)
    pos = [d for d in docs if TOPIC in d["topics"]]
    neg = [d for d in docs if TOPIC not in d["topics"]]
    frac = args.size / len(docs)
    keep = rng.sample(pos, round(frac * len(pos))) + rng.sample(neg, round(frac * len(neg)))
    keep.sort(key=lambda d: d["id"])
    with gzip.open(args.out, "wt", encoding="utf-8") as fh:
        for d in keep:
            fh.write(json.dumps(d, ensure_ascii=False) + "\n")
    print(f"{len(keep)} documents, {sum(TOPIC in d['topics'] for d in keep)} relevant")


if __name__ == "__main__":
    main()
