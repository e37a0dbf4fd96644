#!/usr/bin/env python3
"""Convert a DICES CSV (one row per rater and item) into apunim input files.

    python3 scripts/dices_to_apunim.py diverse_safety_adversarial_dialog_350.csv out/

Writes out/annotations.csv, out/annotators.csv and out/config.toml. Column
names and levels default to the public DICES release and can be overridden, so
any long-format rater CSV works. --sample-items keeps a uniform random subset
of items (seeded).
"""

import argparse
import csv
import os
import random
import sys

DEFAULT_LEVELS = "No,Unsure,Yes"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("source")
    ap.add_argument("out_dir")
    ap.add_argument("--item-column", default="item_id")
    ap.add_argument("--rater-column", default="rater_id")
    ap.add_argument("--label-column", default="Q3_bias_overall")
    ap.add_argument("--levels", default=DEFAULT_LEVELS, help="ordered, comma-separated label levels")
    ap.add_argument("--sample-items", type=int, help="keep this many items, chosen uniformly")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument(
        "--dimension",
        action="append",
        metavar="NAME=COLUMN",
        help="annotator attribute to keep (repeatable); default race=rater_race",
    )
    args = ap.parse_args()
    dims = [d.split("=", 1) for d in (args.dimension or ["race=rater_race"])]
    levels = [l.strip() for l in args.levels.split(",")]

    with open(args.source, newline="", encoding="utf-8") as f:
        rows = list(csv.DictReader(f))
    keep = None
    if args.sample_items is not None:
        items = sorted({r[args.item_column].strip() for r in rows})
        keep = set(random.Random(args.seed).sample(items, min(args.sample_items, len(items))))

    os.makedirs(args.out_dir, exist_ok=True)
    profiles = {}
    seen = set()
    skipped = 0
    with open(os.path.join(args.out_dir, "annotations.csv"), "w", newline="", encoding="utf-8") as out:
        w = csv.writer(out)
        w.writerow(["item_id", "annotator_id", "value"])
        for row in rows:
            item, rater = row[args.item_column].strip(), row[args.rater_column].strip()
            if keep is not None and item not in keep:
                continue
            label = row[args.label_column].strip()
            if label not in levels or (item, rater) in seen:
                skipped += 1
                continue
            seen.add((item, rater))
            w.writerow([item, rater, label])
            profiles.setdefault(rater, [row[col].strip() for _, col in dims])

    with open(os.path.join(args.out_dir, "annotators.csv"), "w", newline="", encoding="utf-8") as out:
        w = csv.writer(out)
        w.writerow(["annotator_id"] + [name for name, _ in dims])
        for rater in sorted(profiles):
            w.writerow([rater] + profiles[rater])

    with open(os.path.join(args.out_dir, "config.toml"), "w", encoding="utf-8") as out:
        out.write('[scale]\nkind = "ordinal"\nlevels = [%s]\n' % ", ".join('"%s"' % l for l in levels))
        for name, _ in dims:
            out.write('\n[[dimension]]\nname = "%s"\n' % name)

    print(f"{len(seen)} annotations, {len(profiles)} raters, {skipped} rows skipped", file=sys.stderr)


if __name__ == "__main__":
    main()
