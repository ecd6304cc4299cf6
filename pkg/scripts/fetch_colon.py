"""Download the Alon et al. colon tissue data and write it in the layout `shrinkcov genes` reads.

Usage::

    python3 scripts/fetch_colon.py DEST_DIR

Writes ``DEST_DIR/colon_expr.csv`` (2000 gene rows x 62 tissue columns, so use
``--layout variables``) and ``DEST_DIR/colon_labels.txt`` (one of ``normal`` or
``tumor`` per tissue). Point ``SHRINKCOV_COLON_DIR`` at ``DEST_DIR`` to enable the
colon acceptance check.

The source pages are plain-text tables wrapped in HTML. In the tissue list a
negative identifier marks a tumor sample. The host has moved before; pass
``--base`` to use a mirror.
"""

import argparse
import re
import sys
import urllib.request
from pathlib import Path

BASE = "http://genomics-pubs.princeton.edu/oncology/affydata"
EXPR_PAGE = "I2000.html"
TISSUE_PAGE = "tissues.html"


def fetch_text(url):
    with urllib.request.urlopen(url, timeout=60) as resp:
        raw = resp.read().decode("latin-1")
    return re.sub(r"<[^>]+>", " ", raw)


def parse_numbers(text):
    return [float(tok) for tok in re.findall(r"[-+]?\d+(?:\.\d*)?(?:[eE][-+]?\d+)?", text)]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("dest")
    ap.add_argument("--base", default=BASE)
    args = ap.parse_args(argv)

    values = parse_numbers(fetch_text(f"{args.base}/{EXPR_PAGE}"))
    if len(values) != 2000 * 62:
        sys.exit(f"expected 124000 expression values, parsed {len(values)}")
    tissues = [int(v) for v in parse_numbers(fetch_text(f"{args.base}/{TISSUE_PAGE}"))]
    if len(tissues) != 62:
        sys.exit(f"expected 62 tissue ids, parsed {len(tissues)}")

    dest = Path(args.dest)
    dest.mkdir(parents=True, exist_ok=True)
    with open(dest / "colon_expr.csv", "w") as fh:
        for g in range(2000):
            fh.write(",".join(repr(v) for v in values[g * 62:(g + 1) * 62]) + "\n")
    labels = ["tumor" if t < 0 else "normal" for t in tissues]
    (dest / "colon_labels.txt").write_text("\n".join(labels) + "\n")
    print(f"wrote {dest}: {labels.count('normal')} normal, {labels.count('tumor')} tumor")


if __name__ == "__main__":
    main()
