"""Write the bundled demonstration CTM table.

The values are PLACEHOLDERS, not coding-theorem estimates: each block of
length 3 over symbols 1..9 is charged ``3 + phrases * log2(9)`` bits, where
``phrases`` is its LZ76 phrase count. Useful only to exercise the BDM code path.
"""

import argparse
import itertools
import math
from pathlib import Path

from mycolex.complexity import CtmTable, lz76_phrases, save_ctm_table

DEFAULT_OUT = Path(__file__).resolve().parents[1] / "src/mycolex/data/demo_ctm_b3_a9_PLACEHOLDER.tsv"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--block-size", type=int, default=3)
    ap.add_argument("--alphabet", type=int, default=9)
    ap.add_argument("-o", "--out", type=Path, default=DEFAULT_OUT)
    args = ap.parse_args()

    symbols = range(1, args.alphabet + 1)
    entries = {
        block: 3.0 + lz76_phrases(block) * math.log2(args.alphabet)
        for block in itertools.product(symbols, repeat=args.block_size)
    }
    save_ctm_table(CtmTable.from_entries(entries, args.alphabet), args.out)
    print(f"{len(entries)} placeholder entries -> {args.out}")


if __name__ == "__main__":
    main()
