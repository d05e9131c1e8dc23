#!/usr/bin/env python3
"""Render a sweep CSV as the corresponding sensitivity figure.

Usage: plot_figure.py --figure fig5 --csv fig5.csv --out fig5.png
"""

import argparse
import sys

from figlib import RECIPE_LAYOUTS, recipe_for, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--figure", choices=sorted(RECIPE_LAYOUTS), required=True)
    parser.add_argument("--csv", required=True, help="sweep CSV to read")
    parser.add_argument("--out", required=True, help="image file to write")
    args = parser.parse_args(argv)
    try:
        render(recipe_for(args.figure, args.csv, args.out))
    except (OSError, ValueError) as exc:
        print(str(exc), file=sys.stderr)
        return 1
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
