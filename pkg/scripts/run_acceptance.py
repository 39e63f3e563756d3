"""Run every acceptance criterion and write a JSON report."""
import argparse
import pathlib
import sys

from emviscosity.cli import main

if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", default="results/acceptance.json")
    p.add_argument("--criteria", default=None)
    args = p.parse_args()
    pathlib.Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    argv = ["validate", "--out", args.out]
    if args.criteria:
        argv += ["--criteria", args.criteria]
    sys.exit(main(argv))
