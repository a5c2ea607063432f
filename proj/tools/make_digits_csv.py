"""Writes the handwritten-digits table bundled with scikit-learn as a CSV.

Used once to produce tests/data/digits.csv (1797 rows, 64 pixel columns and a
`digit` label column). Pick two classes with --pos-class/--neg-class.
"""

import argparse
import csv

from sklearn.datasets import load_digits


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("out")
    args = ap.parse_args()
    d = load_digits()
    with open(args.out, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow([f"p{i}" for i in range(d.data.shape[1])] + ["digit"])
        for x, y in zip(d.data, d.target):
            w.writerow([int(v) for v in x] + [int(y)])


if __name__ == "__main__":
    main()
