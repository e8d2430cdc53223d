#!/usr/bin/env python3
"""Convert NASA PCoE battery .mat files into the mcgp capacity CSV.

Usage:
    nasa_mat_to_csv.py B0005.mat B0006.mat B0007.mat -o data/nasa_b0005_b0007.csv

Each discharge run becomes one row; cycles are numbered 1, 2, ... in the order
the discharge runs appear in the file. Requires scipy.
"""

import argparse
import os
import sys

from scipy.io import loadmat


def discharge_capacities(path):
    cell = os.path.splitext(os.path.basename(path))[0]
    mat = loadmat(path, squeeze_me=True, struct_as_record=False)
    if cell not in mat:
        raise SystemExit(f"{path}: no variable named {cell}")
    caps = []
    for run in mat[cell].cycle:
        if str(run.type).strip() != "discharge":
            continue
        cap = float(run.data.Capacity)
        if cap > 0:
            caps.append(cap)
    return cell, caps


def main(argv):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("mat", nargs="+", help="NASA battery .mat files (B0005.mat, ...)")
    ap.add_argument("-o", "--out", required=True, help="output CSV path")
    args = ap.parse_args(argv)

    rows = []
    for path in args.mat:
        cell, caps = discharge_capacities(path)
        rows.extend((cell, k + 1, c) for k, c in enumerate(caps))
        print(f"{cell}: {len(caps)} discharge cycles", file=sys.stderr)

    os.makedirs(os.path.dirname(os.path.abspath(args.out)), exist_ok=True)
    with open(args.out, "w", newline="\n", encoding="utf-8") as f:
        f.write("cell_id,cycle,capacity_ah\n")
        for cell, cycle, cap in rows:
            f.write(f"{cell},{cycle},{cap!r}\n")


if __name__ == "__main__":
    main(sys.argv[1:])
