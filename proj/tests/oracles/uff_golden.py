#!/usr/bin/env python3
"""Evaluate the UFF natural bond length formula for a fixed set of atom pairs.

    r_ij = r_i + r_j + r_BO - r_EN
    r_BO = -lambda * (r_i + r_j) * ln(n),             lambda = 0.1332
    r_EN = r_i * r_j * (sqrt(chi_i) - sqrt(chi_j))^2 / (chi_i * r_i + chi_j * r_j)

Reads data/uff_bond_params.csv and writes tests/data/uff_golden.csv.
"""
import csv
import math
import pathlib

ROOT = pathlib.Path(__file__).resolve().parents[2]
LAMBDA = 0.1332

# (element_a, hyb_a, element_b, hyb_b, bond order)
PAIRS = [
    ("C", "SP3", "C", "SP3", 1.0),
    ("C", "SP2", "C", "SP2", 2.0),
    ("C", "SP", "C", "SP", 3.0),
    ("C", "AROMATIC", "C", "AROMATIC", 1.5),
    ("C", "SP3", "O", "SP3", 1.0),
    ("C", "SP2", "O", "SP2", 2.0),
    ("C", "SP3", "N", "SP3", 1.0),
    ("C", "SP", "N", "SP", 3.0),
    ("C", "SP3", "Cl", "*", 1.0),
    ("C", "AROMATIC", "N", "AROMATIC", 1.5),
    ("C", "SP3", "F", "*", 1.0),
    ("C", "SP3", "S", "SP3", 1.0),
]


def load():
    rows = {}
    with open(ROOT / "data" / "uff_bond_params.csv") as fh:
        lines = [l for l in fh if l.strip() and not l.startswith("#")]
    for row in csv.DictReader(lines):
        rows[(row["element"], row["hybridization"])] = (
            float(row["radius_angstrom"]), float(row["chi"]))
    return rows


def length(pa, pb, order):
    ri, xi = pa
    rj, xj = pb
    r_bo = -LAMBDA * (ri + rj) * math.log(order)
    r_en = ri * rj * (math.sqrt(xi) - math.sqrt(xj)) ** 2 / (xi * ri + xj * rj)
    return ri + rj + r_bo - r_en


def main():
    rows = load()
    out = ROOT / "tests" / "data" / "uff_golden.csv"
    with open(out, "w") as fh:
        fh.write("element_a,hyb_a,element_b,hyb_b,order,length_angstrom\n")
        for ea, ha, eb, hb, n in PAIRS:
            d = length(rows[(ea, ha)], rows[(eb, hb)], n)
            fh.write(f"{ea},{ha},{eb},{hb},{n},{d:.12f}\n")


if __name__ == "__main__":
    main()
