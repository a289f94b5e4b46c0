"""Compare the closed-form criterion with the Margolis oracle on a rectangle of pairs.

usage: python3 demos/scan_rectangle.py [m_max] [jobs]
"""
import sys

from browngitler.theorems import scan_main_theorem

m_max = int(sys.argv[1]) if len(sys.argv) > 1 else 24
jobs = int(sys.argv[2]) if len(sys.argv) > 2 else 1

rep = scan_main_theorem(m_max - 1, m_max, jobs=jobs)
for r in rep.records:
    if r.oracle:
        print(f"Q({r.n},{r.m}) is Q1-acyclic, dim {r.dimension}, A(1) generators {list(r.a1_generators)}")
print(rep.summary())
