"""Margolis ranks k_{m,n} of J(n) for m = 0, 1, 2 next to their generating series."""
from browngitler import theorems as T

for m in (0, 1, 2):
    table = T.k_tables(m, 24)
    print(table.to_text())
    print(f"series {T.rational_series(m, 24)}")
    print()

# the minimal acyclic example for each even n
for n in range(2, 17, 2):
    print(f"n={n:2d}: least m with Q(n,m) acyclic is {T.minimal_acyclic_m(n)}")
