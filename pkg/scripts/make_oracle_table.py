"""Write the first N zeta zero ordinates computed with mpmath to a text table.

The output backs the test-suite oracle; it is independent of ahpairs.

Run:  python3 scripts/make_oracle_table.py 1000 > tests/data/zeros_mpmath_1000.txt
"""
import sys

import mpmath as mp

mp.mp.dps = 25
n = int(sys.argv[1]) if len(sys.argv) > 1 else 1000
print(f"# first {n} nontrivial zeta zero ordinates, mpmath {mp.__version__} zetazero, dps=25")
for k in range(1, n + 1):
    print(mp.nstr(mp.im(mp.zetazero(k)), 15, min_fixed=-1, max_fixed=30))
