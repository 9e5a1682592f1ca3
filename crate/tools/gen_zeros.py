"""Write the first N ordinates of nontrivial zeta zeros, one per line."""
import sys
import mpmath as mp

mp.mp.dps = 25
n = int(sys.argv[1]) if len(sys.argv) > 1 else 500
out = sys.argv[2] if len(sys.argv) > 2 else "zeros_500.txt"
with open(out, "w") as f:
    f.write(f"# first {n} nontrivial zeros of zeta(s), ordinates only (beta = 1/2)\n")
    for k in range(1, n + 1):
        f.write(mp.nstr(mp.zetazero(k).imag, 15, strip_zeros=False) + "\n")
