"""Scan gamma for the second control-term problem (exact solution tau^2 sin(pi z)).

The control contains tau^(2-g), whose transform after the 1/s^g shift sits
at s^-3. The limit at step k only admits s^-(k g + 1) or faster, so the
entry is absorbed exactly when k g + 1 = 3 for some k, i.e. when 2/g is an
integer; otherwise the recursion fails at k = ceil(2/g).

    python scripts/s6_divergence_scan.py
"""

import math
from fractions import Fraction

from lrps.engine import solve
from lrps.errors import Inapplicable
from lrps.fpe_model import builtin_example


def main() -> None:
    gammas = sorted({Fraction(n, d) for d in range(1, 11) for n in range(1, d + 1)})
    print(f"{'gamma':>6}  {'2/gamma':>8}  result")
    for g in gammas:
        try:
            sol, rep = solve(builtin_example("s6b", g))
            nz = [(k, str(p)) for k, p in enumerate(sol.coefficients) if p.terms]
            K = sol.order
            result = ", ".join(f"p_{k} = {p}" for k, p in nz) or f"p_0..p_{K} all zero (2/gamma > K = {K})"
            if nz and (2 / g).denominator != 1:
                result += "   (unexpected)"
        except Inapplicable as exc:
            result = f"Inapplicable at k = {exc.k}"
            if exc.k != math.ceil(2 / g):
                result += "   (unexpected)"
        print(f"{str(g):>6}  {float(2 / g):8.3f}  {result}")


if __name__ == "__main__":
    main()
