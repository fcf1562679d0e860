"""Regenerate the numeric tables for the built-in examples as CSV files.

    python scripts/reproduce_tables.py [outdir]

Writes, for each example with a closed form, the gamma sweep of v_8 at the
centre point, the gamma = 1 error table and the K = 4/6/8 sweep.
"""

import sys
import time
from fractions import Fraction
from pathlib import Path

from lrps.fpe_model import builtin_example
from lrps.report import TableSpec, emit, run_order_sweep, run_table

GAMMA_SWEEP = [Fraction(1, 5), Fraction(2, 5), Fraction(3, 5), Fraction(4, 5), Fraction(1)]
ERROR_TIMES = [0.15, 0.30, 0.45, 0.60, 0.75, 0.90]
SWEEP_TIMES = [0.1, 0.2, 0.3, 0.4, 0.5]
SWEEP_POINTS = {"2": [0.5, 1.0], "4": [0.5, 1.0], "5": [0.5, 1.0], "6": [0.5, 1.0], "7": [0.5, 1.0],
                "8": [0.5, 0.75]}


def main(outdir: str = "tables") -> None:
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    for eid in ("1", "2", "4", "5", "6", "7", "8", "s6a"):
        start = time.perf_counter()
        p = builtin_example(eid)
        centre = [(0.5,) * p.dimension]
        tables = {
            "gamma_sweep": run_table(p, None, TableSpec(centre, ERROR_TIMES, GAMMA_SWEEP, ("value", "exact"))),
            "errors": run_table(p, None, TableSpec(centre, ERROR_TIMES, [1])),
        }
        if eid in SWEEP_POINTS:
            pts = [(z,) * p.dimension for z in SWEEP_POINTS[eid]]
            tables["order_sweep"] = run_order_sweep(p, TableSpec(pts, SWEEP_TIMES, [1]), (4, 6, 8))
        for name, table in tables.items():
            (out / f"example_{eid}_{name}.csv").write_text(emit(table, "csv"))
        print(f"example {eid}: {', '.join(tables)} in {time.perf_counter() - start:.2f}s")
    print(f"written to {out.resolve()}")


if __name__ == "__main__":
    main(*sys.argv[1:])
