"""
Linear benchmark: accuracy against training set size
====================================================

Repeats many train/test draws for each training size and prints a table of
mean accuracy for the plain and the iterated classifier. The same numbers
are written by ``sdfclass bench-linear --figure-csv``.
"""

from sdfclass.bench import figure_rows, run_linear_suite

M_VALUES = [10, 30, 100, 300, 1000]
TRIALS = 20

rows = []
for kind in ("uniform", "normal", "skewed"):
    for it in (0, 5):
        reps = run_linear_suite(kind, M_VALUES, trials=TRIALS, test_size=4000, iterations=it, seed=0)
        rows += [dict(r, kind=kind) for r in figure_rows(reps, f"it{it}")]

print(f"{'kind':8s} {'m':>6s} {'it0':>8s} {'it5':>8s}")
for kind in ("uniform", "normal", "skewed"):
    for m in M_VALUES:
        acc = {r["variant"]: r["mean_accuracy"] for r in rows if r["kind"] == kind and r["m"] == m}
        print(f"{kind:8s} {m:6d} {acc['it0']:8.4f} {acc['it5']:8.4f}")
