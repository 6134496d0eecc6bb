#!/usr/bin/env python3
"""Render the NMSD learning curves from nmsd.csv (same directory)."""
import csv
import os
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
path = sys.argv[1] if len(sys.argv) > 1 else os.path.join(here, "nmsd.csv")

with open(path, newline="") as fh:
    rows = list(csv.reader(fh))

labels = rows[0][1:]
iterations = [int(r[0]) for r in rows[1:]]
series = [[float(r[i + 1]) for r in rows[1:]] for i in range(len(labels))]

plt.figure(figsize=(8, 5))
for label, values in zip(labels, series):
    plt.plot(iterations, values, label=label, linewidth=1.0)
plt.xlabel("iteration k")
plt.ylabel("NMSD (dB)")
plt.grid(True, alpha=0.3)
plt.legend()
plt.tight_layout()
out = os.path.join(os.path.dirname(path), "nmsd.png")
plt.savefig(out, dpi=150)
print(f"wrote {out}")
