"""Build the cluster plan for one perturbed 7x7 grid and look at it.

    python demos/plan_walkthrough.py [p]
"""

import sys

from bscoloring import build_cluster_plan, estimate_region_areas, generate_perturbed_grid

p = float(sys.argv[1]) if len(sys.argv) > 1 else 100.0
topo = generate_perturbed_grid(7, 7, 200.0, p, seed=7)
areas = estimate_region_areas(topo, n_dummies=5000, seed=7)
plan = build_cluster_plan(topo, areas, delta_ec=4)

print(f"p = {p:g} m")
for k, v in plan.summary().items():
    print(f"  {k:10s} {v}")

# regions removed by the degree cap, smallest first
print("cut, in order:")
for (i, j), a in plan.cut.cut_log[:8]:
    tag = "restored" if (i, j) in plan.cut.restored else ""
    print(f"  ({i:2d},{j:2d})  area {a:9.0f} m^2  {tag}")

for ell, pat in enumerate(plan.patterns, 1):
    pairs = " ".join(f"{i}-{j}" for i, j in sorted(pat))
    print(f"pattern {ell} ({len(pat)} pairs): {pairs}")
