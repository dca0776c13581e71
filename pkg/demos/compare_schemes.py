"""Small edge-user throughput comparison of the three clustering schemes.

Runs in well under a minute; raise ``count`` and ``trials`` for smoother
curves.
"""

from bscoloring import ExperimentConfig, TopologySpec, run_edge_user_throughput

cfg = ExperimentConfig(topology=TopologySpec(p=100.0, count=4), trials=50, k_per_bs_grid=(5, 20, 60), seed=3)
table = run_edge_user_throughput(cfg)

print("K_perBS  " + "  ".join(f"{m:>9s}" for m in table.methods()))
xs = table.series(table.methods()[0])[0]
for x in xs:
    print(f"{x:7.0f}  " + "  ".join(f"{table.value(m, x):9.3f}" for m in table.methods()))
