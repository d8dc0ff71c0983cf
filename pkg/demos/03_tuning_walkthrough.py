"""
Tuning with an orthogonal array and TOPSIS
==========================================

Local search has two parameters with four levels each, so its design is the
16-run full factorial. The genetic algorithm has four four-level parameters
(256 combinations) and is covered by the 16-run L16 array instead.
"""

# %%
import tempfile

import numpy as np

from nqueens_bench import harness
from nqueens_bench.tuning import FactorGrid, build_design, expand_design, strength2_violations

grid = FactorGrid.for_algorithm("ga")
design = build_design(grid)
print(f"ga: {grid.full_size} combinations -> {design.runs} runs ({design.source})")
print("factors:", grid.names)
print(design.matrix[:4], "...")
# every pair of columns sees each of the 16 level pairs exactly once
print("strength-2 violations:", strength2_violations(design.matrix, design.levels))

for config in expand_design(design, grid)[:3]:
    print(config)

# %%
# Tune at 8 queens: every design row runs five times, mean cost and mean NFE
# form a 16 x 2 decision matrix, TOPSIS picks the winner.
plan = harness.ExperimentPlan(algorithms=("ga",), sizes=(8,))
outcome = harness.run_tuning_phase(plan, "ga", 8)
order = np.argsort(outcome.closeness)[::-1]
print(f"\n{'row':>3} {'mean cost':>9} {'mean NFE':>9} {'closeness':>9}")
for i in order[:5]:
    a = outcome.aggregates[i]
    print(f"{i:3d} {a.mean_cost:9.1f} {a.mean_nfe:9.0f} {outcome.closeness[i]:9.3f}")
print("chosen:", outcome.config)

# %%
# Validation (5 runs) and final (10 runs) with the chosen values, then the
# persisted results and the comparison report.
manifest = harness.RunManifest(plan)
harness.tune(plan, manifest, "ga", 8)
harness.evaluate(plan, manifest, "ga", 8)

out = tempfile.mkdtemp(prefix="nqueens-")
harness.write_results(manifest, out)
again = harness.read_results(out)
print(f"\n{len(again.trials)} runs stored in {out}")
print("replay mismatches:", harness.replay(again, again.trials[-10:]))
print(harness.render_report(again.summaries()).text)
