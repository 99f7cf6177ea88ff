"""
Risk along the kappa ~ sqrt(N) axis
===================================

Sweep N and gamma = log(kappa) / log(sqrt(N)) for two detectors, calibrating a
threshold in every cell, and write the table as CSV and an SVG heatmap.
"""

# %%
from hyperclique.harness import DetectorConfig, PhaseGridSpec, phase_grid, rows_to_csv, rows_to_svg

spec = PhaseGridSpec(
    d=3,
    n_list=(20, 30, 40),
    detectors=(DetectorConfig("spectral"), DetectorConfig("edgecount")),
    gammas=(0.6, 1.0, 1.4, 1.8),
    trials=40,
    calibration_trials=200,
)
rows = phase_grid(spec)
print(rows_to_csv(rows))

# %%
for row in rows:
    if row.solved:
        print(f"{row.detector:>9} solves N={row.n}, kappa={row.kappa} (gamma {row.gamma:.2f})")

with open("phase.svg", "w") as fh:
    fh.write(rows_to_svg(rows))
