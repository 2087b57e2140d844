"""
======================================
Compute-and-forward at a glance
======================================

Two sources, one relay.  The relay scales its observation by the MMSE
alpha, decodes an integer combination of the transmitted lattice points,
and the achievable rate depends on how well the integer vector a matches
the channel h.  Higher power -> finer effective resolution -> the decoded
function survives more noise.
"""

import math

import numpy as np

from latcf import (
    LinearCode,
    PrimeField,
    SimConfig,
    best_coefficients,
    computation_rate,
    construction_pi_a,
    make_pair,
    mmse_alpha,
    run_trials,
)

# ---------------------------------------------------------------------------
# the rate formula on a matched channel: h = a = (1,1)

h = np.array([1.0 + 0j, 1.0 + 0j])
for P in (1, 4, 16, 64):
    r = computation_rate(h, [1, 1], P)
    print(f"P={P:3d}  R(h=(1,1), a=(1,1)) = {r:.6f} bits")

# a single source against a unit channel recovers log2(1+P)
print("single source, P=15:", computation_rate([1 + 0j], [1], 15), "=", math.log2(16))

# ---------------------------------------------------------------------------
# exhaustive coefficient search adapts a to the channel

rng = np.random.default_rng(12)
h = (rng.standard_normal(2) + 1j * rng.standard_normal(2)) / math.sqrt(2)
print("\nrandom channel h =", np.round(h, 3))
for P in (1.0, 10.0, 100.0):
    best = best_coefficients(h, P)
    alpha = mmse_alpha(h, best.a, P)
    print(f"  P={P:6.1f}  best a={best.a}  rate={best.rate:.4f}  alpha={alpha:.3f}")

# ---------------------------------------------------------------------------
# Monte Carlo: decode failure rate falls as power grows

fine = construction_pi_a(
    [LinearCode(PrimeField(2), [[1, 1]]), LinearCode(PrimeField(3), [[1, 1]])]
)
H = np.array([[1.02 + 0.05j, 0.98 - 0.05j]])  # nearly integer channel row
trials = 1500
print(f"\nfixed H = {np.round(H[0], 3)}, {trials} trials per point")
for P in (1.0, 4.0, 16.0, 64.0):
    config = SimConfig(pair=make_pair(fine, P), K=2, M=1, P=P, fixed_H=H)
    records = run_trials(config, trials, seed=2024)
    fail = 1.0 - sum(r.decode_ok for r in records) / len(records)
    bar = "#" * int(50 * fail)
    print(f"  P={P:5.0f}  failure {fail:6.3f}  {bar}")
