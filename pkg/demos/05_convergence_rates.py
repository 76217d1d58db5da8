"""Convergence-rate ceiling: w^{1,p} errors of the quasinonlocal coupling.

Solving L^qnl u_qc = L^a u for a smooth witness u and measuring the strain
error ||D(u - u_qc)||_p across chain sizes shows rates eps^{1 + 1/p}: slope 2
for p = 1, 1.5 for p = 2, 1 for p = inf. The O(1) interface inconsistency
makes these rates a ceiling for every energy-based coupling with a
finite-width interface.

Run:  python demos/05_convergence_rates.py
"""

import math

from qclab import (
    ModelKind,
    RegionPartition,
    convergence_study,
    default_witness,
    harmonic,
)

part = RegionPartition([(0.0, 0.5)], interface_width_m=4, reach=2)
pot = harmonic(k=1.0, s0=1.0)
p_list = [1, 2, math.inf]

table = convergence_study(
    ModelKind.QNL,
    default_witness,
    [2**k for k in range(6, 14)],
    p_list,
    pot,
    partition=part,
)

for p in p_list:
    label = "inf" if p == math.inf else str(p)
    print(f"||D e||_p for p = {label}:")
    for N, err in table.norms(p):
        print(f"   N = {N:5d}   error = {err:12.6e}")
    slope, _, r2 = table.fits[p]
    print(f"   slope {slope:.4f} vs expected {1 + 1 / p:.2f} (r^2 = {r2:.5f})\n")

print("per-size sanity certificates (exact inequalities):")
for c in table.checks:
    print(f"   N = {c.N:5d}: ||L e||_inf <= (C/eps)||De||_inf holds: {c.chain_ok}; "
          f"norm equivalence holds: {c.norm_equiv_ok}")

print("\nThe lower bound ||De||_p >= c eps^{1+1/p} follows from the O(1)")
print("interface defect and the strain-form bound ||L v||_inf <= (C/eps)||Dv||_inf;")
print("the measured slopes show the quasinonlocal coupling attains it.")
