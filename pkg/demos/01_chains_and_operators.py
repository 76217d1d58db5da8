"""Tour of the basic objects: periodic chains, fields, energies, operators.

Run:  python demos/01_chains_and_operators.py
"""

import numpy as np

from qclab import (
    ChainConfig,
    ModelKind,
    RegionPartition,
    apply,
    assemble_operator,
    difference,
    harmonic,
    lp_norm,
    sample_field,
    symmetry_defect,
    to_strain_form,
    total_energy,
    zeros,
)

# A periodic chain of 32 atoms at deformation gradient F = 1.2, with
# second-neighbor interactions. epsilon = 1/N is derived, never stored.
config = ChainConfig(N=32, F=1.2, R=2)
pot = harmonic(k=1.0, s0=1.0)
print(f"chain: N={config.N}, eps={config.epsilon}, F={config.F}, R={config.R}")

# Sample a smooth displacement and look at its discrete calculus.
u = sample_field(lambda x: np.sin(2 * np.pi * x), config)
du = difference(u, 1, 1)      # backward strain (u_i - u_{i-1})/eps
d2u = difference(u, 1, 2)     # centered second difference
print(f"||u||_inf = {lp_norm(u, np.inf):.4f}, ||Du||_inf = {lp_norm(du, np.inf):.4f}, "
      f"||D^2 u||_inf = {lp_norm(d2u, np.inf):.2f}")

# Energies at the uniform state vanish relative to the ground state only for
# the reference spacing; at F = 1.2 both shells are stretched.
e_atom = total_energy(ModelKind.ATOMISTIC, config, pot, zeros(config))
e_cont = total_energy(ModelKind.CONTINUUM, config, pot, zeros(config))
print(f"uniform-state energies: atomistic {e_atom:.6f}, continuum {e_cont:.6f} "
      "(Cauchy-Born is exact at uniform strain)")

# Linearized operators. Rows are stored in eps^2-scaled units so the interior
# stencils are small integers for unit moduli.
op_atom = assemble_operator(ModelKind.ATOMISTIC, config, pot)
op_cont = assemble_operator(ModelKind.CONTINUUM, config, pot)
print("atomistic interior row:", op_atom.row(10)[1])
print("continuum interior row:", op_cont.row(10)[1])

# A coupled chain: atomistic on (0, 1/2], continuum elsewhere.
part = RegionPartition([(0.0, 0.5)], interface_width_m=4, reach=2)
op_qnl = assemble_operator(ModelKind.QNL, config, pot, partition=part)
print("QNL rows across the interface (atoms 15..20):")
for i in range(15, 21):
    print(f"  atom {i:2d}: {op_qnl.row(i)[1]}")
print(f"QNL symmetry defect: {symmetry_defect(op_qnl):.1e} (energy-based => symmetric)")

# Operators in strain form: L u = Ltilde D u, the factorization behind the
# stability constant in the error bound.
sf = to_strain_form(op_qnl)
print(f"strain-form stability constant bound_C = {sf.bound_C}")

# Applying the operator to the sampled field.
lu = apply(op_qnl, u)
print(f"||L u||_inf = {lp_norm(lu, np.inf):.2f}")
