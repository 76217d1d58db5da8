"""Chain models: nonlinear energies and linearized operators with ghost terms.

Energy-based kinds (atomistic, continuum, QCE, QNL) are described by a table
of bond terms w * eps * phi(r F + g.u / eps), where g is a small integer
difference pattern. Everything else derives from that table:

  total energy     sum of the bond terms, evaluated nonlinearly
  energy gradient  (1/eps) dE/du, the residual form of the model
  linear operator  (1/eps) Hessian of E at u = 0, i.e. the operator whose
                   uniform rows are -(sum_r r^2 phi''(rF) D_r^2) in the
                   second-neighbor case
  ghost field      (1/eps) grad E at u = 0 (nonzero only for QCE)

Operators store their rows in eps^2-scaled dimensionless units (integer or
small-rational entries for unit moduli); application divides by eps^2. The
force-based QCF and the parametric interface-stencil model are assembled
directly from closed-form rows and carry no energy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .chain import ChainConfig, PeriodicField
from .potentials import PairPotential, evaluate
from .regions import (
    RegionPartition,
    block_atoms,
    classify,
    membership_mask,
    region_boundaries,
)


class ModelKind(str, Enum):
    ATOMISTIC = "atomistic"
    CONTINUUM = "continuum"
    QCE = "qce"
    QNL = "qnl"
    QCF = "qcf"
    CUSTOM = "custom"


ENERGY_BASED = frozenset(
    {ModelKind.ATOMISTIC, ModelKind.CONTINUUM, ModelKind.QCE, ModelKind.QNL}
)
COUPLED = frozenset({ModelKind.QCE, ModelKind.QNL, ModelKind.QCF, ModelKind.CUSTOM})

# Second-neighbor (L2) interface stencils in dimensionless L2 units, and the
# first-neighbor row shared by every model: (L1 u)_j = -eps^2 D^2 u_j.
L1_ROW = {-1: -1.0, 0: 2.0, 1: -1.0}
ATOM_L2_ROW = {-2: -1.0, 0: 2.0, 2: -1.0}
CONT_L2_ROW = {-1: -4.0, 0: 8.0, 1: -4.0}


@dataclass(frozen=True)
class InterfaceStencil:
    """Symmetric m x m block of second-neighbor interface coefficients."""

    m: int
    block: np.ndarray

    def __init__(self, m: int, block):
        blk = np.asarray(block, dtype=float).copy()
        if blk.shape != (m, m):
            raise ValueError(f"expected a {m}x{m} block, got {blk.shape}")
        if not np.array_equal(blk, blk.T):
            raise ValueError("interface stencil block must be exactly symmetric")
        blk.flags.writeable = False
        object.__setattr__(self, "m", int(m))
        object.__setattr__(self, "block", blk)


@dataclass(frozen=True)
class LinearChainOperator:
    """Row-stencil operator (L u)_i = (1/eps^2) sum_k band[i, K+k] u_{i+k} + ghost_i.

    band rows are eps^2-scaled and indexed by offset k in -K..K; ghost is the
    affine term at u = 0 in force units.
    """

    config: ChainConfig
    kind: ModelKind
    band: np.ndarray
    ghost: np.ndarray

    def __post_init__(self):
        self.band.flags.writeable = False
        self.ghost.flags.writeable = False

    @property
    def half_width(self) -> int:
        return (self.band.shape[1] - 1) // 2

    def row(self, i: int):
        """Offsets and eps^2-unit coefficients of the stencil at atom i (1-based)."""
        K = self.half_width
        return np.arange(-K, K + 1), self.band[(i - 1) % self.config.N]

    def row_sums(self) -> np.ndarray:
        return self.band.sum(axis=1)

    def dense(self) -> np.ndarray:
        """Dense realization including the 1/eps^2 scale (small N only)."""
        N = self.config.N
        if N > 4096:
            raise ValueError(f"dense realization refused for N={N} > 4096")
        K = self.half_width
        A = np.zeros((N, N))
        idx = np.arange(N)
        for k in range(-K, K + 1):
            A[idx, (idx + k) % N] += self.band[:, K + k]
        return A / self.config.epsilon**2


def apply(op: LinearChainOperator, u):
    """Apply the affine operator: linear part plus ghost field."""
    out = apply_linear(op, u if isinstance(u, np.ndarray) else u.values) + op.ghost
    if isinstance(u, PeriodicField):
        return PeriodicField(u.config, out)
    return out


def apply_linear(op: LinearChainOperator, v: np.ndarray) -> np.ndarray:
    """Linear part only, on a raw value array."""
    if len(v) != op.config.N:
        raise ValueError("field length does not match operator size")
    K = op.half_width
    out = np.zeros(op.config.N)
    for k in range(-K, K + 1):
        out += op.band[:, K + k] * np.roll(v, -k)
    return out / op.config.epsilon**2


# ---------------------------------------------------------------------------
# bond-term tables for the energy-based kinds


@dataclass(frozen=True)
class _TermGroup:
    shell: int            # neighbor distance r; bond argument is r F + g.u/eps
    anchors: np.ndarray   # 0-based anchor atoms
    pattern: tuple        # ((offset, coeff), ...) defining g relative to anchor
    weight: float


def _require_partition(kind, partition):
    if partition is None:
        raise ValueError(f"{kind.value} requires a region partition")
    return partition


def _term_groups(kind: ModelKind, config: ChainConfig, partition=None) -> list:
    N, R = config.N, config.R
    everyone = np.arange(N)
    groups = []
    if kind is ModelKind.ATOMISTIC:
        for r in range(1, R + 1):
            groups.append(_TermGroup(r, everyone, ((0, 1.0), (-r, -1.0)), 1.0))
        return groups
    if kind is ModelKind.CONTINUUM:
        for r in range(1, R + 1):
            groups.append(_TermGroup(r, everyone, ((0, float(r)), (-1, -float(r))), 1.0))
        return groups
    if R != 2:
        raise ValueError(f"coupled models are defined for R=2 only, got R={R}")
    mask = membership_mask(_require_partition(kind, partition), config)
    in_a = everyone[mask]
    in_c = everyone[~mask]
    if kind is ModelKind.QCE:
        # Per-atom energies, half of each incident bond; continuum atoms use
        # nearest-neighbor strains (Cauchy-Born) for both shells.
        for r in (1, 2):
            fr = float(r)
            groups.append(_TermGroup(r, in_a, ((0, 1.0), (-r, -1.0)), 0.5))
            groups.append(_TermGroup(r, in_a, ((r, 1.0), (0, -1.0)), 0.5))
            groups.append(_TermGroup(r, in_c, ((0, fr), (-1, -fr)), 0.5))
            groups.append(_TermGroup(r, in_c, ((1, fr), (0, -fr)), 0.5))
        return groups
    if kind is ModelKind.QNL:
        # First neighbors atomistic everywhere; the second-neighbor pair
        # (i-2, i) is an atomistic bond when either endpoint is in A, else it
        # is split into the two overlapping nearest-neighbor halves.
        groups.append(_TermGroup(1, everyone, ((0, 1.0), (-1, -1.0)), 1.0))
        pair_atomistic = mask | np.roll(mask, 2)  # rolled: membership of atom i-2
        nonlocal_pairs = everyone[pair_atomistic]
        local_pairs = everyone[~pair_atomistic]
        groups.append(_TermGroup(2, nonlocal_pairs, ((0, 1.0), (-2, -1.0)), 1.0))
        groups.append(_TermGroup(2, local_pairs, ((-1, 2.0), (-2, -2.0)), 0.5))
        groups.append(_TermGroup(2, local_pairs, ((0, 2.0), (-1, -2.0)), 0.5))
        return groups
    raise ValueError(f"{kind.value} does not derive from an energy")


def total_energy(
    kind: ModelKind,
    config: ChainConfig,
    potential: PairPotential,
    u: PeriodicField,
    partition: RegionPartition | None = None,
) -> float:
    """Scaled total energy sum_terms w * eps * phi(rF + strain)."""
    if kind not in ENERGY_BASED:
        raise ValueError(f"{ModelKind(kind).value} does not derive from an energy")
    v = u.values
    eps = config.epsilon
    total = 0.0
    for g in _term_groups(ModelKind(kind), config, partition):
        s = np.zeros(len(g.anchors))
        for off, c in g.pattern:
            s += c * v[(g.anchors + off) % config.N]
        args = g.shell * config.F + s / eps
        total += g.weight * eps * float(np.sum(evaluate(potential, args, 0)))
    return total


def energy_gradient(
    kind: ModelKind,
    config: ChainConfig,
    potential: PairPotential,
    u: PeriodicField,
    partition: RegionPartition | None = None,
) -> np.ndarray:
    """Scaled gradient (1/eps) dE/du as a raw array; at u = 0 this is the ghost field."""
    if kind not in ENERGY_BASED:
        raise ValueError(f"{ModelKind(kind).value} does not derive from an energy")
    v = u.values
    eps = config.epsilon
    grad = np.zeros(config.N)
    for g in _term_groups(ModelKind(kind), config, partition):
        s = np.zeros(len(g.anchors))
        for off, c in g.pattern:
            s += c * v[(g.anchors + off) % config.N]
        dphi = np.asarray(evaluate(potential, g.shell * config.F + s / eps, 1))
        for off, c in g.pattern:
            np.add.at(grad, (g.anchors + off) % config.N, g.weight * c * dphi)
    return grad / eps


# ---------------------------------------------------------------------------
# operator assembly


def _shell_bands(groups, N: int, R: int, K: int):
    """Per-shell integer band matrices and gradient weight vectors."""
    bands = [np.zeros((N, 2 * K + 1)) for _ in range(R)]
    gweights = [np.zeros(N) for _ in range(R)]
    for g in groups:
        band = bands[g.shell - 1]
        gw = gweights[g.shell - 1]
        for o1, c1 in g.pattern:
            rows = (g.anchors + o1) % N
            np.add.at(gw, rows, g.weight * c1)
            for o2, c2 in g.pattern:
                np.add.at(band, (rows, K + (o2 - o1)), g.weight * c1 * c2)
    return bands, gweights


def _row_band(row_map: dict, rows: np.ndarray, K: int, out: np.ndarray):
    for off, c in row_map.items():
        out[rows, K + off] += c


def assemble_from_moduli(
    kind: ModelKind,
    config: ChainConfig,
    second_derivs,
    first_derivs=None,
    partition: RegionPartition | None = None,
    stencil: InterfaceStencil | None = None,
) -> LinearChainOperator:
    """Assemble with explicit per-shell moduli phi''(rF) (and phi'(rF) for the
    ghost term). The resulting band is linear in the moduli, realizing the
    first/second-neighbor decomposition of the coupled operators exactly.
    """
    kind = ModelKind(kind)
    N, R = config.N, config.R
    second = [float(x) for x in second_derivs]
    first = [0.0] * R if first_derivs is None else [float(x) for x in first_derivs]
    if len(second) != R or len(first) != R:
        raise ValueError(f"need one modulus per shell r=1..{R}")

    if kind in ENERGY_BASED:
        if kind in COUPLED:
            classify(_require_partition(kind, partition), config)  # validates geometry
        groups = _term_groups(kind, config, partition)
        K = R
        bands, gweights = _shell_bands(groups, N, R, K)
        band = np.zeros((N, 2 * K + 1))
        ghost = np.zeros(N)
        for r in range(R):
            band += second[r] * bands[r]
            ghost += first[r] * gweights[r]
        return LinearChainOperator(config, kind, band, ghost / config.epsilon)

    if R != 2:
        raise ValueError(f"coupled models are defined for R=2 only, got R={R}")
    labels = classify(_require_partition(kind, partition), config)
    mask = labels.in_atomistic
    atoms_a = np.nonzero(mask)[0]
    atoms_c = np.nonzero(~mask)[0]

    if kind is ModelKind.QCF:
        K = 2
        band = np.zeros((N, 2 * K + 1))
        l2 = np.zeros_like(band)
        _row_band(L1_ROW, np.arange(N), K, band)
        _row_band(ATOM_L2_ROW, atoms_a, K, l2)
        _row_band(CONT_L2_ROW, atoms_c, K, l2)
        band = second[0] * band + second[1] * l2
        return LinearChainOperator(config, kind, band, np.zeros(N))

    if kind is ModelKind.CUSTOM:
        if stencil is None:
            raise ValueError("custom model requires an InterfaceStencil")
        m = partition.interface_width_m
        if stencil.m != m:
            raise ValueError(
                f"stencil block is {stencil.m}x{stencil.m} but partition has m={m}"
            )
        K = max(2, m + 1)
        band1 = np.zeros((N, 2 * K + 1))
        l2 = np.zeros_like(band1)
        _row_band(L1_ROW, np.arange(N), K, band1)
        _row_band(ATOM_L2_ROW, atoms_a, K, l2)
        _row_band(CONT_L2_ROW, atoms_c, K, l2)
        for boundary in region_boundaries(mask):
            atoms = block_atoms(boundary, m, N)         # block index 1..m -> atom
            direction = 1 if boundary[1] == "CA" else -1
            for i in range(1, m + 1):
                row = atoms[i - 1] - 1
                l2[row, :] = 0.0
                for j in range(1, m + 1):
                    l2[row, K + direction * (j - i)] += stencil.block[i - 1, j - 1]
                for j in (-1, 0):                       # continuum side, j < 1
                    val = CONT_L2_ROW.get(j - i, 0.0)
                    if val:
                        l2[row, K + direction * (j - i)] += val
                for j in (m + 1, m + 2):                # atomistic side, j > m
                    val = ATOM_L2_ROW.get(j - i, 0.0)
                    if val:
                        l2[row, K + direction * (j - i)] += val
        band = second[0] * band1 + second[1] * l2
        return LinearChainOperator(config, kind, band, np.zeros(N))

    raise ValueError(f"cannot assemble kind {kind!r}")


def assemble_operator(
    kind: ModelKind,
    config: ChainConfig,
    potential: PairPotential,
    partition: RegionPartition | None = None,
    stencil: InterfaceStencil | None = None,
) -> LinearChainOperator:
    """Linearize a model at u = 0: linear part (1/eps) Hessian of the energy,
    ghost field (1/eps) grad E(0). QCF/custom are assembled from their
    defining rows and have zero ghost."""
    kind = ModelKind(kind)
    shells = range(1, config.R + 1)
    second = [evaluate(potential, r * config.F, 2) for r in shells]
    first = [evaluate(potential, r * config.F, 1) for r in shells]
    return assemble_from_moduli(
        kind, config, second, first, partition=partition, stencil=stencil
    )


# ---------------------------------------------------------------------------
# strain form and diagnostics


@dataclass(frozen=True)
class StrainFormOperator:
    """Factorization L u = Ltilde D u for shift-invariant, ghost-free operators.

    band holds the coefficients of eps*Ltilde at strain offsets 1-K..K;
    bound_C is the maximal row l1 norm, giving
    ||L v||_inf <= (bound_C / eps) ||D v||_inf.
    """

    config: ChainConfig
    band: np.ndarray
    bound_C: float

    @property
    def offsets(self) -> np.ndarray:
        K = self.band.shape[1] // 2
        return np.arange(1 - K, K + 1)

    def apply_strain(self, du):
        v = du.values if isinstance(du, PeriodicField) else np.asarray(du, float)
        out = np.zeros(self.config.N)
        K = self.band.shape[1] // 2
        for idx, k in enumerate(range(1 - K, K + 1)):
            out += self.band[:, idx] * np.roll(v, -k)
        out /= self.config.epsilon
        if isinstance(du, PeriodicField):
            return PeriodicField(du.config, out)
        return out


def to_strain_form(op: LinearChainOperator, tol: float = 1e-12) -> StrainFormOperator:
    """Rewrite L in terms of backward differences via telescoping.

    Requires zero row sums (shift invariance) and a zero ghost field; the
    coefficient of (Du)_{i+k} collects the stencil weight that telescopes
    across the bond (i+k-1, i+k).
    """
    if np.abs(op.row_sums()).max() > tol:
        raise ValueError("operator has nonzero row sums; no strain form exists")
    if np.abs(op.ghost).max() > tol:
        raise ValueError("operator has a ghost field; no strain form exists")
    N = op.config.N
    K = op.half_width
    sband = np.zeros((N, 2 * K))
    col = {k: idx for idx, k in enumerate(range(1 - K, K + 1))}
    for off in range(-K, K + 1):
        c = op.band[:, K + off]
        if off > 0:
            for k in range(1, off + 1):
                sband[:, col[k]] += c
        elif off < 0:
            for k in range(off + 1, 1):
                sband[:, col[k]] -= c
    bound = float(np.abs(sband).sum(axis=1).max())
    return StrainFormOperator(op.config, sband, bound)


def symmetry_defect(op: LinearChainOperator) -> float:
    """max |L_ij - L_ji| over the dense realization (computed bandwise)."""
    N = op.config.N
    K = op.half_width
    idx = np.arange(N)
    worst = 0.0
    for k in range(-K, K + 1):
        d = np.abs(op.band[idx, K + k] - op.band[(idx + k) % N, K - k]).max()
        worst = max(worst, float(d))
    return worst / op.config.epsilon**2


def hessian_consistency_check(
    kind: ModelKind,
    config: ChainConfig,
    potential: PairPotential,
    partition: RegionPartition | None = None,
    step: float = 1e-5,
) -> float:
    """Worst deviation (in eps^2 stencil units) between the assembled linear
    part and central finite differences of the analytic scaled gradient,
    taken with a strain-sized step eps*step."""
    kind = ModelKind(kind)
    if kind not in ENERGY_BASED:
        raise ValueError(f"{kind.value} does not derive from an energy")
    if config.N > 512:
        raise ValueError("hessian check is a dense diagnostic; use N <= 512")
    op = assemble_operator(kind, config, potential, partition=partition)
    N = config.N
    eps = config.epsilon
    h = eps * step
    fd = np.zeros((N, N))
    base = np.zeros(N)
    for k in range(N):
        for sign in (1.0, -1.0):
            base[k] = sign * h
            g = energy_gradient(kind, config, potential, PeriodicField(config, base), partition)
            fd[:, k] += sign * g
            base[k] = 0.0
    fd /= 2.0 * h
    return float(np.abs(eps**2 * fd - eps**2 * op.dense()).max())
