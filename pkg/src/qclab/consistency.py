"""Consistency of coupled operators against the atomistic reference.

Three instruments: row-wise polynomial moment residuals (the tests against
u_j = 1, j, j^2, evaluated with unwrapped absolute indices because those test
vectors are local, infinite-chain statements), ghost-force extraction, and
smooth-field residual sweeps over a ladder of chain sizes with a fitted
log-log exponent of residual versus eps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain import ChainConfig, PeriodicField, sample_field
from .models import LinearChainOperator, ModelKind, apply, assemble_operator
from .potentials import PairPotential
from .regions import RegionPartition


def default_witness(x):
    """Smooth 1-periodic probe; the phase keeps the curvature nonzero at the
    default interface locations x = 1/2 and x = 1."""
    return np.sin(2.0 * np.pi * np.asarray(x) + 0.3)


@dataclass(frozen=True)
class MomentReport:
    """Per-row residuals sum_j (L - L^a)_{ij} p(j) for p in {1, j, j^2}.

    residuals has shape (N, 3), columns ordered by the power of j, values in
    eps^2-scaled stencil units; row i uses absolute indices j = i + offset.
    """

    config: ChainConfig
    residuals: np.ndarray

    def max_abs(self, power: int) -> float:
        return float(np.abs(self.residuals[:, power]).max())

    def nonzero_rows(self, tol: float = 1e-11) -> np.ndarray:
        """1-based atoms where any of the three residuals exceeds tol."""
        return np.nonzero(np.abs(self.residuals).max(axis=1) > tol)[0] + 1


def moment_residuals(op: LinearChainOperator, reference: LinearChainOperator) -> MomentReport:
    """Moment test of op against a reference operator on the same chain."""
    if op.config.N != reference.config.N:
        raise ValueError("operators live on different chain sizes")
    N = op.config.N
    K = max(op.half_width, reference.half_width)
    if N < 2 * (2 * K + 2):
        raise ValueError("chain too short for unwrapped moment tests")

    def widen(o: LinearChainOperator) -> np.ndarray:
        pad = K - o.half_width
        if pad == 0:
            return o.band
        return np.pad(o.band, ((0, 0), (pad, pad)))

    delta = widen(op) - widen(reference)
    atoms = np.arange(1, N + 1)[:, None]
    offsets = np.arange(-K, K + 1)[None, :]
    j_abs = atoms + offsets
    res = np.stack(
        [np.sum(delta * j_abs**p, axis=1) for p in (0, 1, 2)],
        axis=1,
    )
    return MomentReport(op.config, res)


def ghost_force(
    kind: ModelKind,
    config: ChainConfig,
    potential: PairPotential,
    partition: RegionPartition | None = None,
):
    """Ghost field (scaled force at u = 0) and its sup norm."""
    op = assemble_operator(kind, config, potential, partition=partition)
    field = PeriodicField(config, op.ghost)
    return field, float(np.abs(op.ghost).max())


@dataclass(frozen=True)
class SweepResult:
    """Residual-versus-eps ladder with fitted exponent (slope of log residual
    against log eps) and the r^2 of that fit."""

    kind: ModelKind
    points: tuple          # ((N, residual_sup), ...)
    exponent: float
    r_squared: float


def consistency_sweep(
    kind: ModelKind,
    f,
    N_list,
    potential: PairPotential,
    partition: RegionPartition | None = None,
    F: float = 1.2,
) -> SweepResult:
    """Sample u = f on each chain, measure ||L^kind u - L^a u||_inf (ghost
    terms included) and fit the exponent of residual vs eps."""
    from .convergence import fit_slope

    kind = ModelKind(kind)
    N_list = [int(N) for N in N_list]
    if any(b <= a for a, b in zip(N_list, N_list[1:])):
        raise ValueError("N_list must be strictly increasing")
    pts = []
    for N in N_list:
        config = ChainConfig(N=int(N), F=F, R=2)
        u = sample_field(f, config)
        op_kind = assemble_operator(kind, config, potential, partition=partition)
        op_atom = assemble_operator(ModelKind.ATOMISTIC, config, potential)
        resid = apply(op_kind, u).values - apply(op_atom, u).values
        pts.append((int(N), float(np.abs(resid).max())))
    slope, _, r2 = fit_slope([(1.0 / N, r) for N, r in pts])
    return SweepResult(kind=kind, points=tuple(pts), exponent=slope, r_squared=r2)
