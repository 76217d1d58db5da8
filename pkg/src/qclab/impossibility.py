"""Infeasibility of o(1)-consistent symmetric interface stencils.

For an interface block of m atoms (indices 1..m, continuum to the left,
atomistic to the right), the consistency equations against the atomistic
second-neighbor operator form an integer linear system in the m(m+1)/2
symmetric block unknowns. Entries outside the block are pinned by symmetry
with the pure rows: continuum values for columns j < 1, atomistic values for
j > m. All quantities are in dimensionless second-neighbor (L2) units, with
pure stencils

    atomistic  (-1, 0, 2, 0, -1)      continuum  (0, -4, 8, -4, 0).

The weighted sum with multipliers i^2 on the p=j equation and -i on the
p=j^2 equation of row i cancels every block unknown exactly and evaluates to
-2, an exact-arithmetic witness that no symmetric block satisfies the
consistency equations. The least-squares defect over those same equations
quantifies the infeasibility and attains the Cauchy-Schwarz lower bound
2/||w||_2.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

ATOM_L2 = {-2: -1, -1: 0, 0: 2, 1: 0, 2: -1}
CONT_L2 = {-2: 0, -1: -4, 0: 8, 1: -4, 2: 0}

POWERS = (0, 1, 2)  # moments against u_j = 1, j, j^2


class CertificateError(RuntimeError):
    """Raised when the weighted combination fails to cancel the unknowns."""


def pair_index(m: int):
    """Ordered unknowns (k, l), k <= l, of the symmetric m x m block."""
    return [(k, l) for k in range(1, m + 1) for l in range(k, m + 1)]


@dataclass(frozen=True)
class ConstraintSystem:
    """Integer system  matrix . x = rhs  over the symmetric block unknowns.

    Rows are ordered (i=1, p=1), (i=1, p=j), (i=1, p=j^2), (i=2, p=1), ...
    The orientation is chosen so that the defect of a candidate block is
    rhs - matrix . x = sum_j (L^qc - L^a)_{ij} p(j), matching the moment
    reports of the operator module row by row.
    """

    m: int
    reach: int
    matrix: np.ndarray   # (3m, m(m+1)/2) integers
    rhs: np.ndarray      # (3m,) integers

    @property
    def unknown_pairs(self):
        return pair_index(self.m)

    def row_label(self, row: int):
        return row // 3 + 1, POWERS[row % 3]

    def block_to_vector(self, block: np.ndarray) -> np.ndarray:
        blk = np.asarray(block, dtype=float)
        return np.array([blk[k - 1, l - 1] for k, l in self.unknown_pairs])

    def vector_to_block(self, x: np.ndarray) -> np.ndarray:
        blk = np.zeros((self.m, self.m))
        for val, (k, l) in zip(x, self.unknown_pairs):
            blk[k - 1, l - 1] = val
            blk[l - 1, k - 1] = val
        return blk

    def defect(self, x: np.ndarray) -> np.ndarray:
        """Moment defects sum_j (L^qc - L^a)_{ij} p(j) at candidate x."""
        return self.rhs - self.matrix @ np.asarray(x, dtype=float)

    def consistency_rows(self) -> np.ndarray:
        """Row indices of the p in {j, j^2} equations (Eq. cons2)."""
        return np.array([r for r in range(3 * self.m) if r % 3 != 0])


def build_constraint_system(m: int, reach: int = 2) -> ConstraintSystem:
    """Assemble the consistency equations for an m-atom symmetric block.

    Columns run over j = 1-reach .. m+reach; for reach 2 this is the
    j = -1 .. m+2 bookkeeping of the second-neighbor problem. Larger reach
    only widens the pinned (zero) margins.
    """
    if m < 1:
        raise ValueError(f"m must be positive, got {m}")
    if reach < 2:
        raise ValueError(f"reach must be at least 2, got {reach}")
    pairs = pair_index(m)
    col_of = {pair: idx for idx, pair in enumerate(pairs)}
    n_rows = 3 * m
    A = np.zeros((n_rows, len(pairs)), dtype=np.int64)   # coefficient of x in defect
    c = np.zeros(n_rows, dtype=np.int64)                 # fixed part of defect
    for i in range(1, m + 1):
        for ip, p in enumerate(POWERS):
            row = 3 * (i - 1) + ip
            for j in range(1 - reach, m + reach + 1):
                off = j - i
                la = ATOM_L2.get(off, 0)
                if 1 <= j <= m:
                    A[row, col_of[(min(i, j), max(i, j))]] += j**p
                    c[row] -= la * j**p
                elif j < 1:
                    c[row] += (CONT_L2.get(off, 0) - la) * j**p
                # j > m: pinned atomistic, (L^a - L^a) = 0
    # defect(x) = A x + c  ==  rhs - matrix x  with matrix = -A, rhs = c
    return ConstraintSystem(m=m, reach=reach, matrix=-A, rhs=c)


def certificate_weights(m: int):
    """Multiplier i^2 on the p=j equation and -i on the p=j^2 equation of
    row i; zero on the p=1 equations."""
    w = [Fraction(0)] * (3 * m)
    for i in range(1, m + 1):
        w[3 * (i - 1) + 1] = Fraction(i * i)
        w[3 * (i - 1) + 2] = Fraction(-i)
    return w


@dataclass(frozen=True)
class Certificate:
    """Exact weighted-sum infeasibility witness.

    weights . matrix = 0 (all block unknowns cancel) while weights . rhs =
    value != 0, so no symmetric block solves the system. weight_norm_sq =
    sum_i (i^4 + i^2) gives the residual lower bound |value|/sqrt(...).
    """

    m: int
    weights: tuple
    value: Fraction
    weight_norm_sq: int

    @property
    def residual_lower_bound(self) -> float:
        return float(abs(self.value)) / float(self.weight_norm_sq) ** 0.5


def certificate(m: int, reach: int = 2) -> Certificate:
    """Compute the weighted combination of the consistency equations in exact
    rational arithmetic and verify that every unknown cancels."""
    system = build_constraint_system(m, reach=reach)
    w = certificate_weights(m)
    n_rows, n_cols = system.matrix.shape
    for col in range(n_cols):
        s = sum(w[r] * int(system.matrix[r, col]) for r in range(n_rows))
        if s != 0:
            pair = system.unknown_pairs[col]
            raise CertificateError(
                f"unknown {pair} does not cancel (coefficient {s}); assembly bug"
            )
    value = sum(w[r] * int(system.rhs[r]) for r in range(n_rows))
    norm_sq = sum(i**4 + i**2 for i in range(1, m + 1))
    return Certificate(m=m, weights=tuple(w), value=value, weight_norm_sq=norm_sq)


@dataclass(frozen=True)
class MinResidualResult:
    m: int
    residual: float
    stencil: object          # InterfaceStencil, or a raw block when unsymmetric
    symmetric: bool


def min_residual(m: int, symmetric: bool = True, reach: int = 2) -> MinResidualResult:
    """Least-squares minimizer of the consistency defect (Eq. cons2 rows,
    p in {j, j^2}) over interface blocks; the residual is its Euclidean norm.

    With the symmetry constraint the residual is strictly positive and attains
    the certificate bound; dropping it (diagnostic mode) admits exact
    solutions such as the force-based (QCF) interface rows.
    """
    from .models import InterfaceStencil

    system = build_constraint_system(m, reach=reach)
    rows = system.consistency_rows()
    if symmetric:
        M = system.matrix[rows].astype(float)
        rhs = system.rhs[rows].astype(float)
        x, *_ = np.linalg.lstsq(M, rhs, rcond=None)
        res = float(np.linalg.norm(M @ x - rhs))
        return MinResidualResult(
            m=m, residual=res, stencil=InterfaceStencil(m, system.vector_to_block(x)),
            symmetric=True,
        )
    # free m x m block: build the unsymmetrized coefficient matrix directly
    Mf = np.zeros((len(rows), m * m))
    rhsf = np.zeros(len(rows))
    for rr, row in enumerate(rows):
        i, p = system.row_label(int(row))
        for j in range(1 - reach, m + reach + 1):
            off = j - i
            la = ATOM_L2.get(off, 0)
            if 1 <= j <= m:
                Mf[rr, (i - 1) * m + (j - 1)] -= j**p
                rhsf[rr] -= la * j**p
            elif j < 1:
                rhsf[rr] += (CONT_L2.get(off, 0) - la) * j**p
    x, *_ = np.linalg.lstsq(Mf, rhsf, rcond=None)
    res = float(np.linalg.norm(Mf @ x - rhsf))
    return MinResidualResult(
        m=m, residual=res, stencil=x.reshape(m, m), symmetric=False
    )


def qcf_witness_block(m: int) -> np.ndarray:
    """Unsymmetric block realizing zero defect for m >= 4: the first two rows
    are pure continuum stencils, the last two pure atomistic, so every row's
    moments vanish and the pinned off-block entries are matched exactly."""
    if m < 4:
        raise ValueError("the force-based witness needs m >= 4")
    block = np.zeros((m, m))
    for i in range(1, m + 1):
        native = CONT_L2 if i <= m // 2 else ATOM_L2
        if i <= 2:
            native = CONT_L2
        if i >= m - 1:
            native = ATOM_L2
        for j in range(1, m + 1):
            block[i - 1, j - 1] = native.get(j - i, 0)
    return block
