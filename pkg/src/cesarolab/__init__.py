"""Numerical laboratory for operator boundedness taxonomy and linear dynamics.

Construct weighted shifts, block operators and diagonal-plus-nilpotent
matrices on sequence spaces; compute power orbits, exact power norms and
Cesàro means; and run probes for power/Cesàro/Kreiss-type boundedness,
m-isometry structure, mixing and chaos criteria, ergodicity, and numerical
hypercyclicity.
"""

from . import classify, core, dynamics, isometry, powers, zoo
from .core import (
    AllIntegers,
    BackwardShift,
    BilateralShift,
    BlockTZ,
    Diagonal,
    DiagPlusNilpotent,
    DirectSum,
    DuplicatingShift,
    Explicit,
    FiniteMatrix,
    FiniteRange,
    INTS,
    NAT,
    NatFromOne,
    OperatorSpec,
    PairVec,
    PolyRatio,
    Polynomial,
    PowerRatio,
    ScalarMultiple,
    SparseVec,
    adjoint,
    apply,
    basis_vector,
    identity,
    inner,
    make_vector,
    p_norm,
    pair_vector,
    scale,
    weight_at,
)
from .powers import (
    NormSeq,
    block_tz_power_check,
    cesaro_apply,
    cesaro_operator_norm,
    media_residual,
    orbit_norms,
    power_apply,
    power_norm_exact,
)

__version__ = "0.1.0"
