"""Orbit-closed C-numerical ranges of operator models.

Operators are modelled as a finite complex block plus a diagonal tail whose
entries cluster at finitely many values.  The package computes support
functions of the range for positive trace-class ``C``, the closure as a hull
of truncated ranges, closedness verdicts, and brute-force finite checks.
"""

from .errors import ConfigError, DomainError, NotAMemberError, OrbitRangeError, RepresentationError
from .seq import (
    Comparison, GeometricTail, SelfadjointSpectrum, SpectrumSeq, greedy_interpolant,
    is_majorized, is_submajorized, rank2_reduce, tail_sum, truncate, truncate_signed,
)
from .opmodel import (
    BlockSlot, OperatorModel, SelfadjointModel, TailEntryFamily, TailSlot, count_at_least,
    ess_range, ess_sup, hermitian_eigen, positive_part_spectrum, rotate_real_part,
)
from .ranges import ConvexRegion2D, SupportValue, k_range, region, selfadjoint_interval, sup_pairing, support
from .closure import (
    ChainReport, DecompositionWitness, chain_check, closure_rhs, decompose_point,
    rank_condition_certificate, submajorized_point_set, verify_main_theorem,
)

__version__ = "0.1.0"
