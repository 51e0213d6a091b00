"""Dual frames, erasure error averages and optimal-dual search for finite frames."""

__version__ = "0.1.0"

from .errors import (
    DimensionMismatch,
    DualFrameError,
    HypothesisViolated,
    InvalidDimensions,
    NoConvergence,
    NotADual,
    NotHermitian,
    NotOneUniform,
    PatternBudgetExceeded,
    SingularFrameOperator,
    UnknownCheckId,
)
from .frames import (
    DualPair,
    Frame,
    canonical_dual,
    construct,
    explicit,
    frame_operator,
    harmonic,
    mercedes_benz,
    random_frame,
    simplex,
)
from .charts import DualChart, dual_from_parameter, make_chart, parameter_from_dual
from .metrics import AverageErrorSpec, ErasurePattern, ErrorReport, Measure, average_error
from .optimize import Certificate, Method, OptimizeConfig, OptimizeResult
from .lab import TheoremCheck, run_check, run_suite
