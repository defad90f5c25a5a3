"""percolab: long-range site percolation laboratory.

Graph families over finite windows, exact structural verification of the
pruned-lattice/slab isomorphism and the hypercubic quotient, and a
Newman-Ziff Monte Carlo engine with a compiled core and a pure-Python
fallback.
"""

from .engine import (
    CanonicalCurve,
    FaceEvent,
    MicrocanonicalCurve,
    ReachEvent,
    SiteConfiguration,
    ThresholdEstimate,
    UnionFindState,
    WrapEvent,
    check_coupling,
    clusters,
    convolve,
    estimate_pc,
    estimate_theta,
    newman_ziff,
    reach_event,
    sample_configuration,
)
from .experiments import EstimateReport, StudyPlan, run_study
from .kernels import BACKEND
from .lattice import GraphView, LatticeSpec, Window, jump_lengths
from .maps import (
    VerificationReport,
    check_isomorphism,
    check_lattice,
    check_quotient,
)

__version__ = "0.1.0"
