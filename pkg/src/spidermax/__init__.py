"""Maximal operators on k-ray spider domains, sharp constants, and
Doob-type maximal bounds for unions of filtrations.

Exact piecewise algebra (rational backend) backs the oracles and identity
checks; a compiled kernel (with a pure NumPy fallback) drives the
double-precision norm sweeps.
"""

from .constants import (SharpConstant, constant_convergence,
                        lp_operator_norm_constant, power_law_constant)
from .covering import (SelectionResult, filter_containments,
                       multiplicity_audit, select, union_traces)
from .filtration import (FiltrationUnion, FiniteProbSpace, PartitionChain,
                         Rv, TailChecker, conditional_expectation,
                         doob_maximal, doob_ratio, enumerate_unions,
                         verify_tail)
from .maximal import (MaximalOperator, compute, compute_radially_decreasing,
                      eval_at, level_measure_exact, operator_ratio,
                      restricted_integral_exact, superlevel_exact)
from .rearrange import (DistributionFunction, decreasing_rearrangement,
                        distribution_function, rearrange_step)
from .spider import (Ball, MobiusPiece, PiecewiseMobius, SpiderPoint,
                     StepFunction, ball_measure, ball_trace, integrate,
                     integrate_over, level_measure, lp_norm, lp_norm_report,
                     measure, restricted_integral)
from .verify import (InequalityReport, PowerLawInstance,
                     build_power_law_instance, check_level_average_identity,
                     check_lp_polynomial_bound, check_weak_type,
                     delta_for_epsilon, sharpness_sweep)

__version__ = "0.1.0"
