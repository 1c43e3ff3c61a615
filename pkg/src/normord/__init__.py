"""Exact moments, certified Euler products and normal-order diagnostics
for Euler's totient and related multiplicative functions."""

from .analyzer import (NO_NORMAL_ORDER_CERTIFIED, UNRESOLVED, ClassMReport, DensityReport,
                       DMomentFit, TuranReport, VarianceReport, centered_variance, certified_slope,
                       class_m_verdict, d_moment_fit, density_profile, direct_centered_sum,
                       estimate_moment_constants, exceptional_density, turan_statistic)
from .errors import CapacityError, FitQualityError, PrecisionError
from .euler import EulerProductConstant, constant_A, constant_B, criterion_margin
from .identities import (g, g_bound_check, mobius_ratio, squared_identity_check,
                         verify_identities)
from .interval import Interval
from .moments import (MomentKind, MomentSeries, RemainderProfile, checkpoint_schedule,
                      hyperbola_divisor_sum, moment_sum, moment_sums, remainder_profile)
from .sieve import (FunctionId, Segment, SieveTable, brute_oracle, build_table, dump_table,
                    iter_segments, load_table, primes_up_to, stream_segments)

__version__ = "0.1.0"
