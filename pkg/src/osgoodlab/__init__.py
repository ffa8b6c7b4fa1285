"""osgoodlab: numerical laboratory for the modulus-of-continuity threshold
in backward parabolic uniqueness.

The package builds and cross-checks, at desk scale, the constructive
objects on both sides of the threshold: weight functions generated by a
divergent reciprocal-modulus integral, dyadic frequency estimates and
commutator bounds used with them, time mollification of modulus-regular
coefficients, and the explicit glued-mode solution that destroys backward
uniqueness when the integral converges.
"""

from .modulus import (Modulus, OsgoodClass, make_builtin, modulus_from_name,
                      osgood_integral, check_remark1, normalize_sqrt_cap)
from .carleman import (WeightTable, build_phi, build_Phi, build_weight_table,
                       invert_phi, weight_value, weight_table_report,
                       CarlemanProbeConfig, CarlemanProbeReport, probe_carleman)
from .dyadic import (GridField, DyadicPartition, lp_block, lp_reconstruct,
                     check_almost_orthogonality, check_bernstein, commutator,
                     commutator_gradient_ratio, probe_commutator_bound,
                     multiplier_locality_gap, random_band_limited)
from .mollify import (MollifierKernel, TimeFunction, make_kernel,
                      make_mu_sawtooth, mollify_in_time,
                      verify_mollifier_bounds)
from .pliss import (CutoffFamily, PlissSequences, PlissConstruction,
                    Orientation, PointEval, make_cutoffs, build_sequences,
                    choose_k0, build_construction, eval_solution, eval_fields,
                    eval_l, eval_lower_order, l_time_function,
                    l_from_sequences, verify_conditions,
                    verify_cmu_regularity, export_construction)
from .report import CheckRow, VerificationReport, merge_reports

__version__ = "0.1.0"
