"""Numerical toolkit for compact quantum metric spaces built from fusion rules."""

__version__ = "0.1.0"

from .fusion import (AxiomReport, FusionAlgebra, FusionError, GroupOracle, WindowError,
                     build_group_dual, build_product, build_su2_like, check_associativity,
                     dump_fusion_file, load_fusion_file, validate_axioms)
from .length import (LengthFunction, fit_growth_order, folner_boundary, folner_ratio_curve,
                     growth_envelope, shell_profile, validate_length, word_length)
from .dirac import (Element, left_regular_matrix, lip_seminorm, operator_norm, rd_scan,
                    tail_bound_check, truncated_seminorm, weighted_norm)
from .multipliers import (MultiplierState, apply_multiplier, contraction_check,
                          folner_multiplier, positive_definite_check, state_eval)
from .metrics import (cs_certificate, convergence_study, mk_lower_bound, rieffel_delta)
