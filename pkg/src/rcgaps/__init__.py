"""Restricted counting over nongappy target sets, checked at desk scale."""

from .constset import (ConstantTable, acceptance_value, build_constant_table,
                       check_table_invariants, verify_length_bounds)
from .errors import (BitCapError, CeilingError, DomainError, EnumerationCapError, SpecError,
                     TableRangeError)
from .gapscan import (Family, GapFunction, Variant, mersenne_density_report, parse_gap,
                      successor_length_profile, verify_nongappy)
from .machinesim import (ChoiceMachine, Mode, count_accepting, count_transformed,
                         make_planted_machine, rc_transform, verify_rc_membership)
from .starfns import (AmbiguityBudget, BudgetFamily, TheoremCheckSpec, budget_eval,
                      check_growth_bound, check_ilog_bounds, check_meta_conditions,
                      check_separation, log_circled_star, log_star, parse_budget, s_frak,
                      slog2, tetration2, tower)
from .targetset import Kind, TargetSet, from_name, load_target_set, lucas_lehmer

__version__ = "0.1.0"
