"""Simulation laboratory for nonideal two-branch spin-1/2 beam splitting.

The closed-form layer (`params`, `packets`, `metrics`, `signaling`)
evaluates branch overlaps, the distinguishability/overlap constraint and
remote-expectation shifts exactly; the grid layer (`solver`, `validation`)
cross-checks the same quantities with a split-step integrator.  `sweep`,
`config` and `cli` wrap both in a reproducible file-based workflow.
"""

from .config import SweepConfig, load_config, parse_range
from .errors import (BoxSizeError, ConfigError, ConvergenceError,
                     ForbiddenRegimeError, NormDriftError,
                     QuadratureConvergenceError, SGLabError)
from .metrics import (ConstraintVerdict, HalfPlaneProbs, MetricsRecord,
                      QuadratureSpec, Regime, SaturationResult, SchwarzResult,
                      cauchy_schwarz, check_constraint, half_plane_probs,
                      half_plane_probs_quadrature, inner_product_closed,
                      inner_product_complex, inner_product_numeric,
                      M_saturated, m_saturated_log, metrics_record,
                      overlap_M_closed, overlap_M_numeric, overlap_m_log,
                      saturation_time)
from .packets import (Branch, GaussianFactor, branch_factors, complex_width,
                      initial_packet, packet_center, peak_momentum, psi_at_exit,
                      psi_free)
from .params import (DerivedParams, SGParams, derive, from_groups, natural,
                     neutron, to_natural)
from .signaling import (AuditReport, SignalReport, SpinObservable, delta,
                        delta_max_exact, expectation_sg, expectation_sg_sf,
                        max_delta_over_directions, signaling_audit)
from .solver import (FieldMode, FieldModel, GridSpec, SpinorField,
                     SplitStepSolver, load_snapshot, save_snapshot)
from .sweep import (COLUMNS, PLOTDATA_FILES, SCHEMA_LINE, SchwarzTrials,
                    SweepRow, SweepSummary, compute_rows, emit_plotdata,
                    run_schwarz_trials, run_sweep, summarize)
from .validation import (CheckResult, ValidationConfig, ValidationReport,
                         run_solver_validation)

__version__ = "0.1.0"

__all__ = [
    "COLUMNS", "PLOTDATA_FILES", "SCHEMA_LINE",
    "AuditReport", "BoxSizeError", "Branch", "CheckResult", "ConfigError",
    "ConstraintVerdict", "ConvergenceError", "DerivedParams", "FieldMode",
    "FieldModel", "ForbiddenRegimeError", "GaussianFactor", "GridSpec",
    "HalfPlaneProbs", "M_saturated", "MetricsRecord", "NormDriftError",
    "QuadratureConvergenceError", "QuadratureSpec", "Regime",
    "SGLabError", "SGParams", "SaturationResult", "SchwarzResult",
    "SchwarzTrials", "SignalReport", "SpinObservable", "SpinorField",
    "SplitStepSolver", "SweepConfig", "SweepRow", "SweepSummary",
    "ValidationConfig", "ValidationReport", "branch_factors",
    "cauchy_schwarz", "check_constraint", "complex_width", "compute_rows",
    "delta", "delta_max_exact", "derive", "emit_plotdata", "expectation_sg",
    "expectation_sg_sf", "from_groups", "half_plane_probs",
    "half_plane_probs_quadrature", "initial_packet", "inner_product_closed",
    "inner_product_complex", "inner_product_numeric", "load_config",
    "load_snapshot", "m_saturated_log", "max_delta_over_directions",
    "metrics_record", "natural", "neutron", "overlap_M_closed",
    "overlap_M_numeric", "overlap_m_log", "packet_center", "parse_range",
    "peak_momentum", "psi_at_exit", "psi_free", "run_schwarz_trials",
    "run_solver_validation", "run_sweep", "saturation_time", "save_snapshot",
    "signaling_audit", "summarize", "to_natural",
]
