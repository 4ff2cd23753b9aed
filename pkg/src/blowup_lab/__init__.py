"""Numerical laboratory for a semilinear wave equation with nonlinear
boundary damping: potential-well constants, initial-data classification,
energy-ledger simulation with blow-up detection, boundary-trace estimate
checks, and (p, m)-plane region sweeps."""

from .dynamics import (DiagnosticsReport, SimControls, State, Trajectory,
                       diagnostics, energy_identity_residual,
                       restart_consistency, simulate, split_run)
from .grid1d import DiscreteFn, Grid, NormValues, make_grid, norms
from .model import (AssumptionReport, DampingValue, ModelParams, SourceValue,
                    check_model_assumptions, effective_params, eval_damping,
                    eval_source)
from .potential_well import (Classification, Functionals, RayMax, RegionInfo,
                             SobolevResult, WellConstants, classify,
                             compute_well, depth_d, functionals, ray_max,
                             region, sobolev_B1, well_constants)
from .presets import PRESETS, Preset, make_data
from .sweep import SweepConfig, SweepRow, rows_to_csv, run_sweep
from .trace_inequality import (AuxSolution, TraceReport, constant_C1,
                               solve_aux_neumann, verify_trace_inequality)

__version__ = "0.1.0"
