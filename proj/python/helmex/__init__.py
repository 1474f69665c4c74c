"""Decision-tree distillation and explanation of a behaviour-based vehicle autonomy.

The heavy lifting lives in the compiled `_core` extension; this package
re-exports its public surface.
"""

from ._core import (
    DecisionTree,
    FitParams,
    Scenario,
    SchemaMismatchError,
    TraceRecord,
    VehicleState,
    explain_trace,
    fidelity,
    fit_tree,
    format_time,
    load_scenario,
    parse_scenario,
    parse_trace_line,
    predict,
    read_trace,
    run_mission,
    write_trace,
)

__all__ = [
    "DecisionTree",
    "FitParams",
    "Scenario",
    "SchemaMismatchError",
    "TraceRecord",
    "VehicleState",
    "explain_trace",
    "fidelity",
    "fit_tree",
    "format_time",
    "load_scenario",
    "parse_scenario",
    "parse_trace_line",
    "predict",
    "read_trace",
    "run_mission",
    "write_trace",
]
