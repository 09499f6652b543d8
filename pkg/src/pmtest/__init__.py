"""Bootstrap test for partial monotonicity of multi-dimensional discrete
instruments: candidate moments, variance-weighted sup statistic, contact-set
bootstrap, and a warp-speed Monte Carlo harness."""

from . import errors
from .bootstrap import (
    ContactSet,
    PairDiagnostic,
    TestResult,
    bootstrap_draw,
    bootstrap_statistic,
    contact_set,
    contact_statistics,
    critical_value,
    evaluate_test,
    p_value,
    resample_indices,
    run_test,
)
from .config import DEFAULT_XI_SWEEP, NU_BAR, TestConfig, XiMeasure, sweep_measures
from .data import (
    CellPair,
    Dataset,
    InstrumentGrid,
    Sample,
    TreatmentClass,
    enumerate_adjacent_pairs,
    read_csv_dataset,
    validate_dataset,
)
from .moments import (
    Candidate,
    MomentTable,
    build_moment_table,
    candidate_intervals,
    candidate_thresholds,
    empirical_measure,
    phi_hat,
    sigma_hat,
    table_from_sample,
)
from .simulation import (
    POWER_DESIGNS,
    SIM_GRID,
    TAU_LADDER,
    DgpSpec,
    McReport,
    emit_tables,
    full_mc,
    gen_null,
    gen_power,
    simulate_dataset,
    warp_speed_mc,
)
from .statistic import SupProfile, sup_values, ts_statistic, weighted_sup

__version__ = "0.1.0"

__all__ = [
    "Candidate",
    "CellPair",
    "ContactSet",
    "DEFAULT_XI_SWEEP",
    "Dataset",
    "DgpSpec",
    "InstrumentGrid",
    "McReport",
    "MomentTable",
    "NU_BAR",
    "POWER_DESIGNS",
    "PairDiagnostic",
    "SIM_GRID",
    "Sample",
    "SupProfile",
    "TAU_LADDER",
    "TestConfig",
    "TestResult",
    "TreatmentClass",
    "XiMeasure",
    "bootstrap_draw",
    "bootstrap_statistic",
    "build_moment_table",
    "candidate_intervals",
    "candidate_thresholds",
    "contact_set",
    "contact_statistics",
    "critical_value",
    "emit_tables",
    "empirical_measure",
    "enumerate_adjacent_pairs",
    "errors",
    "evaluate_test",
    "full_mc",
    "gen_null",
    "gen_power",
    "p_value",
    "phi_hat",
    "read_csv_dataset",
    "resample_indices",
    "run_test",
    "sigma_hat",
    "simulate_dataset",
    "sup_values",
    "sweep_measures",
    "table_from_sample",
    "ts_statistic",
    "validate_dataset",
    "warp_speed_mc",
    "weighted_sup",
]
