"""Vectorized IEC 60909 short-circuit currents for all buses of a grid.

Minimum and maximum initial symmetrical short-circuit currents are computed
simultaneously at every bus from nameplate grid data, with distributed
generation modelled as current sources per the 2016 revision of the
standard.
"""
from ._version import __version__
from .builder import (
    BusBranchModel,
    FaultStudyOptions,
    SwitchFusion,
    build_bbm,
    converter_current,
    external_grid_impedance,
    fuse_switches,
    line_impedance,
    star_decompose,
    three_winding_star,
    transformer_correction,
    transformer_impedance,
    voltage_correction_factor,
)
from .exceptions import (
    GridDataError,
    GridFileError,
    InvalidDataError,
    InvalidOptionError,
    SingularMatrixError,
    SingularStampError,
    SolverError,
    UnsolvableIslandError,
    ValidationError,
)
from .model import (
    Bus,
    ConverterSource,
    ElementRef,
    ExternalGrid,
    Line,
    Network,
    Switch,
    Transformer2W,
    Transformer3W,
    Violation,
    validate,
)
from .quantities import ComplexCurrent, ComplexImpedance
from .solver import (
    ShortCircuitResult,
    calc_sc,
    converter_contribution,
    impedance_matrix_diag,
    total_current,
    voltage_source_currents,
)
from .gridfile import (
    load_network,
    network_from_dict,
    network_to_dict,
    read_result_csv,
    read_result_json,
    save_network,
    write_result_csv,
    write_result_json,
)
from .generator import generate_radial_grid
from .networks import three_bus_example, wind_park_example
from .bench import BenchmarkCase, BenchmarkReport, EquivalenceGateError, run_benchmark

__all__ = [
    "__version__",
    "Bus",
    "ExternalGrid",
    "Line",
    "Transformer2W",
    "Transformer3W",
    "ConverterSource",
    "ElementRef",
    "Switch",
    "Network",
    "Violation",
    "validate",
    "ComplexImpedance",
    "ComplexCurrent",
    "FaultStudyOptions",
    "BusBranchModel",
    "SwitchFusion",
    "voltage_correction_factor",
    "external_grid_impedance",
    "line_impedance",
    "transformer_correction",
    "transformer_impedance",
    "star_decompose",
    "three_winding_star",
    "converter_current",
    "fuse_switches",
    "build_bbm",
    "ShortCircuitResult",
    "impedance_matrix_diag",
    "voltage_source_currents",
    "converter_contribution",
    "total_current",
    "calc_sc",
    "GridDataError",
    "GridFileError",
    "ValidationError",
    "InvalidOptionError",
    "InvalidDataError",
    "SolverError",
    "UnsolvableIslandError",
    "SingularStampError",
    "SingularMatrixError",
    "load_network",
    "save_network",
    "network_from_dict",
    "network_to_dict",
    "write_result_csv",
    "write_result_json",
    "read_result_csv",
    "read_result_json",
    "generate_radial_grid",
    "three_bus_example",
    "wind_park_example",
    "run_benchmark",
    "BenchmarkCase",
    "BenchmarkReport",
    "EquivalenceGateError",
]
