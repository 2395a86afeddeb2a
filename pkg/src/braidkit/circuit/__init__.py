"""RLC-circuit realization of the unidirectional model: synthesis, Laplacians, netlists."""

from .disorder import disorder_sample
from .inic import inic_effective, inic_halves, lowpass_3db
from .laplacian import (
    GreensResult,
    StabilityReport,
    correspondence_error,
    greens_reconstruct,
    laplacian_k,
    laplacian_real,
    stability_check,
)
from .netlist import Element, Netlist, build_netlist, format_si, netlist_export, parse_si, parse_spice
from .params import (
    DEFAULT_FREQUENCY,
    ESR_PRESETS,
    TABLE_I,
    CircuitParams,
    synthesize,
    table_i_model,
    table_i_params,
)

__all__ = [
    "CircuitParams", "synthesize", "TABLE_I", "table_i_params", "table_i_model",
    "DEFAULT_FREQUENCY", "ESR_PRESETS",
    "laplacian_k", "laplacian_real", "correspondence_error",
    "greens_reconstruct", "GreensResult", "stability_check", "StabilityReport",
    "inic_effective", "inic_halves", "lowpass_3db",
    "Element", "Netlist", "build_netlist", "netlist_export", "parse_spice", "format_si", "parse_si",
    "disorder_sample",
]
