"""Device-independent certification of the three-qubit W state."""

from ._w3cert import (
    closed_form_threshold,
    deviations,
    export_sdpa,
    family_extraction,
    ideal_statistics,
    norm_bound_closed,
    norm_bound_general,
    norm_distance,
    preset_size,
    psd_project,
    reexport_sdpa,
    sample_statistics,
    sdp_bound,
    statistics,
    swap_fidelity,
    tilted_bell_max,
    tilted_params,
)

__all__ = [
    "closed_form_threshold",
    "deviations",
    "export_sdpa",
    "family_extraction",
    "ideal_statistics",
    "norm_bound_closed",
    "norm_bound_general",
    "norm_distance",
    "preset_size",
    "psd_project",
    "reexport_sdpa",
    "sample_statistics",
    "sdp_bound",
    "statistics",
    "swap_fidelity",
    "tilted_bell_max",
    "tilted_params",
]
