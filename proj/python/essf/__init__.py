"""Simulation of extended self-similar fragmentations on marked partitions.

The heavy lifting happens in the compiled extension; this package re-exports
its surface.
"""

from ._core import (
    Characteristics,
    DislocationMeasure,
    GenealogyTree,
    GfSizeChoice,
    GrowthFragmentationCell,
    MarkedPartition,
    StatisticMode,
    TestReport,
    ZElement,
    additive_statistic,
    apply_permutation,
    bbm_preset,
    binary_classical_measure,
    binary_unit_mark_measure,
    classical_preset,
    consistency_test,
    cumulant,
    cumulant_level,
    cumulant_level_mc,
    cumulant_minimum,
    effective_drift,
    empirical_frequencies,
    erosion_atom,
    exchangeability_test,
    frag,
    gf_embedding,
    gf_kappa,
    gf_phi,
    integrability_value,
    killing_rate,
    level_jump_rates,
    level_moment_exponent,
    martingale_estimate,
    martingale_flatness_test,
    restrict,
    sample_dislocation,
    sample_first_event,
    sample_paintbox,
    simulate,
    split_rate_test,
    statistic_path_sup,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
