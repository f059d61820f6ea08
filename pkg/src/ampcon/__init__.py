"""Amplitude-constrained constellations and constant-modulus reflection patterns."""

__version__ = "0.1.0"

from .arraymodel import (AngularRange, ArrayGeometry, coverage_matrix, in_band_power,  # noqa: E402
                         pattern_metrics, steering_vector)
from .beamforming import (BeamVector, CmpimConfig, cmpim_step, normalized_ls_baseline,  # noqa: E402
                          solve_p5_separable, solve_p6)
from .constellation import (ApskParams, Constellation, InfeasibleCombination, RingSpec,  # noqa: E402
                            baseline_constellation, brute_force_dmin, construct_apsk,
                            design_best_apsk, design_constellation)
from .labeling import assign_bit_labels  # noqa: E402
from .simulate import (AwgnConfig, BerCurve, ChannelConfig, awgn_ber,  # noqa: E402
                       beam_amplitude_cdf, directional_ber)

__all__ = [
    "AngularRange", "ArrayGeometry", "coverage_matrix", "in_band_power", "pattern_metrics",
    "steering_vector", "BeamVector", "CmpimConfig", "cmpim_step", "normalized_ls_baseline",
    "solve_p5_separable", "solve_p6", "ApskParams", "Constellation", "InfeasibleCombination",
    "RingSpec", "baseline_constellation", "brute_force_dmin", "construct_apsk",
    "design_best_apsk", "design_constellation", "assign_bit_labels", "AwgnConfig", "BerCurve",
    "ChannelConfig", "awgn_ber", "beam_amplitude_cdf", "directional_ber",
]
