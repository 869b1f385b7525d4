"""Nonlinear-frequency-division multiplexing toolkit.

Forward/inverse nonlinear Fourier transforms for the focusing NLS channel,
stochastic split-step link simulation, first-order spectral noise statistics,
and constellation/capacity experiments.
"""

from .core import (ContinuousSpectrum, DiscreteSpectrum, NormalizationScales,
                   SignalExtents, TimeGrid, TimeSignal, ZeroSignal, energy,
                   from_physical, measure_extents, to_physical)
from .darboux import (DarbouxState, darboux_step, multisoliton,
                      propagate_spectrum, seed_eigenvectors, suggested_grid)
from .nlse import (LinkConfig, WdmConfig, backpropagate, inject_noise,
                   lowpass_filter, ssfm_propagate, wdm_link_run)
from .oracles import (hirota_multisoliton, rh_multisoliton,
                      single_soliton_closed_form)
from .zs import (EigenSearchConfig, ScatteringCoeffs, bound_state,
                 continuous_spectrum, discrete_amplitudes, find_eigenvalues,
                 nft, scattering_coeffs, spectrum_energy)

__version__ = "0.1.0"
