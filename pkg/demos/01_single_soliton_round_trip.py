"""Synthesize a fundamental soliton from its nonlinear spectrum and read the
spectrum back with the forward transform."""

import numpy as np

from nfdm import (DiscreteSpectrum, EigenSearchConfig, TimeGrid,
                  discrete_amplitudes, find_eigenvalues, multisoliton)

LAMBDA = 0.1 + 0.45j      # eigenvalue in C+: (frequency + j amplitude)/2
AMPLITUDE = 1.3 * np.exp(0.6j)   # spectral amplitude: phase and time-center
DT = 1.0 / 256

ds = DiscreteSpectrum([LAMBDA], [AMPLITUDE])
grid = TimeGrid.centered(50.0, int(50.0 / DT) + 1)

signal = multisoliton(ds, grid)
print(f"peak |q| = {np.abs(signal.samples).max():.6f} "
      f"(soliton amplitude 2 Im lambda = {2 * LAMBDA.imag:.6f})")

eigs = find_eigenvalues(signal, EigenSearchConfig(search_box=(-0.6, 0.6, 1e-3, 0.8)))
recovered = discrete_amplitudes(signal, eigs)
print(f"recovered eigenvalue : {eigs[0]:.8f}  (sent {LAMBDA})")
print(f"recovered amplitude  : {recovered.amplitudes[0]:.8f}  (sent {AMPLITUDE:.8f})")
print(f"round-trip errors    : |dlam| = {abs(eigs[0] - LAMBDA):.2e}, "
      f"|damp| = {abs(recovered.amplitudes[0] - AMPLITUDE):.2e}")
