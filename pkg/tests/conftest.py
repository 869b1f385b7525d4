import numpy as np
import pytest

from nfdm.core import DiscreteSpectrum, TimeGrid, TimeSignal


@pytest.fixture
def sech_signal():
    grid = TimeGrid.centered(40.0, 4096)
    return TimeSignal(grid, 1.0 / np.cosh(grid.t))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_spectrum(rng, n, re_range=(-0.5, 0.5), im_range=(0.1, 1.0),
                    sep=0.1, amp_range=(0.2, 5.0)):
    lams = []
    while len(lams) < n:
        cand = rng.uniform(*re_range) + 1j * rng.uniform(*im_range)
        if all(abs(cand - o) > sep for o in lams):
            lams.append(cand)
    amps = rng.uniform(*amp_range, n) * np.exp(2j * np.pi * rng.random(n))
    return DiscreteSpectrum(lams, amps)
