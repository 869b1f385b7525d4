"""Shared domain types: time grids, signals, nonlinear spectra, unit scales
and waveform measurements used by every other module."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

DEFAULT_EPS_SEP = 1e-4


class ZeroSignal(ValueError):
    """Raised when a measurement needs a nonzero signal (e.g. FWHM of zero)."""


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid: sample k sits at ``t_start + k*dt``, k = 0..n_samples-1."""

    n_samples: int
    t_start: float
    dt: float

    def __post_init__(self):
        if self.n_samples < 2:
            raise ValueError("n_samples must be >= 2")
        if not (self.dt > 0):
            raise ValueError("dt must be positive")

    @classmethod
    def centered(cls, t_span: float, n_samples: int) -> "TimeGrid":
        """Grid of n_samples covering [-t_span/2, t_span/2]."""
        dt = t_span / (n_samples - 1)
        return cls(n_samples, -t_span / 2.0, dt)

    @property
    def t(self) -> np.ndarray:
        return self.t_start + self.dt * np.arange(self.n_samples)

    @property
    def t_end(self) -> float:
        return self.t_start + (self.n_samples - 1) * self.dt

    @property
    def span(self) -> float:
        return (self.n_samples - 1) * self.dt


@dataclass(frozen=True)
class TimeSignal:
    """Complex envelope q(t) sampled on a uniform grid (normalized units)."""

    grid: TimeGrid
    samples: np.ndarray

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.complex128)
        if samples.ndim != 1 or samples.size != self.grid.n_samples:
            raise ValueError("samples length must equal grid.n_samples")
        if not np.all(np.isfinite(samples.view(np.float64))):
            raise ValueError("samples must be finite")
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)

    @classmethod
    def zeros(cls, grid: TimeGrid) -> "TimeSignal":
        return cls(grid, np.zeros(grid.n_samples, dtype=np.complex128))

    def with_samples(self, samples) -> "TimeSignal":
        return TimeSignal(self.grid, np.asarray(samples))

    @property
    def t(self) -> np.ndarray:
        return self.grid.t

    def __len__(self) -> int:
        return self.grid.n_samples


@dataclass(frozen=True)
class DiscreteSpectrum:
    """Discrete nonlinear spectrum: eigenvalues in C+ with spectral amplitudes."""

    eigenvalues: np.ndarray
    amplitudes: np.ndarray
    eps_sep: float = DEFAULT_EPS_SEP

    def __post_init__(self):
        lam = np.atleast_1d(np.asarray(self.eigenvalues, dtype=np.complex128))
        amp = np.atleast_1d(np.asarray(self.amplitudes, dtype=np.complex128))
        if lam.shape != amp.shape or lam.ndim != 1:
            raise ValueError("eigenvalues and amplitudes must be 1-d with equal length")
        if lam.size and np.min(lam.imag) <= 0:
            raise ValueError("eigenvalues must have strictly positive imaginary part")
        if lam.size and np.min(np.abs(amp)) == 0:
            raise ValueError("spectral amplitudes must be nonzero")
        if lam.size > 1:
            diff = np.abs(lam[:, None] - lam[None, :])
            np.fill_diagonal(diff, np.inf)
            if diff.min() <= self.eps_sep:
                raise ValueError(
                    f"eigenvalues closer than eps_sep={self.eps_sep}: min separation {diff.min():.3g}"
                )
        lam.flags.writeable = False
        amp.flags.writeable = False
        object.__setattr__(self, "eigenvalues", lam)
        object.__setattr__(self, "amplitudes", amp)

    @classmethod
    def empty(cls) -> "DiscreteSpectrum":
        return cls(np.zeros(0, dtype=complex), np.zeros(0, dtype=complex))

    @classmethod
    def from_pairs(cls, pairs) -> "DiscreteSpectrum":
        pairs = list(pairs)
        if not pairs:
            return cls.empty()
        lam, amp = zip(*pairs)
        return cls(np.array(lam, dtype=complex), np.array(amp, dtype=complex))

    def sorted_by_imag(self) -> "DiscreteSpectrum":
        """Entries ordered by ascending Im(lambda), ties broken on Re(lambda)."""
        order = np.lexsort((self.eigenvalues.real, self.eigenvalues.imag))
        return DiscreteSpectrum(self.eigenvalues[order], self.amplitudes[order], self.eps_sep)

    def __len__(self) -> int:
        return self.eigenvalues.size

    def __iter__(self):
        return iter(zip(self.eigenvalues, self.amplitudes))


@dataclass(frozen=True)
class ContinuousSpectrum:
    """Samples of the reflection coefficient q_hat(lambda) on a real grid."""

    lambda_grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        lam = np.asarray(self.lambda_grid, dtype=np.float64)
        val = np.asarray(self.values, dtype=np.complex128)
        if lam.shape != val.shape or lam.ndim != 1:
            raise ValueError("lambda_grid and values must be 1-d with equal length")
        if lam.size > 1 and np.min(np.diff(lam)) <= 0:
            raise ValueError("lambda_grid must be strictly increasing")
        lam.flags.writeable = False
        val.flags.writeable = False
        object.__setattr__(self, "lambda_grid", lam)
        object.__setattr__(self, "values", val)

    @classmethod
    def zero(cls, lambda_grid) -> "ContinuousSpectrum":
        lam = np.asarray(lambda_grid, dtype=float)
        return cls(lam, np.zeros_like(lam, dtype=complex))

    def __len__(self) -> int:
        return self.lambda_grid.size


@dataclass(frozen=True)
class NormalizationScales:
    """Physical scales mapping normalized quantities to SI-ish units.

    t_scale in seconds, p_scale in watts, z_scale in meters.
    """

    t_scale: float
    p_scale: float
    z_scale: float

    def __post_init__(self):
        if min(self.t_scale, self.p_scale, self.z_scale) <= 0:
            raise ValueError("all scales must be strictly positive")


_SCALE_ATTR = {"time": "t_scale", "power": "p_scale", "distance": "z_scale"}


def to_physical(x, kind: str, scales: NormalizationScales):
    """Convert a normalized quantity to physical units (multiply by its scale)."""
    try:
        return x * getattr(scales, _SCALE_ATTR[kind])
    except KeyError:
        raise ValueError(f"kind must be one of {sorted(_SCALE_ATTR)}, got {kind!r}") from None


def from_physical(x, kind: str, scales: NormalizationScales):
    """Inverse of :func:`to_physical`."""
    try:
        return x / getattr(scales, _SCALE_ATTR[kind])
    except KeyError:
        raise ValueError(f"kind must be one of {sorted(_SCALE_ATTR)}, got {kind!r}") from None


@dataclass(frozen=True)
class SignalExtents:
    """Energy, duration and bandwidth measurements of a waveform.

    t_99 / bw_99 are the smallest centroid-centered windows holding 99% of the
    energy in time / ordinary-Fourier frequency (cycles per normalized time).
    p_avg is energy / t_99.
    """

    energy: float
    t_fwhm: float
    t_99: float
    p_avg: float
    bw_99: float


def energy(signal: TimeSignal) -> float:
    """Trapezoidal quadrature of |q|^2 over the grid."""
    return float(np.trapezoid(np.abs(signal.samples) ** 2, dx=signal.grid.dt))


def _centered_window_width(x, density, frac):
    """Smallest window [c-r, c+r] around the density centroid holding frac of mass.

    density >= 0 sampled on the uniform ascending grid x; trapezoid weights.
    """
    dx = x[1] - x[0]
    total = np.trapezoid(density, dx=dx)
    if total <= 0:
        raise ZeroSignal("cannot take a fractional-energy window of a zero signal")
    c = np.trapezoid(x * density, dx=dx) / total
    target = frac * total

    # cumulative trapezoid; window mass via linear interpolation of the cumulative
    cum = np.concatenate(([0.0], np.cumsum(0.5 * (density[1:] + density[:-1]) * dx)))

    def mass(r):
        lo = np.interp(c - r, x, cum)
        hi = np.interp(c + r, x, cum)
        return hi - lo

    r_hi = max(x[-1] - c, c - x[0])
    if mass(r_hi) < target:
        return 2.0 * r_hi  # grid too narrow; return the best available window
    r_lo = 0.0
    for _ in range(80):
        r_mid = 0.5 * (r_lo + r_hi)
        if mass(r_mid) >= target:
            r_hi = r_mid
        else:
            r_lo = r_mid
    return 2.0 * r_hi


def _fwhm(x, density):
    """Full width at half maximum: outermost half-max crossings, linearly interpolated."""
    peak = density.max()
    if peak <= 0:
        raise ZeroSignal("FWHM of a zero signal is undefined")
    half = 0.5 * peak
    above = density >= half
    idx = np.nonzero(above)[0]
    i_lo, i_hi = idx[0], idx[-1]
    if i_lo == 0:
        x_lo = x[0]
    else:
        f = (half - density[i_lo - 1]) / (density[i_lo] - density[i_lo - 1])
        x_lo = x[i_lo - 1] + f * (x[i_lo] - x[i_lo - 1])
    if i_hi == len(x) - 1:
        x_hi = x[-1]
    else:
        f = (density[i_hi] - half) / (density[i_hi] - density[i_hi + 1])
        x_hi = x[i_hi] + f * (x[i_hi + 1] - x[i_hi])
    return x_hi - x_lo


def measure_extents(signal: TimeSignal, pad_factor: int = 4) -> SignalExtents:
    """Measure energy, FWHM, 99%-energy duration, average power and 99% bandwidth.

    Parameters
    ----------
    signal : TimeSignal
    pad_factor : int
        Zero-padding factor for the FFT periodogram used by bw_99.

    Raises
    ------
    ZeroSignal
        If the signal is identically zero.
    """
    q = signal.samples
    t = signal.t
    dt = signal.grid.dt
    power = np.abs(q) ** 2
    e = float(np.trapezoid(power, dx=dt))
    if e <= 0:
        raise ZeroSignal("measure_extents needs a nonzero signal")

    t_fwhm = float(_fwhm(t, power))
    t_99 = float(_centered_window_width(t, power, 0.99))

    # bandwidth from the zero-padded periodogram: smallest whole-bin radius k
    # around the spectral centroid whose trapezoid mass over [-f_k, f_k]
    # reaches 99% of the total, reported as the extent 2 k df
    n_fft = int(pad_factor) * len(q)
    psd = np.abs(np.fft.fftshift(np.fft.fft(q, n=n_fft)) * dt) ** 2
    f = np.fft.fftshift(np.fft.fftfreq(n_fft, d=dt))
    df = f[1] - f[0]
    total = np.trapezoid(psd, dx=df)
    c = int(np.clip(round((f @ psd / psd.sum() - f[0]) / df), 0, n_fft - 1))
    target = 0.99 * total
    cum = np.concatenate(([0.0], np.cumsum(0.5 * (psd[1:] + psd[:-1]) * df)))
    k = 0
    while (c - k > 0 or c + k < n_fft - 1):
        lo = max(0, c - k)
        hi = min(n_fft - 1, c + k)
        if cum[hi] - cum[lo] >= target:
            break
        k += 1
    bw_99 = float(2 * k * df)

    return SignalExtents(energy=e, t_fwhm=t_fwhm, t_99=t_99, p_avg=e / t_99, bw_99=bw_99)


# ---------------------------------------------------------------------------
# serialization: CSV with t, re(q), im(q) and a JSON variant with grid metadata


def _fmt(x: float) -> str:
    return repr(float(x))


def signal_to_csv(signal: TimeSignal, path) -> None:
    """Write a signal as CSV columns t, re_q, im_q (shortest round-trip floats)."""
    t = signal.t
    q = signal.samples
    with open(path, "w") as fh:
        fh.write("t,re_q,im_q\n")
        for k in range(len(q)):
            fh.write(f"{_fmt(t[k])},{_fmt(q[k].real)},{_fmt(q[k].imag)}\n")


def signal_from_csv(path) -> TimeSignal:
    """Read a signal written by :func:`signal_to_csv`; the grid must be uniform."""
    rows = []
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        if header[:3] != ["t", "re_q", "im_q"]:
            raise ValueError(f"{path}: line 1: expected header 't,re_q,im_q'")
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise ValueError(f"{path}: line {lineno}: expected 3 comma-separated fields")
            try:
                rows.append(tuple(float(p) for p in parts))
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: non-numeric field") from None
    if len(rows) < 2:
        raise ValueError(f"{path}: need at least 2 samples")
    arr = np.array(rows)
    t = arr[:, 0]
    dt = (t[-1] - t[0]) / (len(t) - 1)
    if dt <= 0 or np.max(np.abs(np.diff(t) - dt)) > 1e-9 * max(abs(dt), 1.0):
        raise ValueError(f"{path}: time column is not a uniform ascending grid")
    grid = TimeGrid(len(t), float(t[0]), float(dt))
    return TimeSignal(grid, arr[:, 1] + 1j * arr[:, 2])


def signal_to_json(signal: TimeSignal, path=None):
    """JSON variant carrying explicit grid metadata; returns the dict if path is None."""
    obj = {
        "grid": {
            "n_samples": signal.grid.n_samples,
            "t_start": signal.grid.t_start,
            "dt": signal.grid.dt,
        },
        "re_q": [float(v) for v in signal.samples.real],
        "im_q": [float(v) for v in signal.samples.imag],
    }
    if path is not None:
        with open(path, "w") as fh:
            json.dump(obj, fh)
        return None
    return obj


def signal_from_json(src) -> TimeSignal:
    """Read a signal dict / JSON file written by :func:`signal_to_json`."""
    if isinstance(src, dict):
        obj = src
    else:
        with open(src) as fh:
            obj = json.load(fh)
    g = obj["grid"]
    grid = TimeGrid(int(g["n_samples"]), float(g["t_start"]), float(g["dt"]))
    return TimeSignal(grid, np.asarray(obj["re_q"]) + 1j * np.asarray(obj["im_q"]))
