"""Forward nonlinear Fourier transform: Zakharov-Shabat scattering.

The 2x2 scattering problem is integrated by piecewise-constant transfer
matrices, one cell per sample (sample-centered cells, second-order accurate).
Cell matrices have a closed-form exponential; the lambda-derivative of the
transfer matrix is propagated alongside so Newton eigenvalue search gets an
analytic a'(lambda).
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

import numpy as np

from .core import ContinuousSpectrum, DiscreteSpectrum, TimeSignal, energy

DECAY_EDGE_FRACTION = 1e-6
_RENORM_THRESHOLD = 1e100
_BLOCK = 512
_MEM_BUDGET_ELEMS = 8_000_000  # complex128 elements per scratch array


class NonDecayingSignal(ValueError):
    """Signal does not decay at the grid edges; scattering limits are ill-defined."""


class NotAnEigenvalue(ValueError):
    """Residual |a(lambda)| too large for a discrete-amplitude evaluation."""


class DegenerateRoot(ValueError):
    """|a'(lambda)| vanishes; eigenvalue is not simple."""


class DivisionNearZeroWarning(UserWarning):
    """|a(lambda)| nearly vanishes on the real axis (spectral singularity)."""


@dataclass(frozen=True)
class ScatteringCoeffs:
    """Nonlinear Fourier coefficients a, b and the derivative da/dlambda."""

    a: complex
    b: complex
    a_prime: complex


@dataclass(frozen=True)
class EigenSearchConfig:
    """Search box and Newton settings for locating zeros of a(lambda) in C+."""

    search_box: tuple = (-1.0, 1.0, 1e-3, 1.25)  # (re_min, re_max, im_min, im_max)
    grid_init: tuple = (31, 25)
    newton_tol: float = 1e-12
    newton_max_iter: int = 40
    min_im: float = 1e-3
    eps_sep: float = 1e-4

    def __post_init__(self):
        if self.newton_tol <= 0:
            raise ValueError("newton_tol must be positive")
        if self.min_im <= 0:
            raise ValueError("min_im must be positive")

    @classmethod
    def for_signal(cls, signal: TimeSignal, re_halfwidth: float | None = None,
                   im_max: float | None = None) -> "EigenSearchConfig":
        """Heuristic box: Im capped by the energy bound 4*sum(Im) <= E."""
        e = energy(signal)
        if im_max is None:
            im_max = max(0.3, 0.3 * e)  # single eigenvalue could absorb E/4
        if re_halfwidth is None:
            re_halfwidth = 1.0
        return cls(search_box=(-re_halfwidth, re_halfwidth, 1e-3, im_max))


def _cell_matrices(q, lam, dt, with_deriv):
    """Closed-form exponential of the per-cell ZS matrix (and d/dlambda).

    q : (..., n) cell potentials; lam : (...,) broadcastable against q[..., 0].
    Returns T with shape (n, B, 2, 2) where B is the broadcast batch shape
    flattened; and dT when with_deriv.
    """
    lam = np.asarray(lam, dtype=np.complex128)
    q = np.asarray(q, dtype=np.complex128)
    qb = np.moveaxis(np.broadcast_arrays(q, lam[..., None])[0], -1, 0)  # (n, ...)
    lamb = np.broadcast_to(lam, qb.shape[1:])

    k2 = -(lamb**2 + np.abs(qb) ** 2)  # kappa^2, (n, ...)
    kappa = np.sqrt(k2)
    u = kappa * dt
    small = np.abs(u) < 1e-5
    c = np.cosh(u)
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(small, dt * (1.0 + u * u / 6.0), np.sinh(u) / np.where(small, 1.0, kappa))

    T = np.empty(qb.shape + (2, 2), dtype=np.complex128)
    T[..., 0, 0] = c - 1j * lamb * s
    T[..., 0, 1] = qb * s
    T[..., 1, 0] = -np.conj(qb) * s
    T[..., 1, 1] = c + 1j * lamb * s
    if not with_deriv:
        return T, None

    dc = -lamb * dt * s
    with np.errstate(invalid="ignore", divide="ignore"):
        ds = np.where(small, -lamb * dt**3 / 3.0, -lamb * (dt * c - s) / np.where(small, 1.0, k2))
    dT = np.empty_like(T)
    dT[..., 0, 0] = dc - 1j * (s + lamb * ds)
    dT[..., 0, 1] = qb * ds
    dT[..., 1, 0] = -np.conj(qb) * ds
    dT[..., 1, 1] = dc + 1j * (s + lamb * ds)
    return T, dT


def _tree_product(T, dT):
    """Ordered product T[n-1] @ ... @ T[0] by pairwise reduction along axis 0."""
    while T.shape[0] > 1:
        m = T.shape[0]
        even = m - (m % 2)
        lo = T[0:even:2]
        hi = T[1:even:2]
        prod = hi @ lo
        if dT is not None:
            dprod = dT[1:even:2] @ lo + hi @ dT[0:even:2]
        if m % 2:
            prod = np.concatenate([prod, T[-1:]], axis=0)
            if dT is not None:
                dprod = np.concatenate([dprod, dT[-1:]], axis=0)
        T = prod
        if dT is not None:
            dT = dprod
    return T[0], (dT[0] if dT is not None else None)


def _total_transfer(q, lam, dt, with_deriv=True, block=_BLOCK):
    """Product of all cell transfer matrices, with log-scale renormalization.

    Returns (T, dT, logscale) with T, dT of shape lam.shape + (2, 2).
    """
    lam = np.asarray(lam, dtype=np.complex128)
    batch_shape = np.broadcast_shapes(np.asarray(q).shape[:-1], lam.shape)
    n = np.asarray(q).shape[-1]

    T_acc = np.broadcast_to(np.eye(2, dtype=np.complex128), batch_shape + (2, 2)).copy()
    dT_acc = np.zeros(batch_shape + (2, 2), dtype=np.complex128) if with_deriv else None
    logscale = np.zeros(batch_shape, dtype=np.float64)

    for start in range(0, n, block):
        qb = np.asarray(q)[..., start:start + block]
        Tb, dTb = _cell_matrices(qb, lam, dt, with_deriv)
        Tblk, dTblk = _tree_product(Tb, dTb)
        if with_deriv:
            dT_acc = dTblk @ T_acc + Tblk @ dT_acc
        T_acc = Tblk @ T_acc
        # keep entries O(1); same scale on the derivative preserves a'/a
        m = np.abs(T_acc).max(axis=(-2, -1))
        big = m > _RENORM_THRESHOLD
        if np.any(big):
            scale = np.where(big, m, 1.0)
            T_acc /= scale[..., None, None]
            if with_deriv:
                dT_acc /= scale[..., None, None]
            logscale += np.log(scale)
    return T_acc, dT_acc, logscale


def _check_decay(signal: TimeSignal):
    q = signal.samples
    peak = np.abs(q).max()
    if peak == 0:
        return
    edge = max(abs(q[0]), abs(q[-1]))
    if edge > DECAY_EDGE_FRACTION * peak:
        raise NonDecayingSignal(
            f"edge magnitude {edge:.3g} exceeds {DECAY_EDGE_FRACTION:g} * peak {peak:.3g}; "
            "widen the time window"
        )


def _scattering_arrays(signal: TimeSignal, lam, with_deriv=True, check_decay=True):
    """Vectorized a(lambda), b(lambda), a'(lambda) over an array of lambdas."""
    if check_decay:
        _check_decay(signal)
    lam = np.asarray(lam, dtype=np.complex128)
    grid = signal.grid
    dt = grid.dt
    t_left = grid.t_start - dt / 2.0
    t_right = grid.t_end + dt / 2.0
    span = t_right - t_left
    tsum = t_right + t_left

    T, dT, logscale = _total_transfer(signal.samples, lam, dt, with_deriv)
    scale = np.exp(logscale + 1j * lam * span)
    a = T[..., 0, 0] * scale
    b = T[..., 1, 0] * np.exp(logscale - 1j * lam * tsum)
    a_prime = None
    if with_deriv:
        a_prime = (dT[..., 0, 0] + 1j * span * T[..., 0, 0]) * scale
    return a, b, a_prime


def scattering_coeffs(signal: TimeSignal, lam, check_decay: bool = True) -> ScatteringCoeffs:
    """Nonlinear Fourier coefficients of the signal at one complex lambda.

    Integrates the Zakharov-Shabat system with the left Jost boundary
    condition; a and b follow from the t -> +infinity limits, a' from the
    jointly propagated lambda-derivative. check_decay=False skips the
    edge-decay precondition (useful for noisy signals, where the caller
    accepts the windowing error).
    """
    a, b, ap = _scattering_arrays(signal, np.asarray(lam), check_decay=check_decay)
    if np.ndim(lam) == 0:
        return ScatteringCoeffs(complex(a), complex(b), complex(ap))
    return ScatteringCoeffs(a, b, ap)


def continuous_spectrum(signal: TimeSignal, lambda_grid,
                        check_decay: bool = True) -> ContinuousSpectrum:
    """Reflection coefficient b/a sampled on a real lambda grid."""
    lam = np.asarray(lambda_grid, dtype=np.float64)
    if lam.size > 1 and np.min(np.diff(lam)) <= 0:
        raise ValueError("lambda_grid must be strictly increasing")
    a, b, _ = _scattering_arrays(signal, lam.astype(complex), with_deriv=False,
                                 check_decay=check_decay)
    tiny = np.abs(a) < 1e-12
    if np.any(tiny):
        warnings.warn(
            f"|a| < 1e-12 at {int(tiny.sum())} grid point(s); possible spectral singularity",
            DivisionNearZeroWarning,
        )
    with np.errstate(invalid="ignore", divide="ignore"):
        qhat = np.where(tiny, np.inf + 0j, b) / np.where(tiny, 1.0, a)
    return ContinuousSpectrum(lam, qhat)


def _local_minima_seeds(absa, re, im):
    """Grid points whose |a| is a <= of all existing 8-neighbours."""
    ny, nx = absa.shape
    padded = np.full((ny + 2, nx + 2), np.inf)
    padded[1:-1, 1:-1] = absa
    is_min = np.ones_like(absa, dtype=bool)
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            if dy == 0 and dx == 0:
                continue
            is_min &= absa <= padded[1 + dy:1 + dy + ny, 1 + dx:1 + dx + nx]
    iy, ix = np.nonzero(is_min)
    return re[ix] + 1j * im[iy]


def find_eigenvalues(signal: TimeSignal, cfg: EigenSearchConfig | None = None,
                     return_details: bool = False, check_decay: bool = True):
    """Zeros of a(lambda) in the upper half plane.

    Coarse-grid seeding at local minima of |a| followed by vectorized Newton
    iteration lambda <- lambda - a/a'. Duplicates within cfg.eps_sep are
    merged, roots below cfg.min_im or outside the (slightly inflated) search
    box are dropped, survivors are sorted by (Im, Re).
    """
    if cfg is None:
        cfg = EigenSearchConfig.for_signal(signal)
    if check_decay:
        _check_decay(signal)
    if np.abs(signal.samples).max() == 0:
        return ([], {"residuals": [], "n_seeds": 0, "n_converged": 0}) if return_details else []

    re_min, re_max, im_min, im_max = cfg.search_box
    nx, ny = cfg.grid_init
    re = np.linspace(re_min, re_max, nx)
    im = np.linspace(im_min, im_max, ny)
    grid_lam = (re[None, :] + 1j * im[:, None]).ravel()
    a_grid, _, _ = _scattering_arrays(signal, grid_lam, with_deriv=False, check_decay=False)
    abs_a_grid = np.abs(a_grid)

    margin_re = 0.05 * (re_max - re_min)
    margin_im = 0.05 * (im_max - im_min)

    def newton(seeds, known):
        """Newton with Maehly deflation of already-found roots."""
        lam = np.asarray(seeds, dtype=np.complex128).copy()
        active = np.ones(lam.size, dtype=bool)
        converged = np.zeros(lam.size, dtype=bool)
        for _ in range(cfg.newton_max_iter):
            if not np.any(active):
                break
            cur = lam[active]
            a, _, ap = _scattering_arrays(signal, cur, check_decay=False)
            with np.errstate(invalid="ignore", divide="ignore"):
                deriv_ratio = ap / a
                for r in known:
                    deriv_ratio = deriv_ratio - 1.0 / (cur - r)
                step = 1.0 / deriv_ratio
            step = np.where(np.isfinite(step), step, 0.0)
            new = cur - step
            bad = (
                (new.imag < im_min / 4)
                | (new.imag > im_max + margin_im)
                | (new.real < re_min - margin_re)
                | (new.real > re_max + margin_re)
                | ~np.isfinite(new)
            )
            done = (np.abs(a) < cfg.newton_tol) | (np.abs(step) < 1e-14)
            idx = np.nonzero(active)[0]
            lam[idx[~bad]] = new[~bad]
            converged[idx[done & ~bad]] = True
            active[idx[bad | done]] = False
        return lam[converged]

    roots: list[complex] = []
    n_seeds_total = 0
    for _ in range(4):
        # deflate found roots out of the stored coarse-grid values
        deflated = abs_a_grid.copy()
        for r in roots:
            deflated /= np.abs(grid_lam - r)
        seeds = _local_minima_seeds(deflated.reshape(ny, nx), re, im)
        seeds = np.array([s for s in seeds
                          if all(abs(s - r) > 2 * cfg.eps_sep for r in roots)])
        if seeds.size == 0:
            break
        n_seeds_total += seeds.size
        found = newton(seeds, roots)
        added = 0
        if found.size:
            a, _, _ = _scattering_arrays(signal, found, check_decay=False)
            res = np.abs(a)
            order = np.argsort(res)
            for i in order:
                cand = found[i]
                if res[i] >= max(1e3 * cfg.newton_tol, 1e-9):
                    continue
                if cand.imag <= cfg.min_im:
                    continue
                if any(abs(cand - r) <= cfg.eps_sep for r in roots):
                    continue
                roots.append(complex(cand))
                added += 1
        if added == 0:
            break

    roots.sort(key=lambda r: (r.imag, r.real))
    if roots:
        a, _, _ = _scattering_arrays(signal, np.array(roots), check_decay=False)
        residuals = list(np.abs(a))
    else:
        residuals = []

    if return_details:
        details = {
            "residuals": residuals,
            "n_seeds": int(n_seeds_total),
            "n_converged": int(len(roots)),
        }
        return roots, details
    return roots


def _matched_b(signal: TimeSignal, lam):
    """b(lambda_j) at eigenvalues by two-sided Jost matching.

    Reading b off the left-propagated solution at the far right edge is
    exponentially ill-posed in the window width (the residual a-component
    grows like e^{2 Im(lam) t}). At an eigenvalue the left and right Jost
    solutions are parallel, so b is their ratio at the |q|-peak sample, where
    both propagations are still clean.
    """
    lam = np.asarray(lam, dtype=np.complex128)
    q = signal.samples
    grid = signal.grid
    dt = grid.dt
    n = grid.n_samples
    m = int(np.argmax(np.abs(q)))
    t_left = grid.t_start - dt / 2.0
    t_right = grid.t_end + dt / 2.0

    # left Jost (scaled by e^{+j lam t_left}) propagated to the center of cell m
    TL, _, lsL = _total_transfer(q[:m], lam, dt, with_deriv=False) if m else \
        (np.broadcast_to(np.eye(2, dtype=complex), lam.shape + (2, 2)), None, np.zeros(lam.shape))
    Th, _ = _cell_matrices(q[m:m + 1], lam, dt / 2.0, with_deriv=False)
    TL = Th[0] @ TL
    x = TL[..., :, 0]                                    # TL @ (1, 0)

    # right Jost (scaled by e^{-j lam t_right}) propagated back to the same point
    TR, _, lsR = _total_transfer(q[m + 1:], lam, dt, with_deriv=False) if m + 1 < n else \
        (np.broadcast_to(np.eye(2, dtype=complex), lam.shape + (2, 2)), None, np.zeros(lam.shape))
    TR = TR @ Th[0]                                      # full right range incl. half of cell m
    # det(cell transfer) = 1, so the inverse is the adjugate
    y = np.stack([-TR[..., 0, 1], TR[..., 0, 0]], axis=-1)   # inv(TR) @ (0, 1)

    ratio = (np.conj(y) * x).sum(axis=-1) / (np.conj(y) * y).sum(axis=-1)
    return ratio * np.exp(-1j * lam * (t_left + t_right) + lsL - lsR)


def discrete_amplitudes(signal: TimeSignal, eigenvalues, newton_tol: float = 1e-12,
                        eps_sep: float = 1e-4, check_decay: bool = True) -> DiscreteSpectrum:
    """Spectral amplitudes b(lambda_j)/a'(lambda_j) for given eigenvalues.

    b comes from two-sided Jost matching (see :func:`_matched_b`), a' from the
    jointly propagated derivative system.
    """
    lam = np.asarray(eigenvalues, dtype=np.complex128)
    if lam.size == 0:
        return DiscreteSpectrum.empty()
    a, _, ap = _scattering_arrays(signal, lam, check_decay=check_decay)
    bad = np.abs(a) > 1e3 * newton_tol
    if np.any(bad):
        worst = np.abs(a)[bad].max()
        raise NotAnEigenvalue(f"|a(lambda)| up to {worst:.3g} exceeds 1e3*newton_tol")
    if np.any(np.abs(ap) < 1e-10):
        raise DegenerateRoot("|a'(lambda)| < 1e-10 at a supplied eigenvalue")
    b = _matched_b(signal, lam)
    return DiscreteSpectrum(lam, b / ap, eps_sep=eps_sep)


def refine_eigenvalue_batch(samples_batch, grid, lam0, newton_tol: float = 1e-12,
                            max_iter: int = 25) -> np.ndarray:
    """Newton-polish eigenvalues for a batch of signals sharing one grid.

    samples_batch has shape (B, n) (or (n,)), lam0 a scalar or (B,) starting
    guess. Non-converged entries are returned as NaN.
    """
    q = np.atleast_2d(np.asarray(samples_batch, dtype=complex))
    B = q.shape[0]
    lam = np.broadcast_to(np.asarray(lam0, dtype=complex), (B,)).copy()
    dt = grid.dt
    t_left = grid.t_start - dt / 2.0
    span = grid.n_samples * dt

    active = np.ones(B, dtype=bool)
    for _ in range(max_iter):
        if not active.any():
            break
        T, dT, ls = _total_transfer(q[active], lam[active], dt, with_deriv=True)
        scale = np.exp(ls + 1j * lam[active] * span)
        a = T[..., 0, 0] * scale
        ap = (dT[..., 0, 0] + 1j * span * T[..., 0, 0]) * scale
        with np.errstate(invalid="ignore", divide="ignore"):
            step = a / ap
        step = np.where(np.isfinite(step), step, 0.0)
        new = lam[active] - step
        done = (np.abs(a) < newton_tol) | (np.abs(step) < 1e-14)
        bad = ~np.isfinite(new) | (new.imag <= 0)
        idx = np.nonzero(active)[0]
        lam[idx[~bad]] = new[~bad]
        lam[idx[bad]] = np.nan
        active[idx[bad | done]] = False
    lam[active] = np.nan   # never converged
    return lam


def nft(signal: TimeSignal, cfg: EigenSearchConfig | None = None,
        lambda_grid=None) -> tuple[DiscreteSpectrum, ContinuousSpectrum]:
    """Full forward transform: discrete and continuous spectra."""
    if lambda_grid is None:
        lambda_grid = default_lambda_grid(signal)
    eigs = find_eigenvalues(signal, cfg)
    if eigs:
        ds = discrete_amplitudes(signal, eigs,
                                 newton_tol=(cfg.newton_tol if cfg else 1e-12))
    else:
        ds = DiscreteSpectrum.empty()
    cs = continuous_spectrum(signal, lambda_grid)
    return ds, cs


def default_lambda_grid(signal: TimeSignal, n_points: int = 513, halfwidth: float | None = None):
    """Real-axis grid wide enough to hold most of the continuous energy."""
    if halfwidth is None:
        dt = signal.grid.dt
        halfwidth = min(6.0, 0.25 * np.pi / dt)
    return np.linspace(-halfwidth, halfwidth, n_points)


def spectrum_energy(ds: DiscreteSpectrum, cs: ContinuousSpectrum | None = None) -> float:
    """Energy carried by the nonlinear spectrum.

    4 * sum(Im lambda_j) plus the continuous part (1/pi) * int log(1+|qhat|^2).
    """
    e = 4.0 * float(np.sum(ds.eigenvalues.imag)) if len(ds) else 0.0
    if cs is not None and len(cs) > 1:
        e += float(np.trapezoid(np.log1p(np.abs(cs.values) ** 2),
                                cs.lambda_grid)) / np.pi
    return e


def bound_state(signal: TimeSignal, lam: complex) -> np.ndarray:
    """L2 eigenvector of the ZS problem at an eigenvalue, sampled at grid points.

    Integrates the left Jost solution forward and the right Jost solution
    backward, glues them at the sample of maximum |q| and normalizes the
    maximum component magnitude to 1. Shape (2, n_samples).
    """
    q = signal.samples
    grid = signal.grid
    n = grid.n_samples
    dt = grid.dt
    lam = complex(lam)
    i_mid = int(np.argmax(np.abs(q)))

    T_half, _ = _cell_matrices(q, np.array(lam), dt / 2.0, with_deriv=False)

    v = np.empty((2, n), dtype=np.complex128)
    # left Jost, scaled: value at the left edge of cell 0 is (1, 0)
    state = np.array([1.0, 0.0], dtype=np.complex128)
    for k in range(0, i_mid + 1):
        state = T_half[k] @ state          # edge -> sample center
        v[:, k] = state
        state = T_half[k] @ state          # center -> right edge
        m = np.abs(state).max()
        if m > 1e30:
            state /= m
            v[:, : k + 1] /= m
    left_mid = v[:, i_mid].copy()

    # right Jost, scaled: value at the right edge of the last cell is (0, 1)
    state = np.array([0.0, 1.0], dtype=np.complex128)
    w = np.empty((2, n - i_mid), dtype=np.complex128)
    Tinv_half, _ = _cell_matrices(q, np.array(lam), -dt / 2.0, with_deriv=False)
    for k in range(n - 1, i_mid - 1, -1):
        state = Tinv_half[k] @ state       # edge -> sample center (backwards)
        w[:, k - i_mid] = state
        state = Tinv_half[k] @ state
        m = np.abs(state).max()
        if m > 1e30:
            state /= m
            w[:, k - i_mid:] /= m
    right_mid = w[:, 0]

    # at a true eigenvalue the two solutions are parallel at the seam
    c = (np.conj(right_mid) @ left_mid) / (np.conj(right_mid) @ right_mid)
    v[:, i_mid + 1:] = c * w[:, 1:]
    v /= np.abs(v).max()
    return v


# ---------------------------------------------------------------------------
# serialization


def spectrum_to_json(ds: DiscreteSpectrum, cs: ContinuousSpectrum | None = None,
                     path=None, extra: dict | None = None):
    """Serialize spectra to the documented JSON layout; returns dict if path None."""
    obj = {
        "discrete": [
            {
                "re_lambda": float(l.real),
                "im_lambda": float(l.imag),
                "re_amp": float(c.real),
                "im_amp": float(c.imag),
            }
            for l, c in ds
        ],
        "continuous": None,
    }
    if cs is not None:
        obj["continuous"] = {
            "lambda": [float(x) for x in cs.lambda_grid],
            "re": [float(x) for x in cs.values.real],
            "im": [float(x) for x in cs.values.imag],
        }
    if extra:
        obj.update(extra)
    if path is not None:
        with open(path, "w") as fh:
            json.dump(obj, fh)
        return None
    return obj


def spectrum_to_csv(ds: DiscreteSpectrum, cs: ContinuousSpectrum | None,
                    discrete_path=None, continuous_path=None) -> None:
    """Plain CSV dumps for plotting: discrete points and continuous samples."""
    if discrete_path is not None:
        with open(discrete_path, "w") as fh:
            fh.write("re_lambda,im_lambda,re_amp,im_amp\n")
            for l, c in ds:
                fh.write(f"{l.real!r},{l.imag!r},{c.real!r},{c.imag!r}\n")
    if continuous_path is not None and cs is not None:
        with open(continuous_path, "w") as fh:
            fh.write("lambda,re,im\n")
            for l, v in zip(cs.lambda_grid, cs.values):
                fh.write(f"{l!r},{v.real!r},{v.imag!r}\n")


def spectrum_from_json(src) -> tuple[DiscreteSpectrum, ContinuousSpectrum | None]:
    """Read spectra written by :func:`spectrum_to_json`."""
    if isinstance(src, dict):
        obj = src
    else:
        with open(src) as fh:
            obj = json.load(fh)
    entries = obj.get("discrete", [])
    if entries:
        lam = np.array([e["re_lambda"] + 1j * e["im_lambda"] for e in entries])
        amp = np.array([e["re_amp"] + 1j * e["im_amp"] for e in entries])
        ds = DiscreteSpectrum(lam, amp)
    else:
        ds = DiscreteSpectrum.empty()
    cs = None
    cobj = obj.get("continuous")
    if cobj:
        cs = ContinuousSpectrum(
            np.asarray(cobj["lambda"], dtype=float),
            np.asarray(cobj["re"]) + 1j * np.asarray(cobj["im"]),
        )
    return ds, cs
