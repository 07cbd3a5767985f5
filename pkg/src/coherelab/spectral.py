"""Quantum-chaos and ETH diagnostics for chain eigensystems.

Covers spectrum unfolding, nearest-spacing statistics against the
Wigner-Dyson and Poisson laws, diagonal/off-diagonal matrix-element
statistics of local observables, and extraction of the smooth diagonal
profile h(E) that feeds every coherence prediction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import ContractViolation, ExtrapolationError, InsufficientDataError
from .eigens import EigenSystem, SpectralWindow, window_select
from .lattice import OperatorMatrix

UNFOLD_DEGREE = 7
SPACING_FRACTION = 0.6
SMOOTH_MIN_LEVELS = 50


def wigner_dyson_cdf(s):
    """CDF of P_W(s) = (pi/2) s exp(-pi s^2 / 4)."""
    s = np.asarray(s, dtype=float)
    return 1.0 - np.exp(-np.pi * s**2 / 4.0)


def poisson_cdf(s):
    s = np.asarray(s, dtype=float)
    return 1.0 - np.exp(-s)


def wigner_dyson_sample(u):
    """Inverse-CDF map from uniform(0,1) draws to Wigner-Dyson spacings."""
    u = np.asarray(u, dtype=float)
    return np.sqrt(-4.0 / np.pi * np.log1p(-u))


@dataclass(frozen=True)
class SpacingStats:
    """Unfolded nearest-neighbour spacings and their KS distances."""

    unfolded_spacings: np.ndarray
    ks_wigner: float
    ks_poisson: float

    @property
    def mean_spacing(self) -> float:
        return float(self.unfolded_spacings.mean())


@dataclass(frozen=True)
class EthStats:
    """Matrix-element statistics of a local observable inside an energy shell."""

    observable_label: str
    shell: SpectralWindow
    level_count: int
    mu: float
    sigma_d: float
    sigma_nd: float = np.nan
    offdiag_samples: np.ndarray | None = None
    ks_gauss: float = np.nan


@dataclass(frozen=True)
class SmoothCurve:
    """Piecewise-linear smooth profile over an energy grid."""

    support: np.ndarray
    values: np.ndarray
    window_width: float

    def __post_init__(self):
        if np.any(np.diff(self.support) <= 0):
            raise ContractViolation("curve support must be strictly increasing")
        if not np.all(np.isfinite(self.values)):
            raise ContractViolation("curve values must be finite")

    def __call__(self, e):
        e = np.asarray(e, dtype=float)
        if np.any(e < self.support[0]) or np.any(e > self.support[-1]):
            raise ExtrapolationError(
                f"energy outside curve support [{self.support[0]:.4g}, {self.support[-1]:.4g}]"
            )
        out = np.interp(e, self.support, self.values)
        return float(out) if out.ndim == 0 else out


def trim_edges(energies: np.ndarray, fraction: float = SPACING_FRACTION) -> np.ndarray:
    """Central fraction of the spectrum by level count."""
    n = len(energies)
    drop = int(round(n * (1.0 - fraction) / 2.0))
    return energies[drop : n - drop]


def unfold_spectrum(energies, degree: int = UNFOLD_DEGREE) -> np.ndarray:
    """Map energies through a polynomial fit of the cumulative level count.

    The returned sequence has nearest differences with mean 1 (unit local
    density), which is what the universal spacing laws are stated for.
    """
    e = np.asarray(energies, dtype=float)
    if e.size < 50:
        raise InsufficientDataError(f"unfolding needs at least 50 levels, got {e.size}")
    if np.any(np.diff(e) < 0):
        raise ContractViolation("energies must be ascending")
    staircase = np.arange(e.size) + 0.5
    fit = np.polynomial.Polynomial.fit(e, staircase, deg=degree)
    return fit(e)


def spacing_distribution(unfolded_spacings) -> SpacingStats:
    """KS comparison of unfolded spacings against Wigner-Dyson and Poisson."""
    s = np.asarray(unfolded_spacings, dtype=float)
    if s.size < 10:
        raise InsufficientDataError("need at least 10 spacings")
    if np.any(s < 0):
        raise ContractViolation(
            "negative unfolded spacings: the staircase fit is non-monotonic, "
            "restrict the window or lower the fit degree"
        )
    ks_w = stats.kstest(s, wigner_dyson_cdf).statistic
    ks_p = stats.kstest(s, poisson_cdf).statistic
    return SpacingStats(s, float(ks_w), float(ks_p))


def chain_spacing_stats(
    es: EigenSystem,
    fraction: float = SPACING_FRACTION,
    degree: int = UNFOLD_DEGREE,
) -> SpacingStats:
    """Default pipeline: central window, unfold, nearest spacings, KS stats."""
    unfolded = unfold_spectrum(trim_edges(es.energies, fraction), degree=degree)
    return spacing_distribution(np.diff(unfolded))


def _shell_columns(es: EigenSystem, shell: SpectralWindow, min_levels: int):
    sub = window_select(es, shell)
    if sub.count < min_levels:
        raise InsufficientDataError(
            f"shell holds {sub.count} levels, need at least {min_levels}"
        )
    return sub


def diagonal_elements(es: EigenSystem, obs: OperatorMatrix) -> np.ndarray:
    """Eigenbasis diagonal <n|A|n> for every retained eigenstate."""
    av = obs.entries @ es.vectors
    return np.einsum("in,in->n", es.vectors.conj(), av).real


def eth_diagonal_stats(
    es: EigenSystem,
    obs: OperatorMatrix,
    shell: SpectralWindow,
    min_levels: int = 100,
    label: str = "",
) -> EthStats:
    """Mean and population standard deviation of shell diagonal elements."""
    sub = _shell_columns(es, shell, min_levels)
    d = diagonal_elements(sub, obs)
    mu = float(d.mean())
    sigma_d = float(np.sqrt(np.mean(np.abs(d - mu) ** 2)))
    return EthStats(label, shell, sub.count, mu, sigma_d)


def eth_offdiag_stats(
    es: EigenSystem,
    obs: OperatorMatrix,
    shell: SpectralWindow,
    min_levels: int = 100,
    label: str = "",
) -> EthStats:
    """Off-diagonal rms per the N(N-1)-normalised sum, plus Gaussianity check.

    The rescaled sample set holds the upper-triangle elements divided by the
    rms; for the real-symmetric models built here these are real numbers and
    ETH predicts a unit normal for them.
    """
    sub = _shell_columns(es, shell, min_levels)
    m = sub.vectors.conj().T @ (obs.entries @ sub.vectors)
    w = sub.count
    iu = np.triu_indices(w, k=1)
    off = m[iu]
    sigma_nd = float(np.sqrt((np.abs(off) ** 2).sum() * 2.0 / (w * (w - 1))))
    if sigma_nd > 0:
        rescaled = np.real(off) / sigma_nd
        ks = float(stats.kstest(rescaled, stats.norm.cdf).statistic)
    else:
        rescaled = np.zeros_like(np.real(off))
        ks = float(stats.kstest(rescaled, stats.norm.cdf).statistic)
    d = diagonal_elements(sub, obs)
    mu = float(d.mean())
    sigma_d = float(np.sqrt(np.mean(np.abs(d - mu) ** 2)))
    return EthStats(label, shell, w, mu, sigma_d, sigma_nd, rescaled, ks)


def sliding_average(
    x: np.ndarray,
    y: np.ndarray,
    window_width: float,
    min_count: int = SMOOTH_MIN_LEVELS,
    grid_points: int = 256,
) -> SmoothCurve:
    """Mean of y over x-windows of the given width, widened to min_count points.

    x must be ascending. Each grid point averages all samples within
    window_width/2, or the min_count nearest samples when the window is
    sparser than that, so the estimate stays defined at the spectrum edges.
    """
    if x.size < min_count:
        raise InsufficientDataError(
            f"smoothing needs at least {min_count} samples, got {x.size}"
        )
    grid = np.linspace(x[0], x[-1], min(grid_points, x.size))
    csum = np.concatenate([[0.0], np.cumsum(y)])
    values = np.empty_like(grid)
    for g, e in enumerate(grid):
        a = int(np.searchsorted(x, e - window_width / 2, side="left"))
        b = int(np.searchsorted(x, e + window_width / 2, side="right"))
        if b - a < min_count:
            half = min_count // 2
            c = int(np.searchsorted(x, e))
            a = max(0, min(c - half, x.size - min_count))
            b = a + min_count
        values[g] = (csum[b] - csum[a]) / (b - a)
    grid, keep = np.unique(grid, return_index=True)
    return SmoothCurve(grid, values[keep], window_width)


def smooth_h_of_E(
    es: EigenSystem,
    obs: OperatorMatrix,
    window_width: float,
    min_count: int = SMOOTH_MIN_LEVELS,
) -> SmoothCurve:
    """Smooth diagonal profile h(E) of a local observable.

    This curve is the package's single source for h(E0) and h(E_alpha) in the
    coherence formulas; no tabulated values exist to compare against.
    """
    d = diagonal_elements(es, obs)
    return sliding_average(es.energies, d, window_width, min_count=min_count)
