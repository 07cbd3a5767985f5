"""Quench dynamics and long-time averages for the qubit + chain total system.

All 2x2 qubit arrays in this module are indexed by level, ``arr[a-1, b-1]``
for levels alpha, beta in {1, 2} with level 2 the excited one. Long-time
averages are evaluated in the diagonal ensemble, which is exact for a
nondegenerate total spectrum; the time-grid average over an explicit
evolution provides the independent cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, ContractViolation, InsufficientDataError, TruncationError
from .eigens import DEGENERACY_TOL, EigenSystem, degeneracy_check
from .lattice import InteractionSpec, OperatorMatrix, QubitParams, qubit_blocks
from .spectral import SmoothCurve, sliding_average

#: default oracle time grid: 2000 uniform points on [0, 1e4], transients cut at 1e3
ORACLE_TIMES = np.linspace(0.0, 1.0e4, 2000)
ORACLE_T_MIN = 1.0e3

STAT_VALID_SHELL = 30
COMPLETENESS_TOL = 0.01


@dataclass(frozen=True)
class EnergyShell:
    """Chain eigenstates inside the closed band [center - width/2, center + width/2]."""

    center: float
    width: float
    member_indices: np.ndarray
    member_energies: np.ndarray

    def __post_init__(self):
        self.member_indices.setflags(write=False)
        self.member_energies.setflags(write=False)

    @property
    def count(self) -> int:
        return self.member_indices.size

    @property
    def statistically_valid(self) -> bool:
        """Shells below ~30 members carry visible seed-to-seed fluctuations."""
        return self.count >= STAT_VALID_SHELL


def energy_shell(es_env: EigenSystem, center: float, width: float) -> EnergyShell:
    """Select shell members from a chain eigensystem; boundary ties included."""
    lo, hi = center - width / 2.0, center + width / 2.0
    a = int(np.searchsorted(es_env.energies, lo, side="left"))
    b = int(np.searchsorted(es_env.energies, hi, side="right"))
    return EnergyShell(center, width, np.arange(a, b), es_env.energies[a:b].copy())


def normalized_amplitudes(c) -> np.ndarray:
    c = np.asarray(c, dtype=complex)
    if c.shape != (2,):
        raise ConfigurationError("qubit amplitudes must be a pair (c1, c2)")
    norm = np.linalg.norm(c)
    if norm == 0:
        raise ConfigurationError("qubit amplitudes cannot both vanish")
    return c / norm


@dataclass(frozen=True)
class InitialState:
    """Product state |phi_S> (x) |E0>, the shell part Gaussian-random."""

    qubit_amplitudes: np.ndarray  # (c1, c2), unit norm
    shell: EnergyShell
    shell_coefficients: np.ndarray  # sum |C0_i|^2 = shell.count
    env_vector: np.ndarray  # unit-norm chain vector in the bit basis
    seed: int

    def __post_init__(self):
        for arr in (self.qubit_amplitudes, self.shell_coefficients, self.env_vector):
            arr.setflags(write=False)

    @property
    def c1(self) -> complex:
        return complex(self.qubit_amplitudes[0])

    @property
    def c2(self) -> complex:
        return complex(self.qubit_amplitudes[1])

    def total_vector(self) -> np.ndarray:
        """Bit-basis vector on 2 * d_env states (qubit block 0 = level 2)."""
        d = self.env_vector.size
        psi = np.empty(2 * d, dtype=complex)
        psi[:d] = self.c2 * self.env_vector
        psi[d:] = self.c1 * self.env_vector
        return psi


def sample_shell_state(
    es_env: EigenSystem,
    shell: EnergyShell,
    c,
    seed: int,
) -> InitialState:
    """Draw Gaussian-random shell coefficients; deterministic under the seed."""
    if shell.count == 0:
        raise InsufficientDataError("energy shell holds no eigenstates")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal(shell.count) + 1j * rng.standard_normal(shell.count)
    unit = g / np.linalg.norm(g)
    coeffs = unit * np.sqrt(shell.count)
    env_vector = es_env.vectors[:, shell.member_indices] @ unit
    return InitialState(normalized_amplitudes(c), shell, coeffs, env_vector, seed)


@dataclass(frozen=True)
class RdmAverage:
    """Long-time-averaged 2x2 reduced density matrix with provenance."""

    matrix: np.ndarray
    realization_count: int
    method: str
    warnings: tuple[str, ...] = ()
    spread: np.ndarray | None = None

    def __post_init__(self):
        m = self.matrix
        if m.shape != (2, 2):
            raise ContractViolation("reduced density matrix must be 2x2")
        if abs(np.trace(m) - 1.0) > 1e-10:
            raise ContractViolation(f"trace {np.trace(m)} != 1")
        if np.abs(m - m.conj().T).max() > 1e-10:
            raise ContractViolation("reduced density matrix must be Hermitian")
        if np.linalg.eigvalsh(m).min() < -1e-10:
            raise ContractViolation("reduced density matrix must be positive semidefinite")
        m.setflags(write=False)

    @property
    def coherence(self) -> complex:
        """Off-diagonal element rho_12 (level order 1, 2)."""
        return complex(self.matrix[0, 1])


def _overlap_weights(es_total: EigenSystem, psi0: InitialState) -> np.ndarray:
    w = es_total.vectors.conj().T @ psi0.total_vector()
    return np.abs(w) ** 2


def _degeneracy_warnings(es_total: EigenSystem, tol: float) -> tuple[str, ...]:
    report = degeneracy_check(es_total, tol)
    if report.levels_clean:
        return ()
    return (
        f"{len(report.degenerate_levels)} level pairs degenerate within {tol:g}; "
        "diagonal-ensemble average unreliable",
    )


def lta_rdm(
    es_total: EigenSystem,
    psi0: InitialState,
    degeneracy_tol: float = DEGENERACY_TOL,
) -> RdmAverage:
    """Diagonal-ensemble reduced density matrix, exact for nondegenerate spectra."""
    p = _overlap_weights(es_total, psi0)
    v1, v2 = qubit_blocks(es_total.vectors)
    blocks = (v1, v2)
    m = np.empty((2, 2), dtype=complex)
    for a in range(2):
        for b in range(a, 2):
            m[a, b] = np.einsum("in,in,n->", blocks[b].conj(), blocks[a], p)
            if b != a:
                m[b, a] = np.conj(m[a, b])
    m[0, 0] = m[0, 0].real
    m[1, 1] = m[1, 1].real
    return RdmAverage(m, 1, "spectral", _degeneracy_warnings(es_total, degeneracy_tol))


def average_lta_rdm(
    es_total: EigenSystem,
    es_env: EigenSystem,
    shell: EnergyShell,
    c,
    seeds,
    degeneracy_tol: float = DEGENERACY_TOL,
) -> RdmAverage:
    """Seed-averaged diagonal-ensemble matrix, with elementwise seed spread."""
    seeds = list(seeds)
    singles = [
        lta_rdm(es_total, sample_shell_state(es_env, shell, c, s), degeneracy_tol).matrix
        for s in seeds
    ]
    stack = np.stack(singles)
    mean = stack.mean(axis=0)
    spread = stack.std(axis=0)
    warnings = _degeneracy_warnings(es_total, degeneracy_tol)
    return RdmAverage(mean, len(seeds), "spectral", warnings, spread=spread)


def evolve_rdm(es_total: EigenSystem, psi0: InitialState, times) -> np.ndarray:
    """Reduced density matrix along a time grid, shape (len(times), 2, 2)."""
    times = np.asarray(times, dtype=float)
    w = es_total.vectors.conj().T @ psi0.total_vector()
    phases = np.exp(-1j * np.outer(es_total.energies, times)) * w[:, None]
    v1, v2 = qubit_blocks(es_total.vectors)
    f1 = v1 @ phases
    f2 = v2 @ phases
    out = np.empty((times.size, 2, 2), dtype=complex)
    out[:, 0, 0] = np.einsum("it,it->t", f1.conj(), f1).real
    out[:, 1, 1] = np.einsum("it,it->t", f2.conj(), f2).real
    out[:, 0, 1] = np.einsum("it,it->t", f2.conj(), f1)
    out[:, 1, 0] = out[:, 0, 1].conj()
    return out


def time_grid_average(rdm_series: np.ndarray, times, t_min: float = ORACLE_T_MIN) -> RdmAverage:
    """Uniform-grid mean of rho(t) past the transient cut; oracle for lta_rdm."""
    times = np.asarray(times, dtype=float)
    keep = times > t_min
    if not np.any(keep):
        raise InsufficientDataError(f"no grid points beyond t_min = {t_min}")
    mean = rdm_series[keep].mean(axis=0)
    warnings = ()
    if keep.sum() < 100:
        warnings = (
            f"only {int(keep.sum())} grid points beyond t_min; residual fluctuation "
            "scales like (kept points)^-1/2",
        )
    mean = 0.5 * (mean + mean.conj().T)
    return RdmAverage(mean, 1, "time-grid", warnings)


@dataclass(frozen=True)
class BranchWeights:
    """Transition-probability profiles between branch labels and chain levels.

    ``q_profile[a-1, b-1, i]`` is the long-time-averaged probability to reach
    level alpha with the chain on eigenstate i, starting from qubit level
    beta and the shell state. ``q_sums`` integrates out i, ``populations``
    holds B_alpha(E_n), ``q_alpha`` the two-point average of smoothed
    B_alpha at the shifted shell centers, ``ratio`` the same-label to
    cross-label weight ratio (inf when the cross weight vanishes).
    """

    q_profile: np.ndarray
    q_sums: np.ndarray
    populations: np.ndarray
    q_alpha: np.ndarray
    ratio: np.ndarray
    env_energies: np.ndarray
    total_energies: np.ndarray

    def __post_init__(self):
        for arr in (self.q_profile, self.q_sums, self.populations, self.q_alpha, self.ratio):
            arr.setflags(write=False)


def branch_weights(
    es_total: EigenSystem,
    es_env: EigenSystem,
    shell: EnergyShell,
    qubit: QubitParams,
    completeness_tol: float = COMPLETENESS_TOL,
    initial_state: InitialState | None = None,
) -> BranchWeights:
    """Typicality-averaged branch weights from the total eigensystem.

    Passing ``initial_state`` switches to the exact random-coefficient form
    for that state instead of the typicality average; the two agree up to
    shell-size fluctuations.
    """
    if shell.count == 0:
        raise InsufficientDataError("energy shell holds no eigenstates")
    v1, v2 = qubit_blocks(es_total.vectors)
    u = es_env.vectors
    prob = np.empty((2, es_env.count, es_total.count))
    prob[0] = np.abs(u.conj().T @ v1) ** 2
    prob[1] = np.abs(u.conj().T @ v2) ** 2

    members = shell.member_indices
    coverage = prob[:, members, :].sum(axis=2)
    deficit = float(np.abs(1.0 - coverage).max())
    if deficit >= completeness_tol:
        raise TruncationError(
            f"eigensystem covers only {1 - deficit:.3%} of shell weight; "
            "widen the retained spectrum"
        )

    if initial_state is None:
        source = prob[:, members, :].sum(axis=1)  # S_beta(n), typicality form
    else:
        c0 = initial_state.shell_coefficients
        ctil = np.stack([u[:, members].conj().T @ v1, u[:, members].conj().T @ v2])
        z = np.einsum("j,bjn->bn", c0, ctil.conj())
        source = np.abs(z) ** 2

    q = np.einsum("ain,bn->abi", prob, source) / shell.count
    q_sums = q.sum(axis=2)
    populations = np.stack([prob[0].sum(axis=0), prob[1].sum(axis=0)])

    width = max(shell.width, 1e-12)
    q_alpha = np.empty(2)
    eval_at = np.array([shell.center + qubit.e1, shell.center + qubit.e2])
    for a in range(2):
        curve = sliding_average(es_total.energies, populations[a], width)
        q_alpha[a] = curve(np.clip(eval_at, curve.support[0], curve.support[-1])).mean()

    with np.errstate(divide="ignore"):
        ratio = np.array(
            [
                q_sums[0, 0] / q_sums[0, 1] if q_sums[0, 1] > 0 else np.inf,
                q_sums[1, 1] / q_sums[1, 0] if q_sums[1, 0] > 0 else np.inf,
            ]
        )
    return BranchWeights(
        q, q_sums, populations, q_alpha, ratio, es_env.energies, es_total.energies
    )


@dataclass(frozen=True)
class CoarseProfile:
    """Windowed average of a level profile, with its raw moments."""

    curve: SmoothCurve
    center_of_mass: float
    half_width: float


def coarse_grain(profile, energies, window_width: float, grid_points: int = 200) -> CoarseProfile:
    """Average a per-level profile inside sliding energy windows.

    Center of mass and rms half-width come from the raw profile, so they are
    unaffected by the window choice.
    """
    p = np.asarray(profile, dtype=float)
    e = np.asarray(energies, dtype=float)
    if p.shape != e.shape:
        raise ContractViolation("profile and energies must align")
    grid = np.linspace(e[0], e[-1], grid_points)
    csum = np.concatenate([[0.0], np.cumsum(p)])
    values = np.empty_like(grid)
    counts = np.empty_like(grid)
    for g, x in enumerate(grid):
        a = int(np.searchsorted(e, x - window_width / 2, side="left"))
        b = int(np.searchsorted(e, x + window_width / 2, side="right"))
        counts[g] = b - a
        values[g] = (csum[b] - csum[a]) / (b - a) if b > a else 0.0
    if counts.max() < 10:
        raise InsufficientDataError(
            f"window of width {window_width} never spans 10 levels"
        )
    total = p.sum()
    if total <= 0:
        com, half = float("nan"), float("nan")
    else:
        com = float((e * p).sum() / total)
        half = float(np.sqrt(((e - com) ** 2 * p).sum() / total))
    return CoarseProfile(SmoothCurve(grid, values, window_width), com, half)


@dataclass(frozen=True)
class FQuantities:
    """Long-time averages of the interaction-weighted branch overlaps.

    ``f_bar[a-1, b-1]`` holds F_bar(alpha, beta); the balance residual is the
    largest |W1 + W2| over the off-diagonal index pairs, an identity that
    holds to numerical precision for nondegenerate spectra.
    """

    f_bar: np.ndarray
    w1: np.ndarray
    w2: np.ndarray
    balance_residual: float
    rho: np.ndarray
    warnings: tuple[str, ...] = ()


def f_lta(
    es_total: EigenSystem,
    psi0: InitialState,
    obs_env: OperatorMatrix,
    qubit: QubitParams,
    inter: InteractionSpec,
    degeneracy_tol: float = DEGENERACY_TOL,
) -> FQuantities:
    """Spectral evaluation of F_bar plus the stationarity balance residual."""
    p = _overlap_weights(es_total, psi0)
    v1, v2 = qubit_blocks(es_total.vectors)
    blocks = (v1, v2)
    av = [obs_env.entries @ blk for blk in blocks]
    f_bar = np.empty((2, 2), dtype=complex)
    for a in range(2):
        for b in range(2):
            f_bar[a, b] = np.einsum("in,in,n->", blocks[a].conj(), av[b], p)

    rho = np.empty((2, 2), dtype=complex)
    for a in range(2):
        for b in range(2):
            rho[a, b] = np.einsum("in,in,n->", blocks[b].conj(), blocks[a], p)

    his = inter.qubit_part()
    es_levels = np.array([qubit.e1, qubit.e2])
    w1 = np.zeros((2, 2), dtype=complex)
    w2 = np.zeros((2, 2), dtype=complex)
    for a in range(2):
        for b in range(2):
            w1[a, b] = (es_levels[b] - es_levels[a]) * rho[a, b]
            w2[a, b] = sum(
                his[g, b] * f_bar[g, a] - his[a, g] * f_bar[b, g] for g in range(2)
            )
    residual = float(max(abs(w1[0, 1] + w2[0, 1]), abs(w1[1, 0] + w2[1, 0])))
    return FQuantities(
        f_bar, w1, w2, residual, rho, _degeneracy_warnings(es_total, degeneracy_tol)
    )
