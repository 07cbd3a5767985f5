"""Verified Hermitian eigendecompositions: full-spectrum, interior windows, cache.

Full dense diagonalization is the desk-scale default (dimension <= 2**13);
an interior shift-invert mode covers sparse operators above that. Every
eigensystem carries a residual certificate ``max_n ||H v_n - E_n v_n||``.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import CapacityError, ContractViolation, InsufficientDataError
from .lattice import OperatorMatrix, hermiticity_defect, HERMITICITY_TOL

DENSE_DIMENSION_LIMIT = 2**13
DEGENERACY_TOL = 1e-10


@dataclass(frozen=True)
class SpectralWindow:
    """Energy window: explicit [lo, hi], center +- half_width, or center + count."""

    lo: float | None = None
    hi: float | None = None
    center: float | None = None
    half_width: float | None = None
    count: int | None = None

    def __post_init__(self):
        explicit = self.lo is not None and self.hi is not None
        centered = self.center is not None and self.half_width is not None
        counted = self.center is not None and self.count is not None
        if not (explicit or centered or counted):
            raise ContractViolation(
                "window needs (lo, hi), (center, half_width) or (center, count)"
            )
        if centered and self.half_width <= 0:
            raise ContractViolation("half_width must be positive")
        if counted and self.count is not None and self.count < 1:
            raise ContractViolation("count must be at least 1")

    def bounds(self) -> tuple[float, float] | None:
        """Closed [lo, hi] interval, or None for a count-based window."""
        if self.lo is not None and self.hi is not None:
            return float(self.lo), float(self.hi)
        if self.half_width is not None:
            return self.center - self.half_width, self.center + self.half_width
        return None


@dataclass(frozen=True)
class EigenSystem:
    """Ascending eigenvalues with orthonormal eigenvectors (column n = state n)."""

    energies: np.ndarray
    vectors: np.ndarray
    residual_max: float
    window: tuple[float, float] | None = None

    def __post_init__(self):
        if self.energies.ndim != 1 or self.vectors.shape[1] != self.energies.size:
            raise ContractViolation("vectors must hold one column per energy")
        if np.any(np.diff(self.energies) < 0):
            raise ContractViolation("energies must be sorted ascending")
        self.energies.setflags(write=False)
        self.vectors.setflags(write=False)

    @property
    def count(self) -> int:
        return self.energies.size

    @property
    def dimension(self) -> int:
        return self.vectors.shape[0]

    def orthonormality_defect(self) -> float:
        g = self.vectors.conj().T @ self.vectors
        return float(np.abs(g - np.eye(self.count)).max())


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude component of each column real and positive."""
    lead = np.argmax(np.abs(vectors), axis=0)
    pivot = vectors[lead, np.arange(vectors.shape[1])]
    if np.iscomplexobj(vectors):
        phase = pivot / np.abs(pivot)
        return vectors * phase.conj()
    return vectors * np.where(pivot < 0, -1.0, 1.0)


def _residual_max(h, energies: np.ndarray, vectors: np.ndarray) -> float:
    r = h @ vectors - vectors * energies
    return float(np.sqrt((np.abs(r) ** 2).sum(axis=0)).max())


def full_diagonalize(h: OperatorMatrix, dense_limit: int = DENSE_DIMENSION_LIMIT) -> EigenSystem:
    """Complete eigendecomposition of a Hermitian operator, with certificate."""
    if h.dimension > dense_limit:
        raise CapacityError(
            f"dimension {h.dimension} exceeds dense limit {dense_limit}; "
            "use interior_eigensystem with a SpectralWindow"
        )
    if hermiticity_defect(h.entries) > HERMITICITY_TOL:
        raise ContractViolation("operator is not Hermitian")
    m = h.dense()
    energies, vectors = np.linalg.eigh(m)
    vectors = _fix_phases(vectors)
    return EigenSystem(energies, vectors, _residual_max(m, energies, vectors))


def interior_eigensystem(h: OperatorMatrix, w: SpectralWindow, count: int | None = None) -> EigenSystem:
    """Shift-invert Lanczos around a window center, for operators past the dense limit.

    Returns the ``count`` (or ``w.count``) eigenpairs nearest the window center.
    """
    if w.center is None:
        raise ContractViolation("interior solve needs a window with a center")
    k = count or w.count
    if k is None:
        raise ContractViolation("interior solve needs a target eigenpair count")
    op = h.entries if sp.issparse(h.entries) else sp.csr_matrix(h.entries)
    energies, vectors = spla.eigsh(op.tocsc(), k=k, sigma=w.center, which="LM")
    order = np.argsort(energies)
    energies, vectors = energies[order], _fix_phases(vectors[:, order])
    res = _residual_max(h.entries, energies, vectors)
    return EigenSystem(energies, vectors, res, window=(energies[0], energies[-1]))


def window_select(es: EigenSystem, w: SpectralWindow) -> EigenSystem:
    """Contiguous subset of eigenpairs inside the window, order preserved.

    An empty intersection yields an empty eigensystem, not an error. The
    residual certificate of the parent is inherited (it bounds every subset).
    """
    bounds = w.bounds()
    if bounds is not None:
        lo, hi = bounds
        a = int(np.searchsorted(es.energies, lo, side="left"))
        b = int(np.searchsorted(es.energies, hi, side="right"))
    else:
        k = min(w.count, es.count)
        a = b = int(np.searchsorted(es.energies, w.center))
        while b - a < k:
            if a == 0:
                b += 1
            elif b == es.count:
                a -= 1
            elif w.center - es.energies[a - 1] <= es.energies[b] - w.center:
                a -= 1
            else:
                b += 1
        lo = hi = None
    energies = es.energies[a:b].copy()
    vectors = es.vectors[:, a:b].copy()
    if bounds is None and energies.size:
        lo, hi = float(energies[0]), float(energies[-1])
    window = (lo, hi) if energies.size else None
    return EigenSystem(energies, vectors, es.residual_max, window=window)


@dataclass(frozen=True)
class DegeneracyReport:
    """Level pairs closer than tol, and spacing pairs equal within tol."""

    tol: float
    degenerate_levels: tuple[tuple[int, int, float], ...]
    degenerate_spacings: tuple[tuple[int, int, float], ...]

    @property
    def clean(self) -> bool:
        return not self.degenerate_levels and not self.degenerate_spacings

    @property
    def levels_clean(self) -> bool:
        return not self.degenerate_levels


def degeneracy_check(es: EigenSystem, tol: float = DEGENERACY_TOL) -> DegeneracyReport:
    """Scan for degenerate levels and degenerate nearest-neighbour spacings.

    The long-time-average formulas require the level list to be empty; the
    spacing list matters for time-average oracles of products of amplitudes.
    """
    if es.count == 0:
        raise InsufficientDataError("empty eigensystem")
    e = es.energies
    level_pairs = [
        (n, n + 1, float(e[n + 1] - e[n]))
        for n in np.nonzero(np.diff(e) < tol)[0]
    ]
    gaps = np.diff(e)
    order = np.argsort(gaps, kind="stable")
    close = np.nonzero(np.diff(gaps[order]) < tol)[0]
    spacing_pairs = [
        (int(order[j]), int(order[j + 1]), float(abs(gaps[order[j + 1]] - gaps[order[j]])))
        for j in close
    ]
    return DegeneracyReport(tol, tuple(level_pairs), tuple(spacing_pairs))


# ---------------------------------------------------------------------------
# binary eigensystem cache
# ---------------------------------------------------------------------------

_MAGIC = b"CLEIGSYS"
_VERSION = 1
_FLAG_COMPLEX = 1
_FLAG_WINDOW = 2


def eigensystem_cache_key(h: OperatorMatrix, settings: str) -> str:
    """Content hash of operator bytes plus solver settings."""
    digest = hashlib.sha256()
    m = h.entries
    if sp.issparse(m):
        c = m.tocsr()
        c.sort_indices()
        digest.update(c.indptr.tobytes())
        digest.update(c.indices.tobytes())
        digest.update(np.ascontiguousarray(c.data).tobytes())
    else:
        digest.update(np.ascontiguousarray(m).tobytes())
    digest.update(str(h.dimension).encode())
    digest.update(settings.encode())
    return digest.hexdigest()


def save_eigensystem(path: str | Path, es: EigenSystem, key: str) -> None:
    """Write header + little-endian float64 arrays (complex stored interleaved)."""
    is_complex = np.iscomplexobj(es.vectors)
    flags = (_FLAG_COMPLEX if is_complex else 0) | (_FLAG_WINDOW if es.window else 0)
    lo, hi = es.window if es.window else (np.nan, np.nan)
    header = _MAGIC + struct.pack(
        "<IIqqddd", _VERSION, flags, es.dimension, es.count, lo, hi, es.residual_max
    )
    header += bytes.fromhex(key)[:32].ljust(32, b"\0")
    vec_dtype = "<c16" if is_complex else "<f8"
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(es.energies.astype("<f8").tobytes())
        fh.write(np.ascontiguousarray(es.vectors, dtype=vec_dtype).tobytes())


def load_eigensystem(path: str | Path, expected_key: str | None = None) -> EigenSystem | None:
    """Read a cached eigensystem; None on key mismatch, error on corruption."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:8] != _MAGIC:
        raise ContractViolation(f"{path} is not an eigensystem cache file")
    version, flags, dim, count, lo, hi, residual = struct.unpack("<IIqqddd", blob[8:56])
    if version != _VERSION:
        return None
    stored_key = blob[56:88]
    if expected_key is not None and bytes.fromhex(expected_key)[:32].ljust(32, b"\0") != stored_key:
        return None
    off = 88
    energies = np.frombuffer(blob, dtype="<f8", count=count, offset=off).copy()
    off += count * 8
    vec_dtype = "<c16" if flags & _FLAG_COMPLEX else "<f8"
    vectors = np.frombuffer(blob, dtype=vec_dtype, count=dim * count, offset=off)
    vectors = vectors.reshape(dim, count).copy()
    window = (lo, hi) if flags & _FLAG_WINDOW else None
    return EigenSystem(energies, vectors, residual, window=window)


def cached_full_diagonalize(
    h: OperatorMatrix,
    cache_dir: str | Path | None,
    dense_limit: int = DENSE_DIMENSION_LIMIT,
) -> EigenSystem:
    """Disk-backed full_diagonalize, keyed by operator content and settings."""
    if cache_dir is None:
        return full_diagonalize(h, dense_limit=dense_limit)
    settings = f"full_diagonalize:dense_limit={dense_limit}:v{_VERSION}"
    key = eigensystem_cache_key(h, settings)
    path = Path(cache_dir) / f"{key[:32]}.eig"
    if path.exists():
        cached = load_eigensystem(path, expected_key=key)
        if cached is not None:
            return cached
    es = full_diagonalize(h, dense_limit=dense_limit)
    path.parent.mkdir(parents=True, exist_ok=True)
    save_eigensystem(path, es, key)
    return es
