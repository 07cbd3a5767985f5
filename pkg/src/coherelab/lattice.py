"""Hamiltonian and observable construction for a qubit coupled to a defect Ising ring.

Basis encoding (fixed for the whole package):

* chain site ``l`` maps to bit ``l - 1`` of the basis index (site 1 is the
  least significant bit),
* bit value 0 corresponds to sigma^z eigenvalue +1,
* for the combined system the qubit occupies the most significant bit, so a
  total index reads ``s = q * 2**n_sites + chain_index``.

Operator conventions: chain operators are full Pauli matrices, while the
central-qubit operators ``S^z``/``S^x`` are spin-1/2 operators (Pauli over 2).
The qubit level splitting therefore equals ``delta_s`` exactly, with the
excited level ``alpha = 2`` sitting in qubit block ``q = 0`` and the ground
level ``alpha = 1`` in block ``q = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .errors import ConfigurationError, ContractViolation, InvalidSiteError

HERMITICITY_TOL = 1e-12

#: defect fields (site, strength) used when a config omits the "defects" key
DEFAULT_DEFECTS = ((1, 1.11), (5, 0.6))

#: chain sizes above which builders switch to sparse storage
DENSE_SITE_LIMIT = 12


@dataclass(frozen=True)
class ChainParams:
    """Defect Ising ring in a transverse field, periodic closure always."""

    n_sites: int
    h_x: float = 0.9
    j_z: float = 1.0
    defects: tuple[tuple[int, float], ...] = DEFAULT_DEFECTS
    periodic: bool = True

    def __post_init__(self):
        if self.n_sites < 2:
            raise ConfigurationError(f"need at least 2 chain sites, got {self.n_sites}")
        if not self.periodic:
            raise ConfigurationError("only periodic chains are supported")
        sites = [site for site, _ in self.defects]
        for site in sites:
            if not 1 <= site <= self.n_sites:
                raise InvalidSiteError(
                    f"defect site {site} outside chain of {self.n_sites} sites"
                )
        if len(set(sites)) != len(sites):
            raise InvalidSiteError(f"defect sites must be distinct, got {sites}")
        object.__setattr__(self, "defects", tuple((int(s), float(d)) for s, d in self.defects))

    @property
    def dimension(self) -> int:
        return 2**self.n_sites


@dataclass(frozen=True)
class QubitParams:
    """Two-level central system with splitting ``delta_s`` (E2 - E1)."""

    delta_s: float

    def __post_init__(self):
        if self.delta_s <= 0:
            raise ConfigurationError(f"delta_s must be positive, got {self.delta_s}")

    @property
    def e1(self) -> float:
        return -0.5 * self.delta_s

    @property
    def e2(self) -> float:
        return +0.5 * self.delta_s


@dataclass(frozen=True)
class InteractionSpec:
    """Product coupling ``lam * (f1 S^z + f2 S^x) (x) sigma^axis_k``."""

    lam: float
    f1: float = 0.0
    f2: float = 1.0
    env_axis: str = "z"
    k: int = 7

    def __post_init__(self):
        if self.env_axis not in ("x", "z"):
            raise ConfigurationError(f"env_axis must be 'x' or 'z', got {self.env_axis!r}")
        if self.lam != 0.0 and self.f1 == 0.0 and self.f2 == 0.0:
            raise ConfigurationError("nonzero coupling needs (f1, f2) != (0, 0)")

    @property
    def is_dephasing(self) -> bool:
        """True when the coupling commutes with the qubit Hamiltonian."""
        return self.f2 == 0.0

    def qubit_part(self) -> np.ndarray:
        """2x2 matrix of ``lam*(f1 S^z + f2 S^x)`` in the energy basis (alpha=1,2)."""
        sz = np.array([[-0.5, 0.0], [0.0, 0.5]])
        sx = np.array([[0.0, 0.5], [0.5, 0.0]])
        return self.lam * (self.f1 * sz + self.f2 * sx)


@dataclass(frozen=True)
class OperatorMatrix:
    """Hermitian operator over the declared bit basis, dense or sparse."""

    dimension: int
    entries: np.ndarray | sp.spmatrix
    basis_label: str

    def __post_init__(self):
        shape = self.entries.shape
        if shape != (self.dimension, self.dimension):
            raise ContractViolation(f"entries shape {shape} != declared dimension {self.dimension}")
        if hermiticity_defect(self.entries) > HERMITICITY_TOL:
            raise ContractViolation("operator is not Hermitian within 1e-12")
        if isinstance(self.entries, np.ndarray):
            self.entries.setflags(write=False)

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.entries)

    def dense(self) -> np.ndarray:
        return self.entries.toarray() if self.is_sparse else self.entries


def hermiticity_defect(m) -> float:
    """Largest elementwise deviation from Hermiticity."""
    d = m - m.conj().T
    if sp.issparse(d):
        return 0.0 if d.nnz == 0 else abs(d).max()
    return float(np.abs(d).max()) if d.size else 0.0


def _site_mask(n_sites: int, k: int) -> int:
    if not 1 <= k <= n_sites:
        raise InvalidSiteError(f"site {k} outside chain of {n_sites} sites")
    return 1 << (k - 1)


def sigma_z_diagonal(n_sites: int, k: int) -> np.ndarray:
    """Diagonal of sigma^z on site k over the 2**n_sites chain basis."""
    mask = _site_mask(n_sites, k)
    idx = np.arange(2**n_sites)
    return 1.0 - 2.0 * ((idx & mask) > 0)


def build_local_pauli(n_sites: int, k: int, axis: str, sparse: bool | None = None) -> OperatorMatrix:
    """Pauli operator sigma^axis on chain site k, identity elsewhere."""
    if axis not in ("x", "z"):
        raise ConfigurationError(f"axis must be 'x' or 'z', got {axis!r}")
    mask = _site_mask(n_sites, k)
    dim = 2**n_sites
    if sparse is None:
        sparse = n_sites > DENSE_SITE_LIMIT
    idx = np.arange(dim)
    if axis == "z":
        vals = sigma_z_diagonal(n_sites, k)
        m = sp.diags(vals, format="csr") if sparse else np.diag(vals)
    else:
        rows, vals = idx ^ mask, np.ones(dim)
        if sparse:
            m = sp.csr_matrix((vals, (rows, idx)), shape=(dim, dim))
        else:
            m = np.zeros((dim, dim))
            m[rows, idx] = 1.0
    return OperatorMatrix(dim, m, chain_basis_label(n_sites))


def chain_basis_label(n_sites: int) -> str:
    return f"chain bits: site l = bit l-1 over {n_sites} sites, bit 0 = sigma^z +1"


def total_basis_label(n_sites: int) -> str:
    return (
        f"qubit bit (MSB, 0 = alpha 2) * {chain_basis_label(n_sites)}"
    )


def build_env_hamiltonian(p: ChainParams, sparse: bool | None = None) -> OperatorMatrix:
    """Defect Ising ring ``h_x sum sigma^x_l + sum_d d sigma^z + j_z sum sigma^z_l sigma^z_{l+1}``.

    The bond sum runs literally over l = 1..N with site N+1 = 1, so the N = 2
    ring counts its single bond twice.
    """
    n, dim = p.n_sites, p.dimension
    if sparse is None:
        sparse = n > DENSE_SITE_LIMIT
    idx = np.arange(dim)
    z = np.empty((n, dim))
    for l in range(1, n + 1):
        z[l - 1] = sigma_z_diagonal(n, l)

    diag = np.zeros(dim)
    for site, d in p.defects:
        diag += d * z[site - 1]
    for l in range(n):
        diag += p.j_z * z[l] * z[(l + 1) % n]

    if sparse:
        m = sp.lil_matrix((dim, dim))
        m.setdiag(diag)
        for l in range(n):
            m[idx ^ (1 << l), idx] = p.h_x
        m = m.tocsr()
    else:
        m = np.diag(diag)
        for l in range(n):
            m[idx ^ (1 << l), idx] += p.h_x
    return OperatorMatrix(dim, m, chain_basis_label(n))


def build_total_hamiltonian(
    q: QubitParams,
    p: ChainParams,
    i: InteractionSpec,
    sparse: bool | None = None,
) -> OperatorMatrix:
    """Full Hamiltonian ``delta_s S^z (x) 1 + H^I + 1 (x) H^E`` on 2**(N+1) states."""
    if not 1 <= i.k <= p.n_sites:
        raise ConfigurationError(
            f"interaction site {i.k} inconsistent with chain of {p.n_sites} sites"
        )
    if sparse is None:
        sparse = p.n_sites + 1 > DENSE_SITE_LIMIT

    dim = p.dimension
    env = build_env_hamiltonian(p, sparse=sparse).entries
    pauli = build_local_pauli(p.n_sites, i.k, i.env_axis, sparse=sparse).entries
    hqs = i.qubit_part()
    # qubit bit block 0 carries alpha = 2, block 1 carries alpha = 1
    his_11, his_22, his_off = hqs[0, 0], hqs[1, 1], hqs[0, 1]
    if sparse:
        eye = sp.identity(dim, format="csr")
        m = sp.bmat(
            [
                [env + q.e2 * eye + his_22 * pauli, his_off * pauli],
                [his_off * pauli, env + q.e1 * eye + his_11 * pauli],
            ],
            format="csr",
        )
    else:
        m = np.zeros((2 * dim, 2 * dim))
        m[:dim, :dim] = env + his_22 * pauli
        m[:dim, :dim][np.diag_indices(dim)] += q.e2
        m[dim:, dim:] = env + his_11 * pauli
        m[dim:, dim:][np.diag_indices(dim)] += q.e1
        m[:dim, dim:] = his_off * pauli
        m[dim:, :dim] = his_off * pauli
    return OperatorMatrix(2 * dim, m, total_basis_label(p.n_sites))


def qubit_blocks(arr: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split a total-basis vector/matrix into (alpha=1, alpha=2) row blocks.

    Qubit bit 0 (first half) carries the excited level alpha = 2.
    """
    dim = arr.shape[0]
    if dim % 2:
        raise ContractViolation(f"total dimension {dim} is not even")
    half = dim // 2
    return arr[half:], arr[:half]


def model_from_config(section: dict) -> tuple[ChainParams, QubitParams, InteractionSpec]:
    """Parse the model section of a config file.

    Recognised keys: n_sites, h_x, j_z, defects, delta_s, lambda, f1, f2,
    env_axis, k. ``defects`` defaults to the standard pair, which needs
    n_sites >= 5; pass an explicit empty list to disable defects.
    """
    known = {"n_sites", "h_x", "j_z", "defects", "delta_s", "lambda", "f1", "f2", "env_axis", "k"}
    unknown = set(section) - known
    if unknown:
        raise ConfigurationError(f"unknown model keys: {sorted(unknown)}")
    try:
        n_sites = int(section["n_sites"])
        delta_s = float(section["delta_s"])
        lam = section["lambda"]
    except KeyError as exc:
        raise ConfigurationError(f"missing model key: {exc.args[0]}") from None
    if isinstance(lam, (list, tuple)):
        raise ConfigurationError("model.lambda is a sweep grid; resolve it before parsing")
    raw_defects = section.get("defects", DEFAULT_DEFECTS)
    defects = tuple((int(s), float(d)) for s, d in raw_defects)
    chain = ChainParams(
        n_sites=n_sites,
        h_x=float(section.get("h_x", 0.9)),
        j_z=float(section.get("j_z", 1.0)),
        defects=defects,
    )
    qubit = QubitParams(delta_s=delta_s)
    inter = InteractionSpec(
        lam=float(lam),
        f1=float(section.get("f1", 0.0)),
        f2=float(section.get("f2", 1.0)),
        env_axis=str(section.get("env_axis", "z")),
        k=int(section.get("k", 7)),
    )
    if not 1 <= inter.k <= chain.n_sites:
        raise ConfigurationError(f"coupled site k={inter.k} outside chain of {n_sites} sites")
    return chain, qubit, inter
