import numpy as np
import pytest

from coherelab import (
    ChainParams,
    InteractionSpec,
    QubitParams,
    build_env_hamiltonian,
    build_total_hamiltonian,
    full_diagonalize,
)


@pytest.fixture(scope="session")
def chain6():
    return ChainParams(n_sites=6)


@pytest.fixture(scope="session")
def env6(chain6):
    return full_diagonalize(build_env_hamiltonian(chain6))


@pytest.fixture(scope="session")
def env8():
    return full_diagonalize(build_env_hamiltonian(ChainParams(n_sites=8)))


@pytest.fixture(scope="session")
def env10():
    return full_diagonalize(build_env_hamiltonian(ChainParams(n_sites=10)))


@pytest.fixture(scope="session")
def qubit6():
    return QubitParams(delta_s=0.6)


def make_total(n_sites, delta_s, lam, f1, f2, axis, k):
    chain = ChainParams(n_sites=n_sites)
    qubit = QubitParams(delta_s=delta_s)
    inter = InteractionSpec(lam=lam, f1=f1, f2=f2, env_axis=axis, k=k)
    h = build_total_hamiltonian(qubit, chain, inter)
    return full_diagonalize(h), chain, qubit, inter


@pytest.fixture(scope="session")
def total6_generic():
    """N=6 total system with a mixing interaction, shared across modules."""
    return make_total(6, 0.6, 0.3, 1.0, 1.0, "x", 3)


@pytest.fixture(scope="session")
def total6_offdiag():
    """N=6 total system with zero-diagonal qubit coupling."""
    return make_total(6, 0.6, 0.3, 0.0, 1.0, "x", 3)
