"""Closed-form predictions for the long-time-averaged qubit coherence.

Every prediction targets the element rho_12 (levels ordered 1, 2). The eta
coefficients are evaluated from the actual 2x2 interaction matrix in the
qubit energy basis, so the stationarity identity

    rho_12 = eta_d * F_bar(2,1) + eta_r * (F_bar(2,2) - F_bar(1,1))

holds exactly against the spectral F quantities; the weak, intermediate and
generic formulas then replace the F terms by their smooth-profile estimates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation, NearSingularityError
from .lattice import InteractionSpec, QubitParams
from .spectral import SmoothCurve

AMPLITUDE_BALANCE_TOL = 0.1
DENOMINATOR_TOL = 0.05


@dataclass(frozen=True)
class EtaCoefficients:
    """Interaction-to-splitting ratios, convention (alpha, beta) = (1, 2)."""

    eta_d: float
    eta_r: float


def eta_coefficients(q: QubitParams, i: InteractionSpec) -> EtaCoefficients:
    """eta_d = (H^IS_11 - H^IS_22) / (E2 - E1), eta_r = H^IS_12 / (E2 - E1).

    For the coupling ``lam * (f1 S^z + f2 S^x)`` this gives
    eta_d = -lam*f1/delta_s and eta_r = lam*f2/(2*delta_s).
    """
    his = i.qubit_part()
    gap = q.e2 - q.e1
    return EtaCoefficients(
        eta_d=float((his[0, 0] - his[1, 1]).real / gap),
        eta_r=float(his[0, 1].real / gap),
    )


@dataclass(frozen=True)
class PredictionInput:
    """Ingredients shared by the coherence formulas.

    ``rho_diag`` holds the exact (rho_11, rho_22) needed by the intermediate
    and generic modes; the weak mode works from the amplitudes alone.
    """

    c: np.ndarray
    h_curve: SmoothCurve
    e0: float
    delta_s: float
    rho_diag: tuple[float, float] | None = None

    def __post_init__(self):
        c = np.asarray(self.c, dtype=complex)
        if abs(np.linalg.norm(c) - 1.0) > 1e-10:
            raise ContractViolation("qubit amplitudes must be normalized")
        lo, hi = self.h_curve.support[0], self.h_curve.support[-1]
        if lo > self.e0 - self.delta_s or hi < self.e0 + self.delta_s:
            raise ContractViolation(
                "h(E) support must cover [e0 - delta_s, e0 + delta_s]"
            )
        object.__setattr__(self, "c", c)
        c.setflags(write=False)

    @property
    def h0(self) -> float:
        return float(self.h_curve(self.e0))

    @property
    def e_alpha(self) -> tuple[float, float]:
        """Shifted evaluation energies E_alpha = E0 + |c_beta|^2 (E_beta - E_alpha)."""
        p1, p2 = abs(self.c[0]) ** 2, abs(self.c[1]) ** 2
        return (self.e0 + p2 * self.delta_s, self.e0 - p1 * self.delta_s)

    @property
    def h_alpha(self) -> tuple[float, float]:
        e1, e2 = self.e_alpha
        return (float(self.h_curve(e1)), float(self.h_curve(e2)))


@dataclass(frozen=True)
class WeakPrediction:
    value: complex
    valid: bool
    note: str = ""


def predict_weak(inp: PredictionInput, eta: EtaCoefficients) -> WeakPrediction:
    """Very-weak-coupling value eta_r * (|c2|^2 - |c1|^2) * h(E0).

    Flagged invalid when the populations are nearly balanced, where the
    neglected contributions can dominate.
    """
    p1, p2 = abs(inp.c[0]) ** 2, abs(inp.c[1]) ** 2
    value = eta.eta_r * (p2 - p1) * inp.h0
    if abs(p1 - p2) < AMPLITUDE_BALANCE_TOL:
        return WeakPrediction(value, False, "populations nearly balanced")
    return WeakPrediction(value, True)


def _diag_combination(inp: PredictionInput) -> float:
    if inp.rho_diag is None:
        raise ContractViolation("prediction needs the exact diagonal elements")
    h1, h2 = inp.h_alpha
    r11, r22 = inp.rho_diag
    return h2 * r22 - h1 * r11


def predict_intermediate(inp: PredictionInput, eta: EtaCoefficients) -> complex:
    """Relatively-weak to intermediate coupling: eta_r*(h2 rho_22 - h1 rho_11)."""
    return eta.eta_r * _diag_combination(inp)


def predict_generic(inp: PredictionInput, eta: EtaCoefficients) -> complex:
    """Generic interaction form with the (1 - eta_d h0) denominator correction."""
    denom = 1.0 - eta.eta_d * inp.h0
    if abs(denom) <= DENOMINATOR_TOL:
        raise NearSingularityError(
            f"|1 - eta_d h0| = {abs(denom):.3g} too small for a reliable prediction"
        )
    return (eta.eta_r / denom) * _diag_combination(inp)
