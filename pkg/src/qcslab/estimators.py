"""The computational routes to the QCS and purity.

All routes return a :class:`QcsEstimate` tagging the method, numerator and
denominator, so a benchmark sweep can cross-validate them against each other:

- direct: commutator definition on the density matrix,
- two_copy: the alternating photon-number sums of the interferometric scheme,
- pure_shortcut: 1 + 2(⟨a†a⟩ - |⟨a⟩|²) for pure states,
- classical_mixture: closed form for finite coherent mixtures,
- gaussian: covariance-matrix fast path,
- multimode: the stacked-beam-splitter version (total parity, 1/N average).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDenominatorError, ValidationError
from .fock import DensityOperator, purity_direct, quadratures
from .interferometer import (
    PhotonDistribution,
    multimode_two_copy_output,
)
from .states import ClassicalMixture, CovarianceMatrix

METHODS = ("direct", "two_copy", "pure_shortcut", "wigner_gradient",
           "wigner_laplacian", "gaussian", "classical_mixture", "sampled")

DENOMINATOR_FLOOR = 1e-9


@dataclass(frozen=True)
class QcsEstimate:
    """A QCS² value, the route that produced it, and its ratio decomposition."""

    c_squared: float
    method: str
    numerator: float
    denominator: float
    uncertainty: float | None = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValidationError(f"unknown method {self.method!r}")

    def to_dict(self) -> dict:
        return {"c_squared": self.c_squared, "method": self.method,
                "numerator": self.numerator, "denominator": self.denominator,
                "uncertainty": self.uncertainty}


@dataclass(frozen=True)
class QuasiProbability:
    """Signed normalized transform π_n = (-1)ⁿ p_n / Σ (-1)ⁿ p_n."""

    pi: np.ndarray
    mean_n: float


def _embed_single(op: np.ndarray, dims: tuple[int, ...], mode: int) -> np.ndarray:
    left = int(np.prod(dims[:mode], initial=1))
    right = int(np.prod(dims[mode + 1:], initial=1))
    return np.kron(np.kron(np.eye(left), op), np.eye(right))


def qcs_direct(rho: DensityOperator) -> QcsEstimate:
    """Commutator form: C² = Σ_j Tr([ρ, r_j][r_j, ρ]) / (2N Tr ρ²)."""
    purity = purity_direct(rho)
    if purity < 1e-10:
        raise DegenerateDenominatorError(f"purity {purity:.3e} below resolution")
    n_modes = rho.n_modes
    num = 0.0
    for mode in range(n_modes):
        x, p = quadratures(rho.dims[mode])
        for quad in (x, p):
            r = _embed_single(quad, rho.dims, mode) if n_modes > 1 else quad
            comm = rho.matrix @ r - r @ rho.matrix
            # Tr([ρ,r][r,ρ]) = -Tr([ρ,r]²) = Σ |[ρ,r]_ij|² for anti-Hermitian [ρ,r]...
            num += float(np.sum(np.abs(comm) ** 2))
    numerator = num / (2.0 * n_modes)
    return QcsEstimate(c_squared=numerator / purity, method="direct",
                       numerator=numerator, denominator=purity)


def purity_from_pn(pn: PhotonDistribution) -> float:
    """Purity as the alternating sum Σ (-1)ⁿ p_n (compensated summation)."""
    signs = (-1.0) ** np.arange(len(pn.probs))
    return math.fsum(signs * pn.probs)


def qcs_two_copy(pn: PhotonDistribution) -> QcsEstimate:
    """Two-copy interferometric formula C² = 1 + 2 Σ n(-1)ⁿp_n / Σ (-1)ⁿp_n."""
    n = np.arange(len(pn.probs))
    signs = (-1.0) ** n
    den = math.fsum(signs * pn.probs)
    if abs(den) < DENOMINATOR_FLOOR:
        raise DegenerateDenominatorError(
            f"alternating sum {den:.3e} below resolution; purity not resolvable "
            "at this cutoff/statistics")
    mean_alt = math.fsum(n * signs * pn.probs)
    numerator = math.fsum((1.0 + 2.0 * n) * signs * pn.probs)
    return QcsEstimate(c_squared=1.0 + 2.0 * mean_alt / den, method="two_copy",
                       numerator=numerator, denominator=den)


def quasi_probability(pn: PhotonDistribution) -> QuasiProbability:
    signs = (-1.0) ** np.arange(len(pn.probs))
    den = math.fsum(signs * pn.probs)
    if abs(den) < DENOMINATOR_FLOOR:
        raise DegenerateDenominatorError(f"alternating sum {den:.3e} below resolution")
    pi = signs * pn.probs / den
    mean_n = math.fsum(np.arange(len(pi)) * pi)
    return QuasiProbability(pi=pi, mean_n=mean_n)


def qcs_pure_shortcut(psi: np.ndarray) -> QcsEstimate:
    """Pure-state shortcut C² = 1 + 2(⟨a†a⟩ - |⟨a⟩|²)."""
    psi = np.asarray(psi, dtype=complex)
    norm = float(np.vdot(psi, psi).real)
    if abs(norm - 1.0) > 1e-6:
        raise ValidationError(f"state vector norm {norm} is not 1")
    n = np.arange(len(psi))
    mean_num = float(np.vdot(psi, n * psi).real)
    mean_a = np.vdot(psi[:-1], np.sqrt(n[1:]) * psi[1:])
    thermal_photons = mean_num - abs(mean_a) ** 2
    c2 = 1.0 + 2.0 * thermal_photons
    return QcsEstimate(c_squared=c2, method="pure_shortcut",
                       numerator=c2, denominator=1.0)


def qcs_classical_mixture(mix: ClassicalMixture) -> QcsEstimate:
    """Closed form for a finite coherent mixture: the difference-mode P function
    has support (α_j - α_i)/√2 with weights w_i w_j; with D_ij = |α_i - α_j|²
    this gives C² = 1 - ⟨D e^{-D}⟩ / ⟨e^{-D}⟩ (coherent-state parity overlaps
    e^{-2|γ|²} with |γ_ij|² = D_ij / 2)."""
    den_terms = []
    extra_terms = []
    for wi, ai in zip(mix.weights, mix.amplitudes):
        for wj, aj in zip(mix.weights, mix.amplitudes):
            d2 = abs(aj - ai) ** 2
            weight = wi * wj * np.exp(-d2)
            den_terms.append(weight)
            extra_terms.append(weight * d2)
    den = math.fsum(den_terms)
    extra = math.fsum(extra_terms)
    return QcsEstimate(c_squared=1.0 - extra / den, method="classical_mixture",
                       numerator=den - extra, denominator=den)


def qcs_multimode(rho: DensityOperator, **kwargs) -> QcsEstimate:
    """Stacked-beam-splitter QCS for an N-mode state:
    C² = (1/N) Σ_k Tr(ρ_d (1+2n̂_{d_k}) (-1)^{Σ_j n̂_{d_j}}) / Tr(ρ_d (-1)^{Σ_j n̂_{d_j}})."""
    rho_d = multimode_two_copy_output(rho, **kwargs)
    n_modes = rho_d.n_modes
    diag = np.real(np.diag(rho_d.matrix))
    grids = np.meshgrid(*[np.arange(d) for d in rho_d.dims], indexing="ij")
    total_n = sum(grids).reshape(-1)
    parity = (-1.0) ** total_n
    den = math.fsum(parity * diag)
    if abs(den) < DENOMINATOR_FLOOR:
        raise DegenerateDenominatorError(f"total-parity sum {den:.3e} below resolution")
    num = math.fsum(
        math.fsum(parity * (1.0 + 2.0 * g.reshape(-1)) * diag) for g in grids
    ) / n_modes
    return QcsEstimate(c_squared=num / den, method="two_copy",
                       numerator=num, denominator=den)


# --- Gaussian fast path (vacuum covariance = I/2) ---

def purity_gaussian(gamma: CovarianceMatrix) -> float:
    """P = 1 / (2^N √det γ)."""
    det = np.linalg.det(gamma.gamma)
    if det <= 0:
        raise ValidationError("covariance matrix must be positive definite")
    return float(1.0 / (2.0 ** gamma.n_modes * np.sqrt(det)))


def overlap_gaussian(ga: CovarianceMatrix, gb: CovarianceMatrix) -> float:
    """Tr(ρ_a ρ_b) = exp(-δᵀ(γa+γb)⁻¹δ/2) / √det(γa+γb)."""
    if ga.gamma.shape != gb.gamma.shape:
        raise ValidationError("covariance matrices must have equal dimension")
    total = ga.gamma + gb.gamma
    det = np.linalg.det(total)
    if det <= 0:
        raise ValidationError("γa + γb must be positive definite")
    delta = ga.mean - gb.mean
    quad = float(delta @ np.linalg.solve(total, delta))
    return float(np.exp(-0.5 * quad) / np.sqrt(det))


def qcs_gaussian(gamma: CovarianceMatrix) -> QcsEstimate:
    """C² = Tr(γ⁻¹)/4 (per mode pair, divided by the mode count)."""
    det = np.linalg.det(gamma.gamma)
    if det <= 0:
        raise ValidationError("covariance matrix must be positive definite")
    trace_inv = float(np.trace(np.linalg.inv(gamma.gamma)))
    purity = purity_gaussian(gamma)
    c2 = trace_inv / (4.0 * gamma.n_modes)
    return QcsEstimate(c_squared=c2, method="gaussian",
                       numerator=c2 * purity, denominator=purity)
