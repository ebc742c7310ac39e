"""The two-copy measurement circuit: 50:50 beam splitter(s), reduction to the
difference mode, and the output photon-number distribution p_n.

Two routes are provided: the dense matrix pipeline (any state) and the
combinatorial fast path for phase-invariant (Fock-diagonal) states, which is
exact at any input support because the interference amplitudes are evaluated
in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import expm
from scipy.special import gammaln

from .errors import (
    HeadroomError,
    MemoryGuardError,
    RoundoffBudgetError,
    ValidationError,
)
from .fock import DensityOperator, partial_trace, tensor

ROUNDOFF_BUDGET = 1e-8
DEFAULT_HEADROOM_TOL = 1e-8
MEMORY_GUARD_DIM = 4096  # largest total two-copy dimension the dense path will allocate


@dataclass(frozen=True)
class PhotonDistribution:
    """Photon-number distribution p_n of the difference mode.

    ``deficit`` is 1 - Σ p_n (truncation loss); ``roundoff`` is the negative
    probability mass clipped to zero.
    """

    probs: np.ndarray
    deficit: float = 0.0
    roundoff: float = 0.0

    @classmethod
    def from_values(cls, values: np.ndarray) -> "PhotonDistribution":
        values = np.asarray(values, dtype=float)
        roundoff = float(-values[values < 0].sum())
        if roundoff > ROUNDOFF_BUDGET:
            raise RoundoffBudgetError(
                f"clipped negative probability mass {roundoff:.3e} exceeds budget "
                f"{ROUNDOFF_BUDGET:.1e}")
        probs = np.clip(values, 0.0, None)
        deficit = 1.0 - math.fsum(probs)
        return cls(probs=probs, deficit=deficit, roundoff=roundoff)

    def __len__(self) -> int:
        return len(self.probs)

    def to_csv(self, path) -> None:
        """CSV schema: columns n, p_n, cumulative (header row mandatory)."""
        cumulative = np.cumsum(self.probs)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("n,p_n,cumulative\n")
            for n, (p, c) in enumerate(zip(self.probs, cumulative)):
                fh.write(f"{n},{float(p)!r},{float(c)!r}\n")


@lru_cache(maxsize=4)
def beam_splitter_unitary(dim: int) -> np.ndarray:
    """50:50 beam splitter exp((π/4)(a†b - ab†)), built block-by-block over the
    conserved total-photon-number subspaces (exact per complete block)."""
    d2 = dim * dim
    u = np.zeros((d2, d2), dtype=complex)
    for total in range(2 * dim - 1):
        ks = list(range(max(0, total - dim + 1), min(total, dim - 1) + 1))
        idx = [k * dim + (total - k) for k in ks]
        gen = np.zeros((len(ks), len(ks)))
        for i, k in enumerate(ks[:-1]):
            # a†b: |k, total-k> -> sqrt((k+1)(total-k)) |k+1, total-k-1>
            amp = np.sqrt((k + 1) * (total - k))
            gen[i + 1, i] = amp
            gen[i, i + 1] = -amp
        u[np.ix_(idx, idx)] = expm((np.pi / 4.0) * gen)
    u.setflags(write=False)
    return u


def _check_headroom(rho: DensityOperator, tol: float, mode: int = 0) -> None:
    dim = rho.dims[mode]
    limit = dim // 2 - 1
    probs = rho.number_marginal(mode)
    tail = math.fsum(probs[limit + 1:])
    if tail > tol:
        raise HeadroomError(
            f"photon-number tail mass {tail:.3e} above level {limit} exceeds {tol:.1e}; "
            f"two-copy interference would spill past cutoff {dim}")


def two_copy_output(rho: DensityOperator, *,
                    headroom_tol: float = DEFAULT_HEADROOM_TOL) -> DensityOperator:
    """Difference-mode reduced state ρ_d = Tr_c(U_BS (ρ⊗ρ) U_BS†)."""
    if rho.n_modes != 1:
        raise ValidationError("two_copy_output expects a single-mode state")
    _check_headroom(rho, headroom_tol)
    dim = rho.dim
    if dim * dim > MEMORY_GUARD_DIM:
        raise MemoryGuardError(
            f"two-copy dimension {dim * dim} exceeds memory guard {MEMORY_GUARD_DIM}")
    u = beam_splitter_unitary(dim)
    out = u @ tensor(rho, rho).matrix @ u.conj().T
    joint = DensityOperator(0.5 * (out + out.conj().T), (dim, dim),
                            trace_deficit=rho.trace_deficit)
    return partial_trace(joint, keep=1)


def photon_distribution(rho_a: DensityOperator, rho_b: DensityOperator, *,
                        headroom_tol: float = DEFAULT_HEADROOM_TOL) -> PhotonDistribution:
    """p_n of the difference mode for two (possibly distinct) single-mode inputs."""
    if rho_a.n_modes != 1 or rho_b.n_modes != 1:
        raise ValidationError("photon_distribution expects single-mode states")
    if rho_a.dim != rho_b.dim:
        raise ValidationError("inputs must share the same cutoff")
    dim = rho_a.dim
    if dim * dim > MEMORY_GUARD_DIM:
        raise MemoryGuardError(
            f"two-copy dimension {dim * dim} exceeds memory guard {MEMORY_GUARD_DIM}")
    sa = rho_a.effective_support(headroom_tol / 2)
    sb = rho_b.effective_support(headroom_tol / 2)
    if sa + sb > dim - 1:
        raise HeadroomError(
            f"joint support {sa}+{sb} exceeds cutoff headroom {dim - 1}")
    u = beam_splitter_unitary(dim)
    # p_n = Σ_m <m,n| U (ρ_a⊗ρ_b) U† |m,n>: only the output diagonal is needed
    out_diag = np.einsum("ij,ij->i", u @ tensor(rho_a, rho_b).matrix, u.conj())
    diag = np.real(out_diag).reshape(dim, dim).sum(axis=0)
    return PhotonDistribution.from_values(diag)


# --- combinatorial fast path (phase-invariant states) ---

def hom_amplitudes(n_out: int, big_n: int, big_np: int) -> np.ndarray:
    """Interference amplitudes c(n, n', N, N') for Fock inputs |N⟩⊗|N'⟩, as a
    vector over n' (log-factorial evaluation with sign tracking)."""
    nps = np.arange(big_np + 1)
    valid = (n_out - nps >= 0) & (big_n - n_out + nps >= 0)
    out = np.zeros(big_np + 1)
    if not valid.any():
        return out
    nps = nps[valid]
    log_num = 0.5 * (gammaln(big_n + 1) + gammaln(big_np + 1)
                     + gammaln(big_n + big_np - n_out + 1) + gammaln(n_out + 1))
    log_den = (0.5 * (big_n + big_np) * np.log(2.0)
               + gammaln(n_out - nps + 1) + gammaln(nps + 1)
               + gammaln(big_n - n_out + nps + 1) + gammaln(big_np - nps + 1))
    signs = (-1.0) ** (big_n - n_out + nps)
    out[nps] = signs * np.exp(log_num - log_den)
    return out


@lru_cache(maxsize=None)
def hom_photon_distribution(big_n: int, big_np: int) -> np.ndarray:
    """p_n for Fock inputs |N⟩⊗|N'⟩: p_n = (Σ_{n'} c(n, n', N, N'))²."""
    if big_n < 0 or big_np < 0:
        raise ValidationError("photon numbers must be non-negative")
    p = np.array([hom_amplitudes(n, big_n, big_np).sum()
                  for n in range(big_n + big_np + 1)]) ** 2
    p.setflags(write=False)
    return p


def photon_distribution_phase_invariant(diag) -> PhotonDistribution:
    """p_n for a Fock-diagonal input ρ = Σ λ_m |m⟩⟨m| (two identical copies),
    via p_n = Σ_{m,m'} λ_m λ_{m'} p_n^{m,m'}. Exact at any support."""
    lam = np.asarray(diag, dtype=float)
    if lam.min(initial=0.0) < -1e-12:
        raise ValidationError("diagonal weights must be non-negative")
    if lam.sum() > 1.0 + 1e-9:
        raise ValidationError("diagonal weights must sum to at most 1")
    top = int(np.nonzero(lam > 0)[0].max(initial=0))
    p = np.zeros(2 * top + 1)
    for m in range(top + 1):
        if lam[m] == 0:
            continue
        pmm = hom_photon_distribution(m, m)
        p[:len(pmm)] += lam[m] ** 2 * pmm
        for mp in range(m + 1, top + 1):
            if lam[mp] == 0:
                continue
            pmm = hom_photon_distribution(m, mp)
            p[:len(pmm)] += 2.0 * lam[m] * lam[mp] * pmm
    return PhotonDistribution.from_values(p)


def is_fock_diagonal(rho: DensityOperator, tol: float = 1e-12) -> bool:
    off = rho.matrix - np.diag(np.diag(rho.matrix))
    return bool(np.max(np.abs(off), initial=0.0) <= tol)


def thermal_photon_distribution(q: float, n_max: int) -> PhotonDistribution:
    """Closed-form output for two identical thermal inputs: p_n = (1-q) qⁿ
    (a beam splitter maps a pair of identical thermal states to itself)."""
    if not 0.0 <= q < 1.0:
        raise ValidationError(f"thermal parameter must satisfy 0 <= q < 1, got {q}")
    n = np.arange(n_max + 1)
    return PhotonDistribution(probs=(1.0 - q) * q ** n, deficit=q ** (n_max + 1))


# --- multimode stack ---

def _apply_pair_bs(t: np.ndarray, u4: np.ndarray, k: int, n_modes: int) -> np.ndarray:
    """Apply a two-mode unitary to ket axes (k, n_modes+k) and the matching bra axes
    of a 4·n_modes-axis tensor (ket axes first)."""
    n_ax = 2 * n_modes
    t = np.tensordot(u4, t, axes=([2, 3], [k, n_modes + k]))
    t = np.moveaxis(t, [0, 1], [k, n_modes + k])
    t = np.tensordot(t, u4.conj(), axes=([n_ax + k, n_ax + n_modes + k], [2, 3]))
    t = np.moveaxis(t, [-2, -1], [n_ax + k, n_ax + n_modes + k])
    return t


def multimode_two_copy_output(rho: DensityOperator, *,
                              headroom_tol: float = DEFAULT_HEADROOM_TOL) -> DensityOperator:
    """Pairwise 50:50 beam-splitter stack on two copies of an N-mode state,
    traced down to the N difference modes."""
    n_modes = rho.n_modes
    total_dim = rho.dim ** 2
    if total_dim > MEMORY_GUARD_DIM:
        raise MemoryGuardError(
            f"two-copy dimension {total_dim} exceeds memory guard {MEMORY_GUARD_DIM}")
    for k in range(n_modes):
        _check_headroom(rho, headroom_tol, mode=k)
    dims2 = rho.dims + rho.dims
    t = np.kron(rho.matrix, rho.matrix).reshape(dims2 + dims2)
    nm2 = 2 * n_modes
    for k in range(n_modes):
        d = rho.dims[k]
        u4 = beam_splitter_unitary(d).reshape(d, d, d, d)
        t = _apply_pair_bs(t, u4, k, nm2 // 2)
    joint = DensityOperator(t.reshape(total_dim, total_dim), dims2,
                            trace_deficit=rho.trace_deficit)
    # difference modes sit in the second-copy slots
    return partial_trace(joint, keep=list(range(n_modes, 2 * n_modes)))
