"""Truncated Fock-space linear algebra.

Dense operators on one or more bosonic modes truncated to a finite number of
Fock levels per mode. Conventions used throughout the package:

- quadratures x = (a + a†)/√2 and p = (a - a†)/(i√2), so that [x, p] = i on
  untruncated levels and x² + p² = 1 + 2n̂ (vacuum variance 1/2),
- tensor products put the first factor on the slow (leftmost) index,
- density operators carry their truncation trace deficit explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import CutoffError, ValidationError

DEFAULT_DEFICIT_TOL = 1e-6
HERMITICITY_TOL = 1e-12
EIGENVALUE_TOL = 1e-10

SWAP_CONSTRUCTIONS = ("permutation", "exponential", "mach_zehnder")


def annihilation(dim: int) -> np.ndarray:
    """Ladder matrix a with a[n-1, n] = sqrt(n)."""
    if dim < 2:
        raise ValidationError(f"Fock cutoff must be >= 2, got {dim}")
    return np.diag(np.sqrt(np.arange(1, dim)), k=1).astype(complex)


def creation(dim: int) -> np.ndarray:
    return annihilation(dim).conj().T


def number_operator(dim: int) -> np.ndarray:
    return np.diag(np.arange(dim)).astype(complex)


def parity_operator(dim: int) -> np.ndarray:
    """(-1)^n̂ as a diagonal matrix."""
    return np.diag((-1.0) ** np.arange(dim)).astype(complex)


def quadratures(dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Position and momentum quadratures, vacuum variance 1/2."""
    a = annihilation(dim)
    ad = a.conj().T
    x = (a + ad) / np.sqrt(2.0)
    p = (a - ad) / (1j * np.sqrt(2.0))
    return x, p


@dataclass(frozen=True)
class DensityOperator:
    """A density operator on a truncated (multi)mode Fock space.

    ``trace_deficit`` records the probability mass lost to truncation; it is
    carried along so downstream operations can refuse inputs that are too
    badly clipped.
    """

    matrix: np.ndarray
    dims: tuple[int, ...]
    trace_deficit: float = 0.0

    def __post_init__(self):
        d = int(np.prod(self.dims))
        if self.matrix.shape != (d, d):
            raise ValidationError(
                f"matrix shape {self.matrix.shape} incompatible with dims {self.dims}"
            )

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_modes(self) -> int:
        return len(self.dims)

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    @classmethod
    def from_matrix(
        cls,
        matrix: np.ndarray,
        dims: tuple[int, ...] | None = None,
        *,
        deficit_tol: float = DEFAULT_DEFICIT_TOL,
        check: bool = True,
    ) -> "DensityOperator":
        matrix = np.asarray(matrix, dtype=complex)
        if dims is None:
            dims = (matrix.shape[0],)
        dims = tuple(int(d) for d in dims)
        drift = np.max(np.abs(matrix - matrix.conj().T))
        if check and drift > 1e-8:
            raise ValidationError(f"matrix is not Hermitian (drift {drift:.3e})")
        matrix = 0.5 * (matrix + matrix.conj().T)
        tr = float(np.trace(matrix).real)
        deficit = 1.0 - tr
        if check:
            if deficit < -1e-9:
                raise ValidationError(f"trace {tr} exceeds 1")
            if deficit > deficit_tol:
                raise CutoffError(
                    f"trace deficit {deficit:.3e} exceeds tolerance {deficit_tol:.1e}; "
                    "increase the Fock cutoff"
                )
        return cls(matrix=matrix, dims=dims, trace_deficit=max(deficit, 0.0))

    def validate(self, *, deficit_tol: float = DEFAULT_DEFICIT_TOL) -> None:
        """Full validity check: Hermitian, PSD, trace within the deficit tolerance."""
        drift = np.max(np.abs(self.matrix - self.matrix.conj().T))
        if drift > HERMITICITY_TOL:
            raise ValidationError(f"Hermiticity drift {drift:.3e}")
        evals = np.linalg.eigvalsh(self.matrix)
        if evals.min() < -EIGENVALUE_TOL:
            raise ValidationError(f"negative eigenvalue {evals.min():.3e}")
        tr = self.trace()
        if not (1.0 - deficit_tol - 1e-12 <= tr <= 1.0 + 1e-12):
            raise CutoffError(f"trace {tr} outside [1 - {deficit_tol:.1e}, 1]")

    def number_marginal(self, mode: int = 0) -> np.ndarray:
        """Photon-number distribution of one mode (diagonal of its reduced state)."""
        reduced = partial_trace(self, keep=mode) if self.n_modes > 1 else self
        return np.clip(np.diag(reduced.matrix).real, 0.0, None)

    def effective_support(self, tail_tol: float = 1e-12, mode: int = 0) -> int:
        """Smallest s such that the photon-number tail mass above s is <= tail_tol."""
        probs = self.number_marginal(mode)
        tail = np.cumsum(probs[::-1])[::-1]
        above = np.concatenate([tail[1:], [0.0]])
        ok = np.nonzero(above <= tail_tol)[0]
        return int(ok[0]) if ok.size else len(probs) - 1


def tensor(a: DensityOperator, b: DensityOperator) -> DensityOperator:
    """Kronecker product ρ_a ⊗ ρ_b; the first factor is the slow index."""
    mat = np.kron(a.matrix, b.matrix)
    deficit = 1.0 - a.trace() * b.trace()
    return DensityOperator(matrix=mat, dims=a.dims + b.dims, trace_deficit=max(deficit, 0.0))


def partial_trace(state: DensityOperator, keep) -> DensityOperator:
    """Trace out all modes except ``keep`` (an index or sequence of indices)."""
    if isinstance(keep, (int, np.integer)):
        keep = [int(keep)]
    keep = list(keep)
    n = state.n_modes
    if any(k < 0 or k >= n for k in keep):
        raise ValidationError(f"mode index out of range: keep={keep}, n_modes={n}")
    dims = state.dims
    t = state.matrix.reshape(dims + dims)
    traced = [m for m in range(n) if m not in keep]
    for count, m in enumerate(sorted(traced, reverse=True)):
        nm = n - count  # modes remaining before this trace
        t = np.trace(t, axis1=m, axis2=m + nm)
    sorted_dims = tuple(dims[k] for k in sorted(keep))
    d = int(np.prod(sorted_dims))
    # after tracing, the layout follows sorted mode order; restore keep order
    order = list(np.argsort(np.argsort(keep)))
    if order != list(range(len(keep))):
        t = t.reshape(sorted_dims + sorted_dims)
        t = t.transpose(order + [len(keep) + o for o in order])
    mat = t.reshape(d, d)
    mat = 0.5 * (mat + mat.conj().T)
    kept_dims = tuple(dims[k] for k in keep)
    return DensityOperator(matrix=mat, dims=kept_dims, trace_deficit=state.trace_deficit)


def conjugate_unitary(state: DensityOperator, unitary: np.ndarray) -> DensityOperator:
    """U ρ U†, re-symmetrized to absorb floating-point Hermiticity drift."""
    mat = unitary @ state.matrix @ unitary.conj().T
    mat = 0.5 * (mat + mat.conj().T)
    deficit = max(state.trace_deficit, 1.0 - float(np.trace(mat).real))
    return DensityOperator(matrix=mat, dims=state.dims, trace_deficit=deficit)


def purity_direct(rho: DensityOperator) -> float:
    """Tr ρ², evaluated as the squared Frobenius norm (ρ Hermitian)."""
    return float(np.sum(np.abs(rho.matrix) ** 2))


def matrix_exponential(generator: np.ndarray) -> np.ndarray:
    """Internal utility: exp(G) by scaling-and-squaring (scipy)."""
    return expm(generator)


def displacement_operator(beta: complex, dim: int) -> np.ndarray:
    """D(β) = exp(β a† - β* a) on the truncated space.

    Accuracy degrades once |β|² approaches dim/4; callers should keep headroom.
    """
    a = annihilation(dim)
    return matrix_exponential(beta * a.conj().T - np.conj(beta) * a)


def phase_rotation_operator(theta: float, dim: int) -> np.ndarray:
    """exp(iθ n̂), a diagonal phase-space rotation."""
    return np.diag(np.exp(1j * theta * np.arange(dim)))


def swap_operator(dim: int, construction: str = "permutation") -> np.ndarray:
    """Two-mode swap Ŝ in one of its three equivalent constructions.

    ``permutation`` is exact at any cutoff; the two exponential forms are
    corrupted on the truncated top photon-number shells.
    """
    if construction not in SWAP_CONSTRUCTIONS:
        raise ValidationError(
            f"unknown construction {construction!r}; expected one of {SWAP_CONSTRUCTIONS}"
        )
    d2 = dim * dim
    if construction == "permutation":
        s = np.zeros((d2, d2), dtype=complex)
        for m in range(dim):
            for n in range(dim):
                s[n * dim + m, m * dim + n] = 1.0
        return s
    a = np.kron(annihilation(dim), np.eye(dim))
    b = np.kron(np.eye(dim), annihilation(dim))
    if construction == "exponential":
        gen = (a.conj().T - b.conj().T) @ (a - b)
        return matrix_exponential(0.5j * np.pi * gen)
    # mach_zehnder: U_BS† (-1)^(n_b) U_BS
    from .interferometer import beam_splitter_unitary  # local import avoids a cycle

    u = beam_splitter_unitary(dim)
    parity_b = np.kron(np.eye(dim), parity_operator(dim))
    return u.conj().T @ parity_b @ u
