"""Wigner-function evaluation and the phase-space QCS routes.

The Wigner function is evaluated from the Fock-basis displaced-parity kernel
W(α) = (1/π) Tr[ρ D(2α) (-1)^n̂] with closed-form displacement matrix elements
(scaled Laguerre recurrences, exponential factored in from the start), never
by numerical Fourier transform. Origin values and the origin Laplacian are
computed analytically from parity traces.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDenominatorError, GridError, ValidationError
from .estimators import QcsEstimate
from .fock import DensityOperator, purity_direct
from .interferometer import two_copy_output

DEFAULT_SPACING = 0.04
EXTENT_PADDING = 1.2
# grid half-width covers mean offset plus this many standard deviations,
# keeping the 2-D Gaussian tail mass below ~1e-8
EXTENT_SIGMAS = 6.1


@dataclass(frozen=True)
class WignerGrid:
    """W(x, p) sampled on a uniform grid; values[i, j] = W(x_axis[i], p_axis[j])."""

    values: np.ndarray
    x_axis: np.ndarray
    p_axis: np.ndarray

    @property
    def spacing(self) -> float:
        return float(self.x_axis[1] - self.x_axis[0])

    def integrate(self, integrand: np.ndarray | None = None) -> float:
        """Trapezoidal ∫ f dx dp over the grid (f defaults to W)."""
        f = self.values if integrand is None else integrand
        return float(np.trapezoid(np.trapezoid(f, self.p_axis, axis=1), self.x_axis))

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("x,p,W\n")
            for i, x in enumerate(self.x_axis):
                for j, p in enumerate(self.p_axis):
                    fh.write(f"{float(x)!r},{float(p)!r},{float(self.values[i, j])!r}\n")

    def to_binary(self, path) -> None:
        """Compact layout: header (nx, np, x0, dx, p0, dp) + row-major doubles."""
        with open(path, "wb") as fh:
            fh.write(struct.pack("<2q4d", len(self.x_axis), len(self.p_axis),
                                 self.x_axis[0], self.spacing,
                                 self.p_axis[0], self.p_axis[1] - self.p_axis[0]))
            fh.write(np.ascontiguousarray(self.values, dtype="<f8").tobytes())


def _second_moments(rho: DensityOperator) -> tuple[float, float, float, float]:
    """Means and standard deviations of x and p for grid sizing."""
    from .fock import quadratures

    x, p = quadratures(rho.dim)
    mx = float(np.trace(rho.matrix @ x).real)
    mp = float(np.trace(rho.matrix @ p).real)
    vx = float(np.trace(rho.matrix @ x @ x).real) - mx ** 2
    vp = float(np.trace(rho.matrix @ p @ p).real) - mp ** 2
    return mx, mp, math.sqrt(max(vx, 0.5)), math.sqrt(max(vp, 0.5))


def default_axes(rho: DensityOperator,
                 spacing: float = DEFAULT_SPACING) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric uniform axes wide enough that the state's phase-space tail
    (mean offset + EXTENT_SIGMAS standard deviations, padded) is negligible."""
    mx, mp, sx, sp = _second_moments(rho)
    half = EXTENT_PADDING * (max(abs(mx), abs(mp)) + EXTENT_SIGMAS * max(sx, sp) + 1.0)
    n_half = int(np.ceil(half / spacing))
    axis = spacing * np.arange(-n_half, n_half + 1)
    return axis, axis.copy()


def wigner_eval(rho: DensityOperator, x_axis: np.ndarray | None = None,
                p_axis: np.ndarray | None = None, *,
                spacing: float = DEFAULT_SPACING,
                norm_tol: float | None = 1e-6) -> WignerGrid:
    """Evaluate W on a grid from the Fock kernel; checks ∫W = Tr ρ unless
    norm_tol is None."""
    if rho.n_modes != 1:
        raise ValidationError("wigner_eval expects a single-mode state")
    if x_axis is None or p_axis is None:
        x_axis, p_axis = default_axes(rho, spacing)
    x_axis = np.asarray(x_axis, dtype=float)
    p_axis = np.asarray(p_axis, dtype=float)
    values = _wigner_values(rho.matrix, x_axis, p_axis)
    grid = WignerGrid(values=values, x_axis=x_axis, p_axis=p_axis)
    if norm_tol is not None:
        total = grid.integrate()
        if abs(total - rho.trace()) > norm_tol:
            raise GridError(
                f"Wigner normalization check failed: integral {total:.8f} vs trace "
                f"{rho.trace():.8f}; grid extent or spacing insufficient")
    return grid


BAND_FLOOR = 1e-15  # co-diagonals below this magnitude cannot move W above roundoff


def _band_accumulator(coeff, d, babs2, log_b2):
    """Σ_m coeff[m] G_{m,d}(|β|²) for one co-diagonal, as a function of |β|²
    only (the angular factor phase^d is applied by the caller)."""
    from scipy.special import gammaln

    nz = np.nonzero(np.abs(coeff) > BAND_FLOOR)[0]
    if len(nz) == 0:
        return None
    last = int(nz[-1])
    g_prev = np.zeros_like(babs2)
    # G_{0,d} = |β|^d e^{-|β|²/2} / √(d!), kept in log domain so the high
    # bands neither overflow (β^d) nor lose the 1/√(d!) scale
    if d == 0:
        g = np.exp(-0.5 * babs2)
    else:
        with np.errstate(invalid="ignore"):
            g = np.exp(0.5 * (d * log_b2 - gammaln(d + 1.0)) - 0.5 * babs2)
        g = np.where(babs2 > 0, g, 0.0)
    acc = np.zeros(babs2.shape, dtype=complex)
    for m in range(last + 1):
        c = coeff[m]
        if c != 0:
            acc += c * g
        if m < last:
            g_next = ((2 * m + d + 1 - babs2) * g
                      - np.sqrt(m * (m + d)) * g_prev) / np.sqrt((m + 1) * (m + 1 + d))
            g_prev, g = g, g_next
    return acc


def _axis_symmetric(axis):
    return len(axis) % 2 == 1 and np.allclose(axis, -axis[::-1], atol=1e-12)


def _wigner_values(mat: np.ndarray, x_axis: np.ndarray, p_axis: np.ndarray) -> np.ndarray:
    """Displaced-parity kernel, accumulated per co-diagonal of ρ with a scaled
    Laguerre recurrence (the Gaussian envelope is kept inside the recurrence).

    The radial factor G_{m,d} depends on |β|² only, so on origin-symmetric
    axes the recurrence runs on one quadrant and the full grid is assembled
    from its real/imaginary parts (β maps to ±β, ±β̄ under axis reflections).
    """
    dim = mat.shape[0]
    symmetric = _axis_symmetric(x_axis) and _axis_symmetric(p_axis)
    if symmetric:
        xq = x_axis[len(x_axis) // 2:][:, None]
        pq = p_axis[len(p_axis) // 2:][None, :]
    else:
        xq = x_axis[:, None]
        pq = p_axis[None, :]
    beta = np.sqrt(2.0) * (xq + 1j * pq)  # D(2α) argument with α = (x+ip)/√2
    babs2 = np.abs(beta) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        log_b2 = np.where(babs2 > 0, np.log(babs2), -np.inf)
        phase = np.where(babs2 > 0, beta / np.sqrt(babs2), 0.0)
    signs = (-1.0) ** np.arange(dim)
    # per-quadrant accumulators over (sign of x, sign of p); without symmetry
    # q_pp covers the whole grid and the others stay unused
    q_pp = np.zeros(babs2.shape)
    q_pm = np.zeros(babs2.shape)
    q_mp = np.zeros(babs2.shape)
    q_mm = np.zeros(babs2.shape)
    ph_pow = np.ones_like(phase)
    for d in range(dim):
        if d > 0:
            ph_pow = ph_pow * phase
        band = np.diagonal(mat, offset=d)  # ρ_{m, m+d}
        acc = _band_accumulator(band * signs[:dim - d], d, babs2, log_b2)
        if acc is None:
            continue
        if d == 0:
            q_pp += acc.real
            if symmetric:
                q_pm += acc.real
                q_mp += acc.real
                q_mm += acc.real
            continue
        # t(x,p) = 2 Re(acc · phase^d); reflecting p conjugates phase^d and
        # reflecting x additionally multiplies it by (-1)^d
        u = 2.0 * (acc.real * ph_pow.real)
        v = 2.0 * (acc.imag * ph_pow.imag)
        q_pp += u - v
        if symmetric:
            s = signs[d]
            q_pm += u + v
            q_mp += s * (u + v)
            q_mm += s * (u - v)
    if not symmetric:
        return q_pp / np.pi
    ix = np.abs(np.arange(len(x_axis)) - len(x_axis) // 2)
    jp = np.abs(np.arange(len(p_axis)) - len(p_axis) // 2)
    neg_x = np.arange(len(x_axis)) < len(x_axis) // 2
    neg_p = np.arange(len(p_axis)) < len(p_axis) // 2
    w = np.empty((len(x_axis), len(p_axis)))
    w[np.ix_(~neg_x, ~neg_p)] = q_pp[np.ix_(ix[~neg_x], jp[~neg_p])]
    w[np.ix_(~neg_x, neg_p)] = q_pm[np.ix_(ix[~neg_x], jp[neg_p])]
    w[np.ix_(neg_x, ~neg_p)] = q_mp[np.ix_(ix[neg_x], jp[~neg_p])]
    w[np.ix_(neg_x, neg_p)] = q_mm[np.ix_(ix[neg_x], jp[neg_p])]
    return w / np.pi


def wigner_origin(rho: DensityOperator) -> float:
    """W(0,0) = Tr(ρ (-1)^n̂)/π, evaluated analytically (parity identity)."""
    signs = (-1.0) ** np.arange(rho.dim)
    return math.fsum(signs * np.real(np.diag(rho.matrix))) / np.pi


def wigner_laplacian_origin(rho: DensityOperator) -> float:
    """ΔW(0,0) = -(4/π) Tr(ρ (1+2n̂)(-1)^n̂), from the Weyl transform of
    (x²+p²)(-1)^n̂."""
    n = np.arange(rho.dim)
    signs = (-1.0) ** n
    return -4.0 / np.pi * math.fsum(signs * (1.0 + 2.0 * n) * np.real(np.diag(rho.matrix)))


def overlap_wigner(rho_a: DensityOperator, rho_b: DensityOperator, *,
                   spacing: float = DEFAULT_SPACING) -> float:
    """Tr(ρ_a ρ_b) as 2π ∫ W_a W_b on a shared grid covering both states."""
    ax_a, _ = default_axes(rho_a, spacing)
    ax_b, _ = default_axes(rho_b, spacing)
    axis = ax_a if len(ax_a) >= len(ax_b) else ax_b
    ga = wigner_eval(rho_a, axis, axis, norm_tol=1e-5)
    gb = wigner_eval(rho_b, axis, axis, norm_tol=1e-5)
    return 2.0 * np.pi * ga.integrate(ga.values * gb.values)


def qcs_wigner_laplacian(rho: DensityOperator, **kwargs) -> QcsEstimate:
    """C² = -(1/4) ΔW_d / W_d at the origin, with the difference-mode Wigner
    derivatives evaluated analytically (no finite differences).

    Both origin quantities depend only on the diagonal of ρ_d, so Fock-diagonal
    inputs take the combinatorial route (exact at any support) instead of the
    dense two-copy pipeline."""
    from .interferometer import is_fock_diagonal, photon_distribution_phase_invariant

    if rho.n_modes == 1 and is_fock_diagonal(rho):
        pn = photon_distribution_phase_invariant(np.real(np.diag(rho.matrix))).probs
        signs = (-1.0) ** np.arange(len(pn))
        w0 = math.fsum(signs * pn) / np.pi
        lap = -4.0 / np.pi * math.fsum(signs * (1.0 + 2.0 * np.arange(len(pn))) * pn)
    else:
        rho_d = two_copy_output(rho, **kwargs)
        w0 = wigner_origin(rho_d)
        lap = wigner_laplacian_origin(rho_d)
    if abs(w0) < 1e-9:
        raise DegenerateDenominatorError(f"W_d(0,0) = {w0:.3e} below resolution")
    return QcsEstimate(c_squared=-0.25 * lap / w0, method="wigner_laplacian",
                       numerator=-0.25 * np.pi * lap, denominator=np.pi * w0)


def _gradient_ratio(rho: DensityOperator, spacing: float) -> float:
    grid = wigner_eval(rho, *default_axes(rho, spacing), norm_tol=1e-5)
    h = grid.spacing
    wx = np.gradient(grid.values, h, axis=0)
    wp = np.gradient(grid.values, h, axis=1)
    num = grid.integrate(wx ** 2 + wp ** 2)
    den = grid.integrate(grid.values ** 2)
    return num / (2.0 * den)


def qcs_wigner_gradient(rho: DensityOperator, *,
                        spacing: float = DEFAULT_SPACING,
                        conv_tol: float = 1e-3) -> QcsEstimate:
    """Gradient-norm route C² = ‖∇W‖² / (2‖W‖²), central finite differences
    with Richardson extrapolation over grid refinements.

    Raises GridError if successive refinements disagree beyond conv_tol.
    """
    if spacing > 0.05:
        raise ValidationError(f"grid spacing {spacing} too coarse (need <= 0.05)")
    f1 = _gradient_ratio(rho, spacing)
    f2 = _gradient_ratio(rho, spacing / 2.0)
    r1 = (4.0 * f2 - f1) / 3.0
    # second-order differencing: the O(h⁴) residual of r1 is far below
    # |f2 - f1|, so a third refinement is only needed when that gap is large
    if abs(f2 - f1) < 2e-4:
        return QcsEstimate(c_squared=r1, method="wigner_gradient",
                           numerator=r1, denominator=1.0,
                           uncertainty=abs(f2 - f1))
    f3 = _gradient_ratio(rho, spacing / 4.0)
    r2 = (4.0 * f3 - f2) / 3.0
    if abs(r2 - r1) > conv_tol:
        raise GridError(
            f"finite-difference refinement did not converge: {r1!r} vs {r2!r}")
    r3 = (16.0 * r2 - r1) / 15.0
    return QcsEstimate(c_squared=r3, method="wigner_gradient",
                       numerator=r3, denominator=1.0, uncertainty=abs(r2 - r1))
