"""Constructors for the benchmark state families.

Every constructor returns a valid :class:`~qcslab.fock.DensityOperator` with
its truncation trace deficit recorded. Gaussian covariance parametrizations
(vacuum = I/2) are provided for the Gaussian fast path.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .errors import CutoffError, ValidationError
from .fock import (
    DEFAULT_DEFICIT_TOL,
    DensityOperator,
    annihilation,
    conjugate_unitary,
    displacement_operator,
    phase_rotation_operator,
)

STATE_KINDS = (
    "coherent",
    "fock",
    "thermal",
    "squeezed_vacuum",
    "rho_2M",
    "rho_even_M",
    "mixture",
    "displaced",
    "gaussian",
)

SCHEMA_VERSION = 1


def coherent_amplitudes(alpha: complex, dim: int) -> np.ndarray:
    """Fock amplitudes e^{-|α|²/2} αⁿ/√n! of the coherent state |α⟩."""
    n = np.arange(dim)
    log_mag = -0.5 * abs(alpha) ** 2 + n * np.log(abs(alpha)) - 0.5 * gammaln(n + 1) \
        if alpha != 0 else np.concatenate([[0.0], np.full(dim - 1, -np.inf)])
    phase = np.exp(1j * n * np.angle(alpha)) if alpha != 0 else np.ones(dim)
    return np.exp(log_mag) * phase


def _pure(vec: np.ndarray, *, deficit_tol: float) -> DensityOperator:
    deficit = 1.0 - float(np.vdot(vec, vec).real)
    if deficit > deficit_tol:
        raise CutoffError(
            f"state tail mass {deficit:.3e} exceeds deficit tolerance {deficit_tol:.1e}"
        )
    return DensityOperator.from_matrix(
        np.outer(vec, vec.conj()), (len(vec),), deficit_tol=deficit_tol
    )


def coherent(alpha: complex, cutoff: int,
             deficit_tol: float = DEFAULT_DEFICIT_TOL) -> DensityOperator:
    """|α⟩⟨α| on the truncated space."""
    return _pure(coherent_amplitudes(alpha, cutoff), deficit_tol=deficit_tol)


def fock(n: int, cutoff: int) -> DensityOperator:
    if not 0 <= n < cutoff:
        raise CutoffError(f"Fock level {n} does not fit cutoff {cutoff}")
    vec = np.zeros(cutoff, dtype=complex)
    vec[n] = 1.0
    return _pure(vec, deficit_tol=0.0)


def thermal(q: float | None = None, cutoff: int = 2, *,
            mean_n: float | None = None,
            deficit_tol: float = DEFAULT_DEFICIT_TOL) -> DensityOperator:
    """Thermal state with diagonal (1-q) qⁿ; accepts q or the mean photon number."""
    if (q is None) == (mean_n is None):
        raise ValidationError("specify exactly one of q or mean_n")
    if q is None:
        if mean_n < 0:
            raise ValidationError(f"mean photon number must be >= 0, got {mean_n}")
        q = mean_n / (1.0 + mean_n)
    if not 0.0 <= q < 1.0:
        raise ValidationError(f"thermal parameter must satisfy 0 <= q < 1, got {q}")
    diag = (1.0 - q) * q ** np.arange(cutoff)
    deficit = q ** cutoff
    if deficit > deficit_tol:
        raise CutoffError(
            f"thermal tail q^dim = {deficit:.3e} exceeds deficit tolerance {deficit_tol:.1e}"
        )
    return DensityOperator(np.diag(diag).astype(complex), (cutoff,), trace_deficit=deficit)


def squeezed_vacuum(r: float, cutoff: int,
                    deficit_tol: float = DEFAULT_DEFICIT_TOL) -> DensityOperator:
    """Squeezed vacuum with ⟨n̂⟩ = sinh²r; x is the anti-squeezed quadrature for r > 0,
    matching the covariance diag(e^{2r}, e^{-2r})/2."""
    k = np.arange((cutoff + 1) // 2)
    log_c = 0.5 * (gammaln(2 * k + 1)) - k * np.log(2.0) - gammaln(k + 1) \
        + k * np.log(np.tanh(abs(r))) if r != 0 else np.where(k == 0, 0.0, -np.inf)
    amps = np.exp(log_c) / np.sqrt(np.cosh(r))
    if r < 0:
        amps = amps * (-1.0) ** k
    vec = np.zeros(cutoff, dtype=complex)
    vec[2 * k] = amps
    return _pure(vec, deficit_tol=deficit_tol)


def rho_2m(m: int, cutoff: int) -> DensityOperator:
    """Uniform mixture of |1⟩ .. |2M⟩."""
    if m < 1:
        raise ValidationError(f"M must be >= 1, got {m}")
    if 2 * m >= cutoff:
        raise CutoffError(f"rho_2M with M={m} needs cutoff > {2 * m}")
    diag = np.zeros(cutoff)
    diag[1:2 * m + 1] = 1.0 / (2 * m)
    return DensityOperator(np.diag(diag).astype(complex), (cutoff,), trace_deficit=0.0)


def rho_even_m(m: int, cutoff: int) -> DensityOperator:
    """Uniform mixture of |2⟩, |4⟩, .., |2M⟩."""
    if m < 1:
        raise ValidationError(f"M must be >= 1, got {m}")
    if 2 * m >= cutoff:
        raise CutoffError(f"rho_even_M with M={m} needs cutoff > {2 * m}")
    diag = np.zeros(cutoff)
    diag[2:2 * m + 1:2] = 1.0 / m
    return DensityOperator(np.diag(diag).astype(complex), (cutoff,), trace_deficit=0.0)


@dataclass(frozen=True)
class ClassicalMixture:
    """Finite mixture of coherent states: Σ w_i |α_i⟩⟨α_i|."""

    weights: tuple[float, ...]
    amplitudes: tuple[complex, ...]

    def __post_init__(self):
        if len(self.weights) != len(self.amplitudes) or not self.weights:
            raise ValidationError("weights and amplitudes must have equal nonzero length")
        if any(w < 0 for w in self.weights):
            raise ValidationError("mixture weights must be non-negative")
        if abs(math.fsum(self.weights) - 1.0) > 1e-12:
            raise ValidationError("mixture weights must sum to 1 within 1e-12")


def classical_mixture(mix: ClassicalMixture, cutoff: int,
                      deficit_tol: float = DEFAULT_DEFICIT_TOL) -> DensityOperator:
    mat = np.zeros((cutoff, cutoff), dtype=complex)
    for w, alpha in zip(mix.weights, mix.amplitudes):
        vec = coherent_amplitudes(alpha, cutoff)
        mat += w * np.outer(vec, vec.conj())
    return DensityOperator.from_matrix(mat, (cutoff,), deficit_tol=deficit_tol)


def random_classical_mixture(rng: np.random.Generator, max_terms: int = 5,
                             max_abs: float = 2.0) -> ClassicalMixture:
    """Seeded random coherent mixture: amplitudes uniform in the disk, Dirichlet weights."""
    n = int(rng.integers(1, max_terms + 1))
    radii = max_abs * np.sqrt(rng.uniform(0, 1, n))
    phases = rng.uniform(0, 2 * np.pi, n)
    amps = radii * np.exp(1j * phases)
    weights = rng.dirichlet(np.ones(n))
    weights = weights / math.fsum(weights)
    return ClassicalMixture(tuple(weights), tuple(amps))


def displace(rho: DensityOperator, beta: complex) -> DensityOperator:
    """D(β) ρ D†(β). Documented accuracy domain: |β|² <= dim/4."""
    if rho.n_modes != 1:
        raise ValidationError("displace expects a single-mode state")
    return conjugate_unitary(rho, displacement_operator(beta, rho.dim))


def phase_rotate(rho: DensityOperator, theta: float) -> DensityOperator:
    """e^{iθn̂} ρ e^{-iθn̂}."""
    if rho.n_modes != 1:
        raise ValidationError("phase_rotate expects a single-mode state")
    return conjugate_unitary(rho, phase_rotation_operator(theta, rho.dim))


def pure_state_vector(rho: DensityOperator, tol: float = 1e-9) -> np.ndarray:
    """Extract the state vector of a (numerically) pure density operator."""
    evals, evecs = np.linalg.eigh(rho.matrix)
    if evals[:-1].max(initial=0.0) > tol:
        raise ValidationError("state is not pure")
    return evecs[:, -1] * np.sqrt(evals[-1])


# --- Gaussian covariance parametrizations (vacuum = I/2) ---

@dataclass(frozen=True)
class CovarianceMatrix:
    """Second-moment matrix γ of a Gaussian state, plus its mean-field vector."""

    gamma: np.ndarray
    mean: np.ndarray = field(default=None)

    def __post_init__(self):
        g = np.asarray(self.gamma, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1] or g.shape[0] % 2:
            raise ValidationError("covariance matrix must be square with even dimension")
        if np.max(np.abs(g - g.T)) > 1e-10:
            raise ValidationError("covariance matrix must be symmetric")
        object.__setattr__(self, "gamma", g)
        mean = np.zeros(g.shape[0]) if self.mean is None else np.asarray(self.mean, float)
        if mean.shape != (g.shape[0],):
            raise ValidationError("mean vector length must match covariance dimension")
        object.__setattr__(self, "mean", mean)
        n = g.shape[0] // 2
        omega = np.kron(np.eye(n), np.array([[0.0, 1.0], [-1.0, 0.0]]))
        evals = np.linalg.eigvalsh(g + 0.5j * omega)
        if evals.min() < -1e-9:
            raise ValidationError("covariance matrix violates the uncertainty relation")

    @property
    def n_modes(self) -> int:
        return self.gamma.shape[0] // 2


def gaussian_covariance(spec: "StateSpec") -> CovarianceMatrix:
    """Covariance matrix of a Gaussian StateSpec (coherent/thermal/squeezed/gaussian)."""
    kind, p = spec.kind, spec.params
    if kind == "coherent":
        alpha = complex(p["alpha"])
        mean = np.sqrt(2.0) * np.array([alpha.real, alpha.imag])
        return CovarianceMatrix(0.5 * np.eye(2), mean)
    if kind == "thermal":
        mean_n = p["mean_n"] if "mean_n" in p else p["q"] / (1.0 - p["q"])
        return CovarianceMatrix(0.5 * (1.0 + 2.0 * mean_n) * np.eye(2))
    if kind == "squeezed_vacuum":
        r = float(p["r"])
        return CovarianceMatrix(0.5 * np.diag([np.exp(2 * r), np.exp(-2 * r)]))
    if kind == "gaussian":
        return CovarianceMatrix(np.asarray(p["gamma"], float),
                                np.asarray(p.get("mean"), float) if p.get("mean") is not None else None)
    raise ValidationError(f"no Gaussian covariance for state kind {kind!r}")


# --- declarative state specification (the CLI input record) ---

@dataclass(frozen=True)
class StateSpec:
    """Declarative benchmark-state description; serialized as versioned JSON."""

    kind: str
    params: dict
    cutoff: int | None = None

    def __post_init__(self):
        if self.kind not in STATE_KINDS:
            raise ValidationError(f"unknown state kind {self.kind!r}")

    def to_json(self) -> str:
        return json.dumps(
            {"schema": SCHEMA_VERSION, "kind": self.kind,
             "params": _params_to_json(self.params), "cutoff": self.cutoff},
            indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "StateSpec":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"invalid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise ValidationError("state spec must be a JSON object")
        if doc.get("schema") != SCHEMA_VERSION:
            raise ValidationError(f"unsupported schema version {doc.get('schema')!r}")
        if "kind" not in doc:
            raise ValidationError("state spec missing 'kind'")
        params = _params_from_json(doc.get("params", {}))
        cutoff = doc.get("cutoff")
        if cutoff is not None and (not isinstance(cutoff, int) or cutoff < 2):
            raise ValidationError(f"cutoff must be an integer >= 2, got {cutoff!r}")
        return cls(kind=doc["kind"], params=params, cutoff=cutoff)


def _complex_to_json(z: complex):
    return z.real if z.imag == 0 else [z.real, z.imag]


def _complex_from_json(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, list) and len(v) == 2:
        return complex(v[0], v[1])
    raise ValidationError(f"expected a number or [re, im] pair, got {v!r}")


def _params_to_json(params: dict) -> dict:
    out = {}
    for key, val in params.items():
        if isinstance(val, complex):
            out[key] = _complex_to_json(val)
        elif isinstance(val, (list, tuple)) and val and isinstance(val[0], complex):
            out[key] = [_complex_to_json(z) for z in val]
        elif isinstance(val, np.ndarray):
            out[key] = val.tolist()
        else:
            out[key] = val
    return out


def _params_from_json(params) -> dict:
    if not isinstance(params, dict):
        raise ValidationError("params must be a JSON object")
    out = dict(params)
    for key in ("alpha", "beta"):
        if key in out:
            out[key] = _complex_from_json(out[key])
    if "amplitudes" in out:
        out["amplitudes"] = [_complex_from_json(v) for v in out["amplitudes"]]
    return out


def mean_photon_number(spec: StateSpec) -> float:
    """Rough ⟨n̂⟩ of a spec, used for default-cutoff selection."""
    p = spec.params
    if spec.kind == "coherent":
        return abs(complex(p["alpha"])) ** 2
    if spec.kind == "fock":
        return float(p["n"])
    if spec.kind == "thermal":
        return p["mean_n"] if "mean_n" in p else p["q"] / (1.0 - p["q"])
    if spec.kind == "squeezed_vacuum":
        return float(np.sinh(p["r"]) ** 2)
    if spec.kind == "rho_2M":
        return float(p["M"]) + 0.5
    if spec.kind == "rho_even_M":
        return float(p["M"]) + 1.0
    if spec.kind == "mixture":
        amps = p["amplitudes"]
        weights = p["weights"]
        return float(sum(w * abs(a) ** 2 for w, a in zip(weights, amps)))
    if spec.kind == "displaced":
        base = StateSpec(p["base"]["kind"], _params_from_json(p["base"].get("params", {})))
        return mean_photon_number(base) + abs(complex(p["beta"])) ** 2
    raise ValidationError(f"no Fock-space mean photon number for kind {spec.kind!r}")


def recommended_cutoff(spec: StateSpec, *, two_copy: bool = True,
                       headroom_tol: float = 1e-9) -> int:
    """Default cutoff: ceil(4(⟨n̂⟩+3)) for smooth families, 2·max_n+4 for Fock
    mixtures. When the two-copy pipeline is the target, the photon-number tail
    of a probe build picks the dimension that satisfies the interference
    headroom rule (families with slow tails, like thermal states, need more
    levels than the mean-based rule alone provides)."""
    if spec.kind == "fock":
        base = 2 * int(spec.params["n"]) + 4
    elif spec.kind in ("rho_2M", "rho_even_M"):
        base = 2 * (2 * int(spec.params["M"])) + 4
    else:
        base = math.ceil(4.0 * (mean_photon_number(spec) + 3.0))
    if not two_copy:
        return base
    probe_dim = min(max(4 * base, 64), 512)
    probe = build_state(spec, cutoff=probe_dim, deficit_tol=1.0)
    marginal = probe.number_marginal()
    tail_above = np.concatenate([np.cumsum(marginal[::-1])[::-1][1:], [0.0]])
    levels = np.nonzero(tail_above <= headroom_tol)[0]
    support = int(levels[0]) if levels.size else probe_dim - 1
    return max(2 * base, 2 * support + 4)


def build_state(spec: StateSpec, *, cutoff: int | None = None,
                deficit_tol: float = DEFAULT_DEFICIT_TOL) -> DensityOperator:
    """Construct the density operator described by a StateSpec."""
    dim = cutoff or spec.cutoff or recommended_cutoff(spec)
    kind, p = spec.kind, spec.params
    try:
        if kind == "coherent":
            return coherent(complex(p["alpha"]), dim, deficit_tol)
        if kind == "fock":
            return fock(int(p["n"]), dim)
        if kind == "thermal":
            if "mean_n" in p and "q" in p:
                raise ValidationError("thermal spec must give q or mean_n, not both")
            if "mean_n" in p:
                return thermal(cutoff=dim, mean_n=float(p["mean_n"]), deficit_tol=deficit_tol)
            return thermal(float(p["q"]), dim, deficit_tol=deficit_tol)
        if kind == "squeezed_vacuum":
            return squeezed_vacuum(float(p["r"]), dim, deficit_tol)
        if kind == "rho_2M":
            return rho_2m(int(p["M"]), dim)
        if kind == "rho_even_M":
            return rho_even_m(int(p["M"]), dim)
        if kind == "mixture":
            mix = ClassicalMixture(tuple(p["weights"]), tuple(p["amplitudes"]))
            return classical_mixture(mix, dim, deficit_tol)
        if kind == "displaced":
            base_doc = p["base"]
            base = StateSpec(base_doc["kind"], _params_from_json(base_doc.get("params", {})))
            return displace(build_state(base, cutoff=dim, deficit_tol=deficit_tol),
                            complex(p["beta"]))
        if kind == "gaussian":
            raise ValidationError(
                "kind 'gaussian' has no Fock-space constructor; use the Gaussian route")
    except KeyError as exc:
        raise ValidationError(f"state kind {kind!r} missing parameter {exc}") from exc
    raise ValidationError(f"unknown state kind {kind!r}")
