"""Finite-shot simulation of the photon-counting experiment.

Counts are multinomial draws from p_n (numpy PCG64, seeded); the QCS is the
plug-in estimator on empirical frequencies, with a seeded nonparametric
bootstrap for the statistical error. Per-resample RNG streams are derived
from the record seed via SeedSequence.spawn, so results are reproducible and
the resamples could be evaluated in parallel.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDenominatorError, ValidationError
from .estimators import DENOMINATOR_FLOOR, qcs_two_copy
from .interferometer import PhotonDistribution

RNG_ALGORITHM = "numpy.random.PCG64"
SCHEMA_VERSION = 1
DEFAULT_RESAMPLES = 1000


@dataclass(frozen=True)
class ShotRecord:
    """Histogram of photon counts from a finite number of shots."""

    counts: np.ndarray
    shots: int
    seed: int

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        object.__setattr__(self, "counts", counts)
        if counts.sum() != self.shots:
            raise ValidationError("counts must sum to shots")

    def frequencies(self) -> np.ndarray:
        return self.counts / self.shots

    def to_json(self) -> str:
        return json.dumps({"schema": SCHEMA_VERSION, "rng": RNG_ALGORITHM,
                           "seed": self.seed, "shots": self.shots,
                           "counts": self.counts.tolist()}, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ShotRecord":
        doc = json.loads(text)
        if doc.get("schema") != SCHEMA_VERSION:
            raise ValidationError(f"unsupported schema version {doc.get('schema')!r}")
        return cls(counts=np.asarray(doc["counts"], dtype=np.int64),
                   shots=int(doc["shots"]), seed=int(doc["seed"]))


@dataclass(frozen=True)
class SampledEstimate:
    """Plug-in QCS² with bootstrap standard error and 95% percentile CI."""

    c_squared: float
    std_error: float
    ci_low: float
    ci_high: float
    shots: int
    resamples: int
    seed: int
    denominator_unstable: bool = False

    def to_dict(self) -> dict:
        return {"c_squared": self.c_squared, "method": "sampled",
                "std_error": self.std_error, "ci_low": self.ci_low,
                "ci_high": self.ci_high, "shots": self.shots,
                "resamples": self.resamples, "seed": self.seed,
                "rng": RNG_ALGORITHM,
                "denominator_unstable": self.denominator_unstable}


def sample_counts(pn: PhotonDistribution, shots: int, seed: int) -> ShotRecord:
    """Multinomial draw from p_n (renormalized over its support)."""
    if shots < 1:
        raise ValidationError(f"shots must be >= 1, got {shots}")
    probs = pn.probs / pn.probs.sum()
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(shots, probs)
    return ShotRecord(counts=counts, shots=shots, seed=seed)


def _plugin(freqs: np.ndarray) -> tuple[float, float]:
    """Vectorized plug-in C² and its denominator (bootstrap inner loop)."""
    n = np.arange(len(freqs))
    signs = (-1.0) ** n
    den = float(signs @ freqs)
    num = float((n * signs) @ freqs)
    return 1.0 + 2.0 * num / den if den != 0 else np.nan, den


def estimate_qcs(rec: ShotRecord, resamples: int = DEFAULT_RESAMPLES) -> SampledEstimate:
    """Plug-in QCS² on the empirical frequencies with a seeded bootstrap CI."""
    if rec.shots < 100:
        raise ValidationError(f"need at least 100 shots, got {rec.shots}")
    if resamples < 2:
        raise ValidationError(f"need at least 2 resamples, got {resamples}")
    freqs = rec.frequencies()
    point = qcs_two_copy(PhotonDistribution(probs=freqs))
    if abs(point.denominator) < DENOMINATOR_FLOOR:
        raise DegenerateDenominatorError(
            f"empirical alternating sum {point.denominator:.3e} below resolution")
    children = np.random.SeedSequence(rec.seed).spawn(resamples)
    boots = np.empty(resamples)
    unstable = False
    for i, child in enumerate(children):
        counts = np.random.default_rng(child).multinomial(rec.shots, freqs)
        c2, den = _plugin(counts / rec.shots)
        boots[i] = c2
        if den * point.denominator <= 0 or abs(den) < DENOMINATOR_FLOOR:
            unstable = True
    finite = boots[np.isfinite(boots)]
    if len(finite) < 2:
        raise DegenerateDenominatorError("bootstrap denominators collapsed to zero")
    ci_low, ci_high = np.percentile(finite, [2.5, 97.5])
    return SampledEstimate(
        c_squared=point.c_squared, std_error=float(finite.std(ddof=1)),
        ci_low=float(ci_low), ci_high=float(ci_high), shots=rec.shots,
        resamples=resamples, seed=rec.seed, denominator_unstable=unstable)


def estimate_from_exact(pn: PhotonDistribution) -> float:
    """Infinite-shot limit: the plug-in estimator applied to exact p_n; equals
    qcs_two_copy bit-for-bit (same code path)."""
    return qcs_two_copy(pn).c_squared
