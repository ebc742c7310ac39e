"""Exception hierarchy shared across the package."""


class QcslabError(Exception):
    """Base class for all qcslab errors."""


class ValidationError(QcslabError):
    """Malformed input: bad parameters, schemas, or operator structure."""


class CutoffError(QcslabError):
    """The requested state does not fit the Fock cutoff (trace deficit too large)."""


class HeadroomError(CutoffError):
    """Two-copy interference would spill past the cutoff (support > dim/2 - 1)."""


class MemoryGuardError(CutoffError):
    """Multimode two-copy space exceeds the configured memory guard."""


class DegenerateDenominatorError(QcslabError):
    """Alternating photon-number sum (purity estimate) vanished below resolution."""


class RoundoffBudgetError(QcslabError):
    """Accumulated negative-probability clipping exceeded the round-off budget."""


class GridError(QcslabError):
    """Phase-space grid too small or finite-difference refinement did not converge."""
