"""Exception hierarchy shared by every module."""

from __future__ import annotations


class CohMismatchError(Exception):
    """Base class for all library errors."""


class NonHermitianInput(CohMismatchError, ValueError):
    pass


class DimensionMismatch(CohMismatchError, ValueError):
    pass


class InvalidDimension(CohMismatchError, ValueError):
    pass


class InvalidState(CohMismatchError, ValueError):
    """A vector or matrix fails the normalisation, trace or PSD checks."""


class EtaOutOfRange(CohMismatchError, ValueError):
    pass


class NoDecomposition(CohMismatchError, ValueError):
    """No positive weight of the ideal state can be split off."""


class ZeroFidelity(CohMismatchError, ValueError):
    pass


class InvalidDistribution(CohMismatchError, ValueError):
    pass


class DegenerateDominantEigenvalue(CohMismatchError, ValueError):
    def __init__(self, gap: float, threshold: float):
        super().__init__(f"dominant eigenvalue gap {gap:.3e} is below {threshold:.1e}")
        self.gap = gap
        self.threshold = threshold


class PerturbationSingular(CohMismatchError, ValueError):
    pass


class ParameterOutOfRange(CohMismatchError, ValueError):
    pass


class InfeasibleSpec(CohMismatchError, ValueError):
    """An extremal-state specification violates a named constraint."""

    def __init__(self, constraint: str, detail: str = ""):
        msg = constraint if not detail else f"{constraint}: {detail}"
        super().__init__(msg)
        self.constraint = constraint


class DegenerateInput(CohMismatchError, ValueError):
    pass


class TooManyQubits(CohMismatchError, ValueError):
    pass


class BranchExplosion(CohMismatchError, ValueError):
    pass


class UnsupportedChannel(CohMismatchError, ValueError):
    pass
