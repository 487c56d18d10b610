"""Exception types shared across the package."""


class BepgpError(Exception):
    """Base class for all package errors."""


class BranchSingularity(BepgpError):
    """A square-root branch point was hit while building frequencies."""


class Overflow(BepgpError):
    """A basis term exceeded the exponent cap even after column scaling."""


class DiscreteFamily(BepgpError):
    """Operation requires a continuous family but got a discrete one."""


class ContinuousFamily(BepgpError):
    """Operation requires a discrete family but got a continuous one."""


class NotPD(BepgpError):
    """Hermitian factorization failed after all jitter escalations."""


class DomainError(BepgpError):
    """Point lies outside the domain of an oracle or benchmark."""


class ZeroTruth(BepgpError):
    """Relative error requested against an identically-zero reference."""


class EmptyGrid(BepgpError):
    """Lattice used for a quadrature does not intersect the domain."""


class EmptyDataset(BepgpError):
    """Dataset construction produced no observations."""


class ConfigError(BepgpError):
    """Experiment configuration is malformed or inconsistent."""


class TrainingError(BepgpError):
    """Optimization failed irrecoverably (carries the epoch index)."""
