"""Exception types shared across the solver modules."""


class FlockkitError(Exception):
    """Base class for all flockkit errors."""


class GridError(FlockkitError):
    """Invalid mesh construction parameters."""


class CFLViolation(FlockkitError):
    """Time step exceeds the stability bound of a scheme."""


class VacuumError(FlockkitError):
    """An operation required strictly positive density and found none."""


class ConfigError(FlockkitError):
    """Malformed or inconsistent run configuration."""
