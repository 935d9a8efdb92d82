"""Exception types shared across the package."""


class StructureError(ValueError):
    """An algebraic structure fails one of its defining invariants."""


class ConstructionError(RuntimeError):
    """A construction cannot produce a usable result for the given inputs."""


class DomainError(ValueError):
    """A field evaluation left its mathematical domain (e.g. log of a non-positive entry)."""
