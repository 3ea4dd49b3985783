"""Exception taxonomy shared across the package.

Pipeline stage failures are reported through return values (a failed stage
name plus a stage report), not exceptions; the exceptions here cover misuse
and structural dead ends that callers are expected to handle.
"""


class PowerhamError(Exception):
    """Base class for every error raised by this package."""


class InputError(PowerhamError, ValueError):
    """Malformed or out-of-contract arguments."""


class SizeError(PowerhamError):
    """An exact-mode routine was asked to exceed its instance-size cap."""


class NoCliquesError(PowerhamError):
    """A clique hypergraph has no hyperedges left to work with."""


class AssemblyError(PowerhamError):
    """Joining path pieces failed; the message names the failing pair."""


class CapacityError(PowerhamError):
    """Not enough free absorbers to place every requested vertex."""


class InfeasibleSetError(PowerhamError):
    """A hitting-set constraint cannot be satisfied; names the set index."""
