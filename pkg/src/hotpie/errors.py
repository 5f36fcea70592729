"""Error types raised by the core library.

Every error carries a stable ``code`` (its class name) so front ends can map
failures to documented messages without string matching.
"""

from __future__ import annotations


class HotpieError(Exception):
    """Base class for all domain errors."""

    @property
    def code(self) -> str:
        return type(self).__name__


# --- catalog ---------------------------------------------------------------

class MalformedCatalog(HotpieError):
    """Catalog document does not parse or is structurally invalid."""


class UnknownFactor(HotpieError):
    """A factor id outside the fixed set of 6 primary / 15 secondary factors."""


class DuplicateTemplate(HotpieError):
    """The same (keyword, secondary) pair appears twice in a catalog."""


class EmptySecondary(HotpieError):
    """A secondary factor has no path templates in the catalog."""


# --- model -----------------------------------------------------------------

class EmptyName(HotpieError):
    """An object was given an empty display name."""


class UnknownObject(HotpieError):
    """Referenced object id does not exist in the project."""


class DuplicateId(HotpieError):
    """An explicitly supplied object or path id is already taken."""


class UnknownPath(HotpieError):
    """Referenced causal-path id does not exist in the project."""


class SelfLoop(HotpieError):
    """A causal path must link two distinct objects."""


class InvalidInitial(HotpieError):
    """A new causal path cannot start out Discharged."""


class FactorMismatch(HotpieError):
    """Endpoint secondary factor does not belong to its primary factor."""


class PhaseRegression(HotpieError):
    """Lifecycle phase moved backwards (or failed to strictly advance)."""


# --- analysis --------------------------------------------------------------

class DuplicateViewId(HotpieError):
    """Two view profiles with the same view id were merged."""


class MalformedProfiles(HotpieError):
    """View-profiles document does not parse or is structurally invalid."""


# --- stpa bridge -----------------------------------------------------------

class MalformedStructure(HotpieError):
    """Control-structure document does not parse or is structurally invalid."""


class DanglingRelation(HotpieError):
    """A control relation references a node that is not declared."""


# --- persistence -----------------------------------------------------------

class SchemaMismatch(HotpieError):
    """Stored document has an unsupported schema version."""


class IntegrityError(HotpieError):
    """Stored project data violates a model invariant."""
