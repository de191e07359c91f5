"""Exception types shared across the package."""


class JohnspaceError(Exception):
    """Base class for all package errors."""


class DomainError(JohnspaceError):
    """A point lies outside the domain, or a domain is malformed."""


class ResolutionError(JohnspaceError):
    """Discretization produced no usable vertices."""


class UnreachableError(JohnspaceError):
    """No path exists between the requested vertices."""


class DegenerateCurveError(JohnspaceError):
    """A curve touches the boundary (boundary distance is not positive)."""


class MalformedCurveError(JohnspaceError):
    """A curve fails a checker's structural precondition."""


class ParameterError(JohnspaceError):
    """An argument violates its documented range."""


class CaseRoutingError(JohnspaceError):
    """A curve construction was invoked outside its case precondition."""


class ConstructionError(JohnspaceError):
    """A constructed curve violates its guaranteed bound."""


class OracleContractError(JohnspaceError):
    """A caller-supplied curve oracle broke its stated contract."""


class SingularPointError(JohnspaceError):
    """A map was evaluated at a point where its formula is singular."""
