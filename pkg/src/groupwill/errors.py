"""Error types shared across the solver suite."""


class GroupwillError(Exception):
    """Base class for errors raised by this package."""


class InvalidMemberError(GroupwillError, ValueError):
    """A member id does not exist in the graph."""


class InfeasibleError(GroupwillError, RuntimeError):
    """No group of the requested size can be built under the constraints."""


class InfeasibleStartError(InfeasibleError):
    """A start node sits in a component with fewer than k nodes."""


class EmptyCandidateError(GroupwillError, ValueError):
    """A scenario transform produced an empty candidate set."""


class ScaleGuardError(GroupwillError, RuntimeError):
    """An exhaustive operation was refused because the instance is too large."""
