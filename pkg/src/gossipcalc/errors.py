"""Exception hierarchy for gossipcalc."""


class GossipCalcError(Exception):
    """Base class for all gossipcalc errors."""


class InvalidParameterError(GossipCalcError, ValueError):
    """A parameter is outside its documented range."""


class EdgeListParseError(GossipCalcError, ValueError):
    """Edge-list text is malformed."""


class SelfLoopError(GossipCalcError, ValueError):
    """An edge connects a node to itself."""


class DuplicateEdgeError(GossipCalcError, ValueError):
    """The same undirected edge appears more than once."""


class DisconnectedGraphError(GossipCalcError, ValueError):
    """The graph is not connected."""


class GraphGenerationError(GossipCalcError, RuntimeError):
    """A randomized generator exhausted its retry budget."""


class SizeLimitError(GossipCalcError, ValueError):
    """Problem size exceeds the limit of an exact method.

    Callers hitting this on conductance should fall back to the
    closed forms or bounds for the standard graph families.
    """


class NumericalError(GossipCalcError, RuntimeError):
    """An iterative numerical routine failed to converge."""


class InvalidStateError(GossipCalcError, RuntimeError):
    """Protocol state violates an invariant (indicates a bug upstream)."""


class InsufficientRecordsError(GossipCalcError, ValueError):
    """Too few trial records to resolve the requested quantile."""


class AllTrialsFailedError(GossipCalcError, RuntimeError):
    """Every trial in the ensemble failed the accuracy criterion."""
