"""Exception types raised across the package."""


class ShadowSweepError(Exception):
    """Base class for all package errors."""


class PointOutsideEnvironment(ShadowSweepError):
    """A query point lies outside the free space."""


class EmptyRegion(ShadowSweepError):
    """An operation needing positive area was given an empty region."""


class InvalidEdge(ShadowSweepError):
    """A straight-line joint motion leaves the free space."""


class InvalidConfig(ShadowSweepError):
    """A joint configuration has a pursuer outside the free space."""


class EmptyGraph(ShadowSweepError):
    """A query requiring vertices was made on an empty graph."""


class CoverageStall(ShadowSweepError):
    """Web construction exceeded its safety cap without covering E."""


class NoRoot(ShadowSweepError):
    """The Poisson budget equation has no root for the given alpha."""


class Timeout(ShadowSweepError):
    """Fixed-team search ran out of time without finding a solution."""


class NotASolution(ShadowSweepError):
    """Refinement was handed a path that does not clear the environment."""


class ResolutionTooCoarse(ShadowSweepError):
    """The verification grid cannot resolve the narrowest corridor."""
