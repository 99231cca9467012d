"""Exception types raised by the rm2 modules."""


class RM2Error(Exception):
    """Base class for all rm2 errors."""


class PoleOfGamma(RM2Error):
    """Gamma evaluated too close to a non-positive integer."""


class DegenerateConnection(RM2Error):
    """c - a - b is (nearly) an integer, the two-term z -> 1-z connection breaks down."""


class NoConvergence(RM2Error):
    """A series hit its term cap without meeting the stopping criterion."""


class OrderTooLarge(RM2Error):
    """Polynomial order beyond the documented stability bound."""


class BranchPoint(RM2Error):
    """Energy coincides with a square-root branch point E = +-2*beta."""


class Unclassified(RM2Error):
    """Parameter combination outside the three documented potential shapes."""


class DegenerateParameters(RM2Error):
    """Hypergeometric parameter preconditions fail (e.g. invalid c parameter)."""


class ExponentSingularity(RM2Error):
    """A pole-index exponent denominator (lambda_eff - 1/2 - n) vanishes."""


class AtPole(RM2Error):
    """S-matrix requested exactly at a pole (|T22| below threshold).

    Carries the nearest classified pole record, when one lies within the
    configured energy distance.
    """

    def __init__(self, message, record=None):
        super().__init__(message)
        self.record = record


class SeedHasNode(RM2Error):
    """A SUSY seed function has a node; the transform is refused."""


class WronskianZero(RM2Error):
    """Seed Wronskian vanishes on the evaluation grid.

    The offending position is stored in ``position``.
    """

    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position


class PreconditionFailed(RM2Error):
    """An operation-level precondition does not hold."""


class ValueUnderflow(RM2Error):
    """Wavefunction magnitude below representable range over too much of a grid."""


class NoBracketSignChange(RM2Error):
    """Shooting mismatch has no sign change in the requested energy bracket."""


class StiffIntegration(RM2Error):
    """Numerov step too large for the potential depth, even after refinement."""
