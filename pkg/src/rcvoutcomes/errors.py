"""Exception types shared across the package."""


class RcvError(Exception):
    """Base class for all domain errors."""


class InvalidProfile(RcvError):
    """An election profile violates its structural invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"invalid profile: {lines}")


class UnresolvableTie(RcvError):
    """A counting round has no unique lowest-tallied candidate under the strict policy."""


class InvalidPrefix(RcvError):
    """An elimination-order prefix repeats a candidate or names an unknown one."""


class ParseError(RcvError):
    """A profile file is malformed."""


class UnknownCandidate(ParseError):
    """A ballot token does not match any declared candidate."""


class ValidationError(RcvError):
    """A parsed profile fails validation after normalization."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"profile failed validation: {lines}")


class SpaceTooLarge(RcvError):
    """The exhaustive completion space exceeds the configured cap."""


class AllPruned(RcvError):
    """Pruning removed every candidate."""


class EmptyOutcomeSet(RcvError):
    """No feasible elimination orders to visualize."""


class InconsistentInput(RcvError):
    """An outcome set does not match the profile it is claimed to come from."""
