"""Exception types raised across the toolkit."""


class FcmError(Exception):
    """Base class for all toolkit errors."""


class SchemaError(FcmError):
    """Survey data violates the expected file schema."""

    def __init__(self, reason, row=None, path=None):
        self.reason = reason
        self.row = row
        self.path = path
        loc = []
        if path is not None:
            loc.append(str(path))
        if row is not None:
            loc.append(f"row {row}")
        prefix = " (".join(loc) + ")" if len(loc) == 2 else (loc[0] if loc else "")
        super().__init__(f"{prefix}: {reason}" if prefix else reason)


class UnknownTermError(FcmError):
    def __init__(self, term):
        self.term = term
        super().__init__(f"unknown linguistic term: {term!r}")


class EmptyEdgeError(FcmError):
    """An edge carries no usable ratings."""


class InvalidParamsError(FcmError):
    def __init__(self, term_id, reason):
        self.term_id = term_id
        self.reason = reason
        super().__init__(f"invalid parameters for term {term_id!r}: {reason}")


class LengthMismatchError(FcmError):
    """Membership functions are sampled over different grids."""


class ZeroAreaError(FcmError):
    """Cannot defuzzify a membership function that is identically zero."""


class DimensionMismatchError(FcmError):
    """State vector and weight matrix dimensions disagree."""


class UnknownConceptError(FcmError):
    def __init__(self, concept):
        self.concept = concept
        super().__init__(f"unknown concept: {concept!r}")


class UnknownDocError(FcmError):
    def __init__(self, concept):
        self.concept = concept
        super().__init__(f"output concept not in the map: {concept!r}")


class NonPositiveLearningRateError(FcmError):
    """Learning rate must not be negative."""


class IncompletePatternError(FcmError):
    """Activation pattern must cover every concept exactly once."""


class EmptyPopulationError(FcmError):
    """Selection requires a non-empty population."""


class InvalidConfigError(FcmError):
    """Search configuration is out of its documented range."""


class InvalidRangeError(FcmError):
    """Sampling bounds are inverted or degenerate."""


class DuplicateNameError(FcmError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"intervention name already registered: {name!r}")


class EffectivenessOutOfRangeError(FcmError):
    """Intervention effectiveness must lie in [0, 1]."""


class UnknownInterventionError(FcmError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"no intervention registered under {name!r}")


class ZeroBaselineError(FcmError):
    """Relative comparison is undefined for a zero baseline value."""
