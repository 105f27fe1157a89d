"""Exception types raised by regdyn."""


class RegDynError(Exception):
    """Base class for every error raised by this package."""


class ParamError(RegDynError, ValueError):
    """An argument is outside its allowed range."""


class NonPositiveEigenvalue(ParamError):
    pass


class NotMonotone(ParamError):
    pass


class LevelOutOfRange(ParamError):
    pass


class SiteOutOfRange(ParamError):
    pass


class DimMismatch(ParamError):
    pass


class OddPanels(ParamError):
    pass


class TooFewCutoffs(ParamError):
    pass


class NotHermitian(ParamError):
    pass


class WrongKind(ParamError):
    """The operation needs a different Hamiltonian family kind."""


class ZeroOperator(ParamError):
    pass


class DivergentTail(RegDynError):
    """The series sum_{k>L} s_k^{-2n} does not converge for this spectrum."""


class NotReachable(RegDynError):
    """No cutoff below the truncation achieves the requested accuracy.

    ``best_level`` and ``best_residual`` carry the closest approach.
    """

    def __init__(self, msg, best_level, best_residual):
        super().__init__(msg)
        self.best_level = best_level
        self.best_residual = best_residual


class CriterionNotApplicable(RegDynError):
    """[X, S] = B X does not hold to tolerance; values are attached anyway."""

    def __init__(self, msg, result):
        super().__init__(msg)
        self.result = result


class RegimeUnachievable(RegDynError):
    """A rotated basis does not realize the requested overlap regime."""

    def __init__(self, msg, profile):
        super().__init__(msg)
        self.profile = profile


class ConfigError(RegDynError):
    pass
