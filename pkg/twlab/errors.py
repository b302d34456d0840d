"""Exception hierarchy shared by every twlab module.

The CLI maps L{ValidationError} to exit code 1 and L{NumericError} (plus the
builtin C{OSError}) to exit code 2.
"""

__author__ = "twlab contributors"
__license__ = "GNU GPL 2 or later"


class LabError(Exception):
    """Base class for everything twlab raises on purpose."""


class ValidationError(LabError, ValueError):
    """The caller handed us something outside an operation's domain."""


class InvalidParams(ValidationError):
    """Distribution or loss parameters violate their invariants."""


class DomainError(ValidationError):
    """A numeric argument lies outside a function's domain."""


class UnknownTitle(ValidationError):
    """A title id is not part of the catalog."""


class EmptyDataset(ValidationError):
    """Training was requested on zero samples."""


class InvalidConfig(ValidationError):
    """A configuration object failed validation."""


class InvalidRanking(ValidationError):
    """A ranking is not a permutation of the catalog."""


class EmptySample(ValidationError):
    """A distribution sample has no values."""


class ZeroVariance(ValidationError):
    """A sample needs a positive spread but has none."""


class ConfigParseError(ValidationError):
    """A configuration file could not be read or understood."""


class ParseError(ValidationError):
    """A line-oriented input file contains a bad row.

    @ivar path: The offending file (may be C{None} for in-memory input)
    @ivar line: 1-based line number of the bad row
    """
    def __init__(self, message, path=None, line=None):
        self.path, self.line = path, line
        where = ':'.join(str(x) for x in (path, line) if x is not None)
        super(ParseError, self).__init__(
            '%s: %s' % (where, message) if where else message)


class NumericError(LabError, ArithmeticError):
    """A computation could not produce a meaningful number."""


class DegenerateVariance(NumericError):
    """Both samples of a two-sample test have zero variance."""


class DegenerateFit(NumericError):
    """A least-squares system is singular or carries no information."""


class RankDeficient(DegenerateFit):
    """A design matrix lacks full column rank."""
