"""Regularized incomplete gamma and beta functions with domain checks.

Both accept scalars or arrays and return the same shape back (a plain
C{float} for scalar input).
"""

__author__ = "twlab contributors"
__license__ = "GNU GPL 2 or later"

import numpy as np
from scipy import special

from .errors import DomainError


def _unwrap(value):
    return float(value) if np.ndim(value) == 0 else value


def reg_lower_incomplete_gamma(a, x):
    """P(a, x) = gamma(a, x) / Gamma(a), the gamma distribution's CDF kernel.

    @raise DomainError: when C{a <= 0} or C{x < 0} anywhere
    """
    a = np.asarray(a, dtype=float)
    x = np.asarray(x, dtype=float)
    if not np.all(a > 0):
        raise DomainError("Incomplete gamma needs shape a > 0")
    if not np.all(x >= 0):
        raise DomainError("Incomplete gamma needs x >= 0")
    return _unwrap(special.gammainc(a, x))


def reg_incomplete_beta(a, b, x):
    """I_x(a, b), the beta distribution's CDF.

    @raise DomainError: when C{a <= 0}, C{b <= 0} or C{x} leaves [0, 1]
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    x = np.asarray(x, dtype=float)
    if not (np.all(a > 0) and np.all(b > 0)):
        raise DomainError("Incomplete beta needs a > 0 and b > 0")
    if not np.all((x >= 0) & (x <= 1)):
        raise DomainError("Incomplete beta needs 0 <= x <= 1")
    return _unwrap(special.betainc(a, b, x))


def student_t_two_sided(t, dof):
    """Two-sided tail probability P(|T| >= |t|) for Student's t."""
    if not dof > 0:
        raise DomainError("Student t needs dof > 0, got %r" % (dof,))
    t = float(t)
    if np.isinf(t):
        return 0.0
    return reg_incomplete_beta(dof / 2.0, 0.5, dof / (dof + t * t))
