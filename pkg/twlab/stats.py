"""Two-sample significance testing for run-level metrics."""

__author__ = "twlab contributors"
__license__ = "GNU GPL 2 or later"

from collections import namedtuple

import numpy as np

from .errors import DegenerateVariance, DomainError
from .special import student_t_two_sided

WelchResult = namedtuple('WelchResult', 't dof p')


def welch_t_test(a, b):
    """Two-sided Welch test with Satterthwaite degrees of freedom.

    @raise DomainError: if either sample has fewer than two values
    @raise DegenerateVariance: if both samples have zero variance
    @rtype: L{WelchResult}
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size < 2 or b.size < 2:
        raise DomainError("Welch test needs at least two values per sample")

    var_a, var_b = a.var(ddof=1), b.var(ddof=1)
    if var_a == 0 and var_b == 0:
        raise DegenerateVariance("Both samples have zero variance")

    se_a, se_b = var_a / a.size, var_b / b.size
    t = (a.mean() - b.mean()) / np.sqrt(se_a + se_b)
    dof = (se_a + se_b) ** 2 / (se_a ** 2 / (a.size - 1)
                                + se_b ** 2 / (b.size - 1))
    return WelchResult(float(t), float(dof), student_t_two_sided(t, dof))


def lift(treatment, baseline):
    """Relative improvement of C{mean(treatment)} over C{mean(baseline)}, %."""
    base = float(np.mean(baseline))
    if base == 0:
        raise DomainError("Lift is undefined against a zero baseline")
    return (float(np.mean(treatment)) / base - 1.0) * 100.0
