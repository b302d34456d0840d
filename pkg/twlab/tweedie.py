"""Tweedie compound Poisson-gamma distribution for 1 < p < 2.

A Tweedie(mu, phi, p) variable is a Poisson(lam) count of independent
Gamma(alpha, scale) magnitudes, so it has an atom at zero of mass
C{exp(-lam)} and a right-skewed continuous part above it. Everything here
works through that compound representation; the density normalizer is
never evaluated.
"""

__author__ = "twlab contributors"
__license__ = "GNU GPL 2 or later"

import logging
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import DomainError, InvalidParams
from .rng import as_generator
from .special import reg_lower_incomplete_gamma

log = logging.getLogger(__name__)

#: Poisson terms are summed until the remaining tail mass drops below this
SERIES_TAIL = 1e-12

#: x values per block when evaluating the CDF series (bounds memory use)
CDF_CHUNK = 1 << 15

# ========== Configuration Ends ==========


@dataclass(frozen=True)
class TweedieParams(object):
    """Mean, dispersion and power of a Tweedie law (C{Var = phi * mu**p})."""
    mu: float
    phi: float
    p: float

    def __post_init__(self):
        for name in ('mu', 'phi', 'p'):
            if not np.isfinite(getattr(self, name)):
                raise InvalidParams("%s must be finite" % name)
        if not self.mu > 0:
            raise InvalidParams("mu must be > 0, got %r" % self.mu)
        if not self.phi > 0:
            raise InvalidParams("phi must be > 0, got %r" % self.phi)
        if not 1 < self.p < 2:
            raise InvalidParams("p must lie in (1, 2), got %r" % self.p)


@dataclass(frozen=True)
class CompoundParams(object):
    """Poisson rate C{lam} plus gamma C{alpha} (shape) and C{scale}."""
    lam: float
    alpha: float
    scale: float

    def __post_init__(self):
        if not (self.lam > 0 and self.alpha > 0 and self.scale > 0):
            raise InvalidParams("Compound parameters must be positive: %r"
                                % (self,))


def to_compound(params):
    """Moment-match a Tweedie law to its Poisson-gamma representation."""
    mu, phi, p = params.mu, params.phi, params.p
    return CompoundParams(
        lam=mu ** (2 - p) / (phi * (2 - p)),
        alpha=(2 - p) / (p - 1),
        scale=phi * (p - 1) * mu ** (p - 1))


def compound_moments(compound):
    """Mean and variance of a compound Poisson-gamma law."""
    lam, alpha, scale = compound.lam, compound.alpha, compound.scale
    return lam * alpha * scale, lam * alpha * (alpha + 1) * scale ** 2


def mean_variance(params):
    """@returns: C{(mu, phi * mu**p)}"""
    return params.mu, params.phi * params.mu ** params.p


def sample(params, n, seed):
    """Draw C{n} values; exact zeros occur with probability C{exp(-lam)}.

    @param seed: Integer seed or a C{numpy.random.Generator} stream
    @rtype: C{numpy.ndarray} of float
    """
    if n < 1:
        raise InvalidParams("Sample size must be >= 1, got %r" % (n,))
    comp = to_compound(params)
    rng = as_generator(seed, 'tweedie-sample')

    # A sum of m Gamma(alpha) draws is one Gamma(m * alpha) draw
    counts = rng.poisson(comp.lam, size=n)
    draws = np.zeros(n)
    hit = counts > 0
    draws[hit] = rng.gamma(counts[hit] * comp.alpha, comp.scale)
    return draws


def poisson_terms(lam, tail=SERIES_TAIL):
    """Event counts 1..M and their Poisson weights, truncated at C{tail}."""
    m_max = max(int(stats.poisson.isf(tail, lam)) + 1, 1)
    counts = np.arange(1, m_max + 1)
    return counts, stats.poisson.pmf(counts, lam)


def cdf(params, x):
    """P(X <= x) via the Poisson mixture of gamma CDFs.

    Accepts a scalar or an array of C{x} and returns the same shape.

    @raise DomainError: if any C{x} is negative
    """
    xs = np.asarray(x, dtype=float)
    if np.any(np.isnan(xs)) or np.any(xs < 0):
        raise DomainError("Tweedie CDF is only defined for x >= 0")

    comp = to_compound(params)
    counts, weights = poisson_terms(comp.lam)
    shapes = (counts * comp.alpha)[:, None]

    flat = xs.ravel() / comp.scale
    out = np.empty_like(flat)
    for start in range(0, flat.size, CDF_CHUNK):
        block = flat[start:start + CDF_CHUNK]
        out[start:start + CDF_CHUNK] = np.exp(-comp.lam) + weights.dot(
            reg_lower_incomplete_gamma(shapes, block[None, :]))
    out = np.minimum(out, 1.0).reshape(xs.shape)
    return float(out) if out.ndim == 0 else out


def histogram(params, n, bins, seed):
    """Zero mass plus a histogram of the positive draws.

    @returns: C{(zero_fraction, bin_edges, counts)}
    """
    draws = sample(params, n, seed)
    positive = draws[draws > 0]
    counts, edges = np.histogram(positive, bins=bins)
    return float(np.mean(draws == 0)), edges, counts
