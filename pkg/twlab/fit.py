"""Fitting a Tweedie law to a watch-time sample by KS grid search.

Raw watch times are first normalized (shifted Z-score or plain scaling)
and capped, then every (mu, p, phi) point of a grid is scored by its
Kolmogorov-Smirnov distance to the sample's ECDF.
"""

__author__ = "twlab contributors"
__license__ = "GNU GPL 2 or later"

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import (DomainError, EmptySample, InvalidConfig, ParseError,
                     ZeroVariance)
from .tweedie import TweedieParams, cdf, sample

log = logging.getLogger(__name__)

ZSCORE_SHIFTED, SCALE_ONLY = 'zscore_shifted', 'scale_only'

DEFAULT_CAP = 10.0

# ========== Configuration Ends ==========


@dataclass(frozen=True)
class NormalizationSpec(object):
    method: str = ZSCORE_SHIFTED
    upper_bound: float = DEFAULT_CAP

    def validate(self):
        if self.method not in (ZSCORE_SHIFTED, SCALE_ONLY):
            raise InvalidConfig("Unknown normalization %r" % self.method)
        if not self.upper_bound > 0:
            raise InvalidConfig("upper_bound must be > 0")
        return self


@dataclass(frozen=True)
class GridRange(object):
    """Inclusive C{start..stop} in steps of C{step}."""
    start: float
    stop: float
    step: float

    def values(self):
        if not self.step > 0 or self.stop < self.start:
            raise InvalidConfig("Bad grid range %r" % (self,))
        count = int(np.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return np.round(self.start + self.step * np.arange(count), 12)


@dataclass(frozen=True)
class GridSpec(object):
    mu_grid: GridRange = field(
        default_factory=lambda: GridRange(0.05, 0.5, 0.05))
    p_grid: GridRange = field(
        default_factory=lambda: GridRange(1.05, 1.95, 0.05))
    phi_grid: GridRange = field(
        default_factory=lambda: GridRange(0.5, 2.5, 0.05))

    def points(self):
        """Every grid point as (mu, p, phi), mu-major."""
        mus, ps, phis = (self.mu_grid.values(), self.p_grid.values(),
                         self.phi_grid.values())
        if not (np.all(ps > 1) and np.all(ps < 2)):
            raise InvalidConfig("p grid must stay inside (1, 2)")
        if not (np.all(mus > 0) and np.all(phis > 0)):
            raise InvalidConfig("mu and phi grids must be positive")
        return [(mu, p, phi) for mu in mus for p in ps for phi in phis]


@dataclass
class FitResult(object):
    best: TweedieParams
    best_ks: float
    table: list
    n: int
    normalization: str = None


def _as_sample(values):
    values = np.asarray(values, dtype=float).ravel()
    if not values.size:
        raise EmptySample("The sample is empty")
    if np.any(~np.isfinite(values)) or np.any(values < 0):
        raise DomainError("Samples must be finite and non-negative")
    return values


def normalize(raw, spec):
    """Rescale a raw watch-time sample and cap it at C{spec.upper_bound}.

    Population standard deviation is used. With C{zscore_shifted} the
    Z-scores are shifted so the smallest value (and so every zero) lands on
    exactly 0.

    @raise ZeroVariance: if all values are equal
    """
    spec.validate()
    raw = _as_sample(raw)
    sd = raw.std()
    if sd == 0:
        raise ZeroVariance("Cannot normalize a sample with zero spread")
    if spec.method == ZSCORE_SHIFTED:
        scores = (raw - raw.mean()) / sd
        scores = scores - scores.min()
    else:
        scores = raw / sd
    return np.minimum(scores, spec.upper_bound)


class SortedSample(object):
    """A sample's jump points with left and right ECDF limits."""
    def __init__(self, values):
        values = np.sort(_as_sample(values))
        self.n = values.size
        self.points, first = np.unique(values, return_index=True)
        self.left = first / float(self.n)
        self.right = np.append(first[1:], self.n) / float(self.n)

    def ks(self, params):
        model = cdf(params, self.points)
        # Model has an atom only at 0, where its left limit is 0
        model_left = np.where(self.points > 0, model, 0.0)
        return float(max(np.max(np.abs(self.right - model)),
                         np.max(np.abs(self.left - model_left))))


def ks_statistic(values, params):
    """sup |ECDF - cdf| over the sample's jump points, both one-sided
    limits included."""
    return SortedSample(values).ks(params)


def grid_search(values, grid, threads=1):
    """Score every grid point and keep the smallest KS distance.

    Ties go to the smaller p, then the smaller mu, then the smaller phi.

    @rtype: L{FitResult} whose C{table} rows are C{(mu, p, phi, ks)}
    """
    ssample = SortedSample(values)
    points = grid.points()
    log.info("KS grid search: %d points over %d values", len(points),
             ssample.n)

    def score(point):
        mu, p, phi = point
        return ssample.ks(TweedieParams(mu=mu, phi=phi, p=p))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            scores = list(pool.map(score, points))
    else:
        scores = [score(x) for x in points]

    table = [(mu, p, phi, ks) for (mu, p, phi), ks in zip(points, scores)]
    mu, p, phi, ks = min(table, key=lambda r: (r[3], r[1], r[0], r[2]))
    return FitResult(TweedieParams(mu=mu, phi=phi, p=p), ks, table, ssample.n)


def generate_sample(params, n, seed):
    """The self-consistency generator: C{n} draws from C{params}."""
    return sample(params, n, seed)


def read_sample(path):
    """Read one non-negative value per line; blank and C{#} lines skipped.

    @raise ParseError: naming the first bad line
    @raise EmptySample: if the file holds no values
    """
    values = []
    with open(path) as fobj:
        for lineno, line in enumerate(fobj, 1):
            line = line.strip()
            if not line or line.startswith('#'):
                continue
            try:
                value = float(line)
            except ValueError:
                raise ParseError("not a number: %r" % line, path, lineno)
            if not np.isfinite(value) or value < 0:
                raise ParseError("value must be finite and >= 0: %r" % line,
                                 path, lineno)
            values.append(value)
    if not values:
        raise EmptySample("%s: no values" % path)
    return np.array(values)
