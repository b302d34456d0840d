"""Loss decomposition on the basis f, f**2, f**3 with f(pred) = 1 - sqrt(pred).

Losses are expanded around pred = 1 (f = 0). Coefficients are extracted
numerically by a least-squares polynomial fit on a small window, so every
kind (and any weighted mix of kinds) is handled the same way. Observed
business metrics are then related to those coefficients by linear
projection, and a compound loss can be assembled that points along a
solved metric direction.
"""

__author__ = "twlab contributors"
__license__ = "GNU GPL 2 or later"

import csv
import logging
from dataclasses import dataclass

import numpy as np

from .errors import (DegenerateFit, DomainError, InvalidParams, ParseError,
                     RankDeficient)
from .losses import (LOGLOSS, TWEEDIE, WEIGHTED, LossKind,
                     batch_loss_and_grad)
from .rng import as_generator

log = logging.getLogger(__name__)

ORDER = 3
#: Degree actually fitted; terms above ORDER soak up the truncation error
FIT_DEGREE = 8
WINDOW = 0.05
N_POINTS = 41

# ========== Configuration Ends ==========


@dataclass(frozen=True)
class BasisCoeffs(object):
    kind: LossKind
    target: float
    coeffs: tuple
    residual: float


@dataclass
class MetricObservations(object):
    """One coefficient row per experiment and the two metrics it produced."""
    coeff_matrix: np.ndarray
    watch_metric: np.ndarray
    conversion_metric: np.ndarray

    def __post_init__(self):
        self.coeff_matrix = np.atleast_2d(np.asarray(self.coeff_matrix,
                                                     dtype=float))
        self.watch_metric = np.asarray(self.watch_metric, dtype=float)
        self.conversion_metric = np.asarray(self.conversion_metric,
                                            dtype=float)
        rows = self.coeff_matrix.shape[0]
        if (self.watch_metric.shape != (rows,)
                or self.conversion_metric.shape != (rows,)):
            raise InvalidParams("Need one watch and one conversion metric "
                                "per coefficient row")
        if not (np.all(np.isfinite(self.coeff_matrix))
                and np.all(np.isfinite(self.watch_metric))
                and np.all(np.isfinite(self.conversion_metric))):
            raise InvalidParams("Observations must be finite")


@dataclass
class Projection(object):
    """Solved metric directions and their least-squares diagnostics."""
    t_vector: np.ndarray
    v_vector: np.ndarray
    t_residual: float
    v_residual: float
    t_stderr: np.ndarray
    v_stderr: np.ndarray


@dataclass
class Composition(object):
    weights: np.ndarray
    cosine: float


def expansion_loss(kind, target):
    """The loss of C{kind} as a function of pred, at a fixed target.

    Classification kinds are expanded for a clicked sample in the
    sqrt(pred) parameterization, i.e. as half the log-likelihood, so the
    loss reads C{-ln(sqrt(pred)) = -ln(1 - f)} (scaled by the weight
    C{target} for the weighted kind). Regression kinds use C{target} as the
    watch target.
    """
    if not target > 0:
        raise DomainError("Expansion target must be > 0")

    if kind.is_classifier:
        weight = target if kind.name == WEIGHTED else 1.0
        # Only the click term survives, so pred may cross 1 inside the window
        return lambda pred: -weight * np.log(np.sqrt(pred))
    return lambda pred: batch_loss_and_grad(kind, pred, 1.0, target, 1.0)[0]


def fit_basis(loss, window=WINDOW, n_points=N_POINTS, order=ORDER,
              degree=FIT_DEGREE):
    """Least-squares coefficients of C{loss(pred) - loss(1)} on f .. f**order.

    @returns: C{(coeffs, residual)}; the residual is the largest absolute
        misfit of the full fitted polynomial over the window
    """
    if not 0 < window < 1:
        raise DomainError("window must lie in (0, 1)")
    degree = max(degree, order)
    if n_points < max(20, degree + 1):
        raise DomainError("Need at least %d points" % max(20, degree + 1))
    f = np.linspace(-window, window, n_points)
    values = loss((1.0 - f) ** 2) - loss(np.array([1.0]))[0]

    # Fit in u = f / window so the design matrix stays well conditioned
    u = f / window
    design = np.vander(u, degree + 1, increasing=True)[:, 1:]
    if np.linalg.matrix_rank(design) < degree:
        raise DegenerateFit("Normal equations are singular")
    sol = np.linalg.lstsq(design, values, rcond=None)[0]
    coeffs = sol / window ** np.arange(1, degree + 1)
    residual = float(np.max(np.abs(design.dot(sol) - values)))
    return tuple(float(c) for c in coeffs[:order]), residual


def taylor_coeffs(kind, target=1.0, window=WINDOW, n_points=N_POINTS,
                  order=ORDER):
    """Basis coordinates of C{kind}'s loss near pred = 1.

    @rtype: L{BasisCoeffs}
    """
    coeffs, residual = fit_basis(expansion_loss(kind, target), window,
                                 n_points, order)
    log.debug("%s at target %g: coeffs %r, residual %.3g", kind.label, target,
              coeffs, residual)
    return BasisCoeffs(kind, target, coeffs, residual)


def sensitivity_compare(p):
    """Second-order coefficients of Tweedie(p) and log-loss at target 1.

    @returns: C{(tweedie_c2, logloss_c2)}
    """
    tweedie = taylor_coeffs(LossKind(TWEEDIE, p)).coeffs[1]
    logloss = taylor_coeffs(LossKind(LOGLOSS)).coeffs[1]
    return tweedie, logloss


def _lstsq(matrix, rhs):
    sol, _, _, _ = np.linalg.lstsq(matrix, rhs, rcond=None)
    resid = rhs - matrix.dot(sol)
    rows, cols = matrix.shape
    if rows > cols:
        sigma2 = resid.dot(resid) / (rows - cols)
        cov = sigma2 * np.linalg.inv(matrix.T.dot(matrix))
        stderr = np.sqrt(np.diag(cov))
    else:
        stderr = np.zeros(cols)
    return sol, float(np.linalg.norm(resid)), stderr


def solve_projection(obs):
    """Solve C{watch = C t} and C{conversion = C v} by least squares.

    @raise RankDeficient: if the coefficient matrix lacks full column rank
    @rtype: L{Projection}
    """
    matrix = obs.coeff_matrix
    if matrix.shape[0] < matrix.shape[1] or (
            np.linalg.matrix_rank(matrix) < matrix.shape[1]):
        raise RankDeficient("Coefficient matrix (%d x %d) is rank deficient"
                            % matrix.shape)
    t, t_res, t_se = _lstsq(matrix, obs.watch_metric)
    v, v_res, v_se = _lstsq(matrix, obs.conversion_metric)
    return Projection(t, v, t_res, v_res, t_se, v_se)


def compose_loss(t_vector, library):
    """Weights over C{library} whose combined coefficients point along
    C{t_vector}.

    The combination is the projection of C{t_vector} onto the library's
    span, rescaled to unit norm. A target orthogonal to the span gets zero
    weights and cosine 0.

    @type library: list of L{BasisCoeffs} or coefficient sequences
    @rtype: L{Composition}
    """
    target = np.asarray(t_vector, dtype=float)
    if not len(library):
        raise DomainError("The loss library is empty")
    basis = np.column_stack([np.asarray(getattr(x, 'coeffs', x), dtype=float)
                             for x in library])
    if not np.any(basis):
        raise DegenerateFit("Every library loss has zero coefficients")
    norm_t = np.linalg.norm(target)
    if norm_t == 0:
        raise DomainError("The target direction is the zero vector")

    weights = np.linalg.lstsq(basis, target, rcond=None)[0]
    combined = basis.dot(weights)
    length = np.linalg.norm(combined)
    if length <= 1e-12 * norm_t:
        return Composition(np.zeros(basis.shape[1]), 0.0)
    weights = weights / length
    cosine = float(np.dot(combined / length, target) / norm_t)
    return Composition(weights, min(cosine, 1.0))


def plant_observations(t_vector, v_vector, n, noise_sd=0.0, seed=0,
                       library=None):
    """Synthetic experiments with known metric directions.

    Coefficient rows come from C{library} (cycled) when given, otherwise
    from a standard normal; metrics are C{C t} and C{C v} plus Gaussian
    noise of deviation C{noise_sd}.
    """
    rng = as_generator(seed, 'plant')
    t = np.asarray(t_vector, dtype=float)
    v = np.asarray(v_vector, dtype=float)
    if library:
        rows = [np.asarray(getattr(x, 'coeffs', x), dtype=float)
                for x in library]
        matrix = np.array([rows[i % len(rows)] for i in range(n)])
    else:
        matrix = rng.normal(size=(n, t.size))
    watch = matrix.dot(t) + rng.normal(0.0, noise_sd, n)
    conversion = matrix.dot(v) + rng.normal(0.0, noise_sd, n)
    return MetricObservations(matrix, watch, conversion)


def read_observations(path):
    """Parse C{c1,c2,c3,watch_metric,conversion_metric} rows.

    Blank lines, C{#} comments and a non-numeric header row are skipped.

    @raise ParseError: naming the first malformed row
    """
    rows = []
    with open(path, newline='') as fobj:
        for lineno, row in enumerate(csv.reader(fobj), 1):
            if not row or not ''.join(row).strip() or row[0].startswith('#'):
                continue
            try:
                values = [float(x) for x in row]
            except ValueError:
                if not rows and lineno == 1:
                    continue
                raise ParseError("non-numeric field in %r" % ','.join(row),
                                 path, lineno)
            if len(values) != ORDER + 2:
                raise ParseError("expected %d fields, got %d"
                                 % (ORDER + 2, len(values)), path, lineno)
            rows.append(values)
    if not rows:
        raise ParseError("no observations", path)
    data = np.array(rows)
    return MetricObservations(data[:, :ORDER], data[:, ORDER],
                              data[:, ORDER + 1])
