"""The four ranking objectives and their derivatives in the prediction.

Every loss/gradient function accepts scalars or equal-shape numpy arrays.
Regression targets are watch time in normalized units (seconds divided by
the world's C{watch_scale}).
"""

__author__ = "twlab contributors"
__license__ = "GNU GPL 2 or later"

import logging
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidParams
from .rng import as_generator

log = logging.getLogger(__name__)

#: Smallest prediction any loss accepts (keeps pred**-p and ln finite)
EPSILON_PRED = 1e-6

DEFAULT_POWER = 1.5

TWEEDIE, LOGLOSS, WEIGHTED, MSE = 'tweedie', 'logloss', 'weighted', 'mse'

#: CLI name -> (report label, output link)
KINDS = {
    TWEEDIE: ('Tweedie', 'exp'),
    LOGLOSS: ('Pointwise', 'sigmoid'),
    WEIGHTED: ('Weighted', 'sigmoid'),
    MSE: ('Regression', 'identity'),
}

# ========== Configuration Ends ==========


@dataclass(frozen=True)
class LossKind(object):
    """One of the four training objectives (C{p} only matters for Tweedie)."""
    name: str
    p: float = DEFAULT_POWER

    def __post_init__(self):
        if self.name not in KINDS:
            raise InvalidParams("Unknown loss kind %r (expected one of %s)"
                                % (self.name, ', '.join(sorted(KINDS))))
        if self.name == TWEEDIE and not 1 < self.p < 2:
            raise InvalidParams("Tweedie power must lie in (1, 2), got %r"
                                % (self.p,))

    @classmethod
    def parse(cls, name, p=DEFAULT_POWER):
        """Build from a CLI/config name like C{tweedie} or C{tweedie:1.6}."""
        name = name.strip().lower()
        if ':' in name:
            name, power = name.split(':', 1)
            try:
                p = float(power)
            except ValueError:
                raise InvalidParams("Bad Tweedie power in %r" % name)
        return cls(name, p if name == TWEEDIE else DEFAULT_POWER)

    @property
    def label(self):
        base = KINDS[self.name][0]
        if self.name == TWEEDIE and self.p != DEFAULT_POWER:
            return '%s(p=%g)' % (base, self.p)
        return base

    @property
    def link(self):
        return KINDS[self.name][1]

    @property
    def is_classifier(self):
        return self.link == 'sigmoid'

    def __str__(self):
        return self.name + (':%g' % self.p if self.name == TWEEDIE else '')


@dataclass(frozen=True)
class Sample(object):
    """One training example: a title impression and what came of it."""
    title_id: int
    click_label: int
    watch: float
    weight: float = 1.0

    def __post_init__(self):
        if self.click_label not in (0, 1):
            raise InvalidParams("click_label must be 0 or 1")
        if not (self.watch >= 0 and self.weight >= 0):
            raise InvalidParams("watch and weight must be >= 0")
        if self.click_label == 0 and self.watch != 0:
            raise InvalidParams("Unclicked samples cannot carry watch time")


def _check_positive(pred):
    if np.any(~(np.asarray(pred) >= EPSILON_PRED)):
        raise DomainError("Prediction below %g" % EPSILON_PRED)


def _check_probability(pred):
    pred = np.asarray(pred)
    if np.any(~((pred >= EPSILON_PRED) & (pred <= 1 - EPSILON_PRED))):
        raise DomainError("Probability outside [%g, 1 - %g]"
                          % (EPSILON_PRED, EPSILON_PRED))


def tweedie_loss(pred, target, p):
    """Negative Tweedie log-likelihood up to terms free of C{pred}."""
    _check_positive(pred)
    return (-target * pred ** (1 - p) / (1 - p)
            + pred ** (2 - p) / (2 - p))


def tweedie_grad(pred, target, p):
    _check_positive(pred)
    return -target * pred ** (-p) + pred ** (1 - p)


def logloss(pred, click_label):
    _check_probability(pred)
    return -(click_label * np.log(pred)
             + (1 - click_label) * np.log1p(-pred))


def logloss_grad(pred, click_label):
    _check_probability(pred)
    return -click_label / pred + (1 - click_label) / (1 - pred)


def weighted_logloss(pred, click_label, weight):
    """Log-loss scaled by a per-sample weight (watch seconds for clicks,
    1 for non-clicks)."""
    if np.any(np.asarray(weight) < 0):
        raise DomainError("Sample weights must be >= 0")
    return weight * logloss(pred, click_label)


def weighted_logloss_grad(pred, click_label, weight):
    if np.any(np.asarray(weight) < 0):
        raise DomainError("Sample weights must be >= 0")
    return weight * logloss_grad(pred, click_label)


def mse_loss(pred, target):
    return (pred - target) ** 2


def mse_grad(pred, target):
    return 2 * (pred - target)


def batch_loss_and_grad(kind, pred, clicks, watch, weight):
    """Per-sample losses and d(loss)/d(pred) for arrays of examples."""
    if kind.name == TWEEDIE:
        return (tweedie_loss(pred, watch, kind.p),
                tweedie_grad(pred, watch, kind.p))
    elif kind.name == LOGLOSS:
        return logloss(pred, clicks), logloss_grad(pred, clicks)
    elif kind.name == WEIGHTED:
        return (weighted_logloss(pred, clicks, weight),
                weighted_logloss_grad(pred, clicks, weight))
    return mse_loss(pred, watch), mse_grad(pred, watch)


def loss_and_grad(kind, pred, sample):
    """Dispatch one L{Sample} to the loss pair matching C{kind}.

    @returns: C{(loss, d loss / d pred)} as floats
    """
    loss, grad = batch_loss_and_grad(kind, pred, sample.click_label,
                                     sample.watch, sample.weight)
    return float(loss), float(grad)


def random_inputs(kind, n, seed):
    """Random valid (pred, clicks, watch, weight) arrays for C{kind}."""
    rng = as_generator(seed, 'loss-inputs')
    clicks = (rng.random(n) < 0.5).astype(float)
    watch = clicks * rng.gamma(2.0, 0.75, n)
    weight = np.where(clicks > 0, watch, 1.0)
    if kind.is_classifier:
        pred = rng.uniform(0.02, 0.98, n)
    elif kind.name == TWEEDIE:
        pred = rng.uniform(0.05, 4.0, n)
    else:
        pred = rng.normal(0.0, 2.0, n)
    return pred, clicks, watch, weight


def gradient_error(kind, n_cases=100, seed=0, step=1e-5, corrupt=0.0):
    """Largest relative gap between the analytic gradient and a central
    finite difference over C{n_cases} random inputs.

    @param corrupt: Added to the analytic gradient (negative control hook)
    """
    pred, clicks, watch, weight = random_inputs(kind, n_cases, seed)
    analytic = batch_loss_and_grad(kind, pred, clicks, watch, weight)[1]
    analytic = analytic + corrupt
    h = step * np.maximum(np.abs(pred), 1.0)
    upper = batch_loss_and_grad(kind, pred + h, clicks, watch, weight)[0]
    lower = batch_loss_and_grad(kind, pred - h, clicks, watch, weight)[0]
    numeric = (upper - lower) / (2 * h)
    return float(np.max(relative_error(analytic, numeric)))


def relative_error(analytic, numeric, floor=1e-4):
    """|a - n| / max(|a|, |n|, floor); the floor keeps near-zero gradients
    from turning round-off into huge ratios."""
    analytic, numeric = np.asarray(analytic), np.asarray(numeric)
    scale = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), floor)
    return np.abs(analytic - numeric) / scale
