"""Title-embedding ranker with hand-written backpropagation.

Architecture: a 16-dimensional embedding per title, a 16 -> 8 dense layer
with rectification, and an 8 -> 1 dense layer producing a raw score C{z}.
The loss kind decides how C{z} becomes a prediction:

 - Pointwise / Weighted: C{sigmoid(z)}
 - Tweedie: C{exp(clip(z, -30, 30))}
 - Regression: C{z} unchanged

Flat parameter order (for dumps and finite-difference checks): embeddings
row-major, layer-1 weights row-major, layer-1 bias, layer-2 weights,
layer-2 bias.
"""

__author__ = "twlab contributors"
__license__ = "GNU GPL 2 or later"

import logging
from dataclasses import dataclass

import numpy as np

from .errors import EmptyDataset, InvalidConfig, UnknownTitle
from .losses import (EPSILON_PRED, Sample, batch_loss_and_grad,
                     relative_error)
from .rng import stream

log = logging.getLogger(__name__)

EMBEDDING_DIM = 16
HIDDEN_DIM = 8
EMBEDDING_SD = 0.01

#: Raw scores are clipped to this range before the exponential link
EXP_CLIP = 30.0

# ========== Configuration Ends ==========


@dataclass(frozen=True)
class TrainConfig(object):
    """Mini-batch SGD settings."""
    learning_rate: float = 1e-3
    epochs: int = 100
    batch_size: int = 256
    shuffle_seed: int = 0

    def validate(self):
        if not self.learning_rate >= 0:
            raise InvalidConfig("learning_rate must be >= 0")
        if self.epochs < 1 or self.batch_size < 1:
            raise InvalidConfig("epochs and batch_size must be >= 1")
        if self.shuffle_seed < 0:
            raise InvalidConfig("shuffle_seed must be >= 0")
        return self


class TrainingSet(object):
    """Column arrays of training examples (see L{losses.Sample})."""
    def __init__(self, title_ids, clicks, watch, weight=None):
        self.title_ids = np.asarray(title_ids, dtype=np.int64)
        self.clicks = np.asarray(clicks, dtype=float)
        self.watch = np.asarray(watch, dtype=float)
        self.weight = (np.ones_like(self.watch) if weight is None
                       else np.asarray(weight, dtype=float))

    @classmethod
    def from_samples(cls, samples):
        samples = list(samples)
        return cls([x.title_id for x in samples],
                   [x.click_label for x in samples],
                   [x.watch for x in samples],
                   [x.weight for x in samples])

    def __len__(self):
        return len(self.title_ids)

    def take(self, idx):
        return TrainingSet(self.title_ids[idx], self.clicks[idx],
                           self.watch[idx], self.weight[idx])


def _glorot(rng, fan_in, fan_out, shape):
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


class RankerModel(object):
    """Embedding -> dense(8) -> relu -> dense(1) scorer for one loss kind."""
    PARAMS = ('embeddings', 'w1', 'b1', 'w2', 'b2')

    def __init__(self, n_titles, kind):
        if n_titles < 1:
            raise InvalidConfig("A ranker needs at least one title")
        self.kind = kind
        self.embeddings = np.zeros((n_titles, EMBEDDING_DIM))
        self.w1 = np.zeros((EMBEDDING_DIM, HIDDEN_DIM))
        self.b1 = np.zeros(HIDDEN_DIM)
        self.w2 = np.zeros(HIDDEN_DIM)
        self.b2 = np.zeros(1)

    @classmethod
    def initialize(cls, n_titles, kind, seed):
        """Normal(0, 0.01) embeddings, Glorot-uniform weights, zero biases."""
        model = cls(n_titles, kind)
        rng = stream(seed, 'ranker-init')
        model.embeddings = rng.normal(0.0, EMBEDDING_SD,
                                      (n_titles, EMBEDDING_DIM))
        model.w1 = _glorot(rng, EMBEDDING_DIM, HIDDEN_DIM,
                           (EMBEDDING_DIM, HIDDEN_DIM))
        model.w2 = _glorot(rng, HIDDEN_DIM, 1, HIDDEN_DIM)
        return model

    @property
    def n_titles(self):
        return self.embeddings.shape[0]

    def copy(self):
        twin = RankerModel(self.n_titles, self.kind)
        for name in self.PARAMS:
            setattr(twin, name, getattr(self, name).copy())
        return twin

    def _check_ids(self, title_ids):
        ids = np.asarray(title_ids, dtype=np.int64)
        if ids.size and (ids.min() < 0 or ids.max() >= self.n_titles):
            raise UnknownTitle("Title id outside catalog of %d titles"
                               % self.n_titles)
        return ids

    def _forward(self, ids):
        emb = self.embeddings[ids]
        pre = emb.dot(self.w1) + self.b1
        hidden = np.maximum(pre, 0.0)
        return hidden.dot(self.w2) + self.b2[0], (emb, pre, hidden)

    def scores(self, title_ids):
        """Raw scores C{z} for an array of title ids."""
        return self._forward(self._check_ids(title_ids))[0]

    def forward(self, title_id):
        """Raw score C{z} of one title."""
        return float(self.scores([title_id])[0])

    def link(self, z):
        """Map raw scores to the kind's output domain.

        @returns: C{(pred, d pred / d z)}
        """
        if self.kind.link == 'sigmoid':
            pred = 0.5 * (1.0 + np.tanh(0.5 * z))
            return pred, pred * (1.0 - pred)
        elif self.kind.link == 'exp':
            pred = np.exp(np.clip(z, -EXP_CLIP, EXP_CLIP))
            return pred, np.where(np.abs(z) < EXP_CLIP, pred, 0.0)
        return z, np.ones_like(z)

    def predict(self, title_id):
        return float(self.link(self.scores([title_id]))[0][0])

    def predict_all(self):
        return self.link(self.scores(np.arange(self.n_titles)))[0]

    def rank(self, title_ids=None):
        """Order titles by descending prediction, ties by ascending id."""
        ids = (np.arange(self.n_titles) if title_ids is None
               else self._check_ids(title_ids))
        pred = self.link(self.scores(ids))[0]
        return ids[np.lexsort((ids, -pred))]

    def _loss_inputs(self, pred, dpred):
        """Keep predictions inside the losses' domain; the clamp has zero
        slope, so the chain rule stops there."""
        if self.kind.link == 'sigmoid':
            clamped = np.clip(pred, EPSILON_PRED, 1 - EPSILON_PRED)
        elif self.kind.link == 'exp':
            clamped = np.maximum(pred, EPSILON_PRED)
        else:
            return pred, dpred
        return clamped, np.where(clamped == pred, dpred, 0.0)

    def loss_and_gradients(self, batch):
        """Mean loss over C{batch} and gradients for every parameter.

        @type batch: L{TrainingSet}
        @returns: C{(mean_loss, {name: gradient array})}
        """
        ids = self._check_ids(batch.title_ids)
        z, (emb, pre, hidden) = self._forward(ids)
        pred, dpred = self._loss_inputs(*self.link(z))
        losses, dloss = batch_loss_and_grad(
            self.kind, pred, batch.clicks, batch.watch, batch.weight)

        g_z = dloss * dpred / len(ids)
        g_hidden = np.outer(g_z, self.w2) * (pre > 0)
        g_emb = np.zeros_like(self.embeddings)
        np.add.at(g_emb, ids, g_hidden.dot(self.w1.T))
        grads = {
            'embeddings': g_emb,
            'w1': emb.T.dot(g_hidden),
            'b1': g_hidden.sum(axis=0),
            'w2': hidden.T.dot(g_z),
            'b2': np.array([g_z.sum()]),
        }
        return float(np.mean(losses)), grads

    def flat_parameters(self):
        return np.concatenate([getattr(self, x).ravel() for x in self.PARAMS])

    def load_flat(self, vector):
        vector = np.asarray(vector, dtype=float)
        offset = 0
        for name in self.PARAMS:
            current = getattr(self, name)
            chunk = vector[offset:offset + current.size]
            if chunk.size != current.size:
                raise InvalidConfig("Parameter vector too short")
            setattr(self, name, chunk.reshape(current.shape).copy())
            offset += current.size
        if offset != vector.size:
            raise InvalidConfig("Parameter vector too long")
        return self

    def dump_parameters(self, path):
        """Write the flat parameter vector, one value per line."""
        np.savetxt(path, self.flat_parameters(), fmt='%.17g',
                   header='twlab ranker %s titles=%d'
                          % (self.kind, self.n_titles))


def train(model, data, config):
    """Mini-batch SGD on C{data} in place, starting from C{model}'s weights.

    @type data: L{TrainingSet} or iterable of L{losses.Sample}
    @returns: C{(model, trace)} where C{trace[i]} is epoch i's mean loss
    @raise EmptyDataset: when C{data} holds no examples
    """
    config.validate()
    if not isinstance(data, TrainingSet):
        data = TrainingSet.from_samples(data)
    if not len(data):
        raise EmptyDataset("Cannot train on an empty dataset")

    rng = stream(config.shuffle_seed, 'shuffle')
    trace = []
    for epoch in range(config.epochs):
        order = rng.permutation(len(data))
        total = 0.0
        for start in range(0, len(order), config.batch_size):
            batch = data.take(order[start:start + config.batch_size])
            loss, grads = model.loss_and_gradients(batch)
            total += loss * len(batch)
            if config.learning_rate:
                for name in model.PARAMS:
                    getattr(model, name)[...] -= (
                        config.learning_rate * grads[name])
        trace.append(total / len(data))
        log.debug("%s epoch %d: mean loss %.6g", model.kind, epoch + 1,
                  trace[-1])
    return model, trace


def grad_check(model, sample, kind=None, step=1e-5, corrupt=0.0):
    """Compare backprop against central differences for one sample.

    Only parameters the sample can reach are perturbed (its embedding row
    and both dense layers); every other embedding row must have a zero
    analytic gradient.

    @param corrupt: Added to the analytic gradients (negative control hook)
    @returns: Largest relative error (see L{losses.relative_error})
    """
    if kind is not None and kind != model.kind:
        model = model.copy()
        model.kind = kind
    batch = (sample if isinstance(sample, TrainingSet)
             else TrainingSet.from_samples([sample]))
    row = int(batch.title_ids[0])
    probe = model.copy()

    _, grads = probe.loss_and_gradients(batch)
    worst = 0.0
    others = np.delete(grads['embeddings'], row, axis=0)
    if others.size:
        worst = float(np.max(np.abs(others)))

    for name in RankerModel.PARAMS:
        values = getattr(probe, name)
        analytic = grads[name] + corrupt
        if name == 'embeddings':
            values, analytic = values[row], analytic[row]
        numeric = np.empty(values.shape)
        for idx in np.ndindex(values.shape):
            saved = values[idx]
            values[idx] = saved + step
            upper = probe.loss_and_gradients(batch)[0]
            values[idx] = saved - step
            lower = probe.loss_and_gradients(batch)[0]
            values[idx] = saved
            numeric[idx] = (upper - lower) / (2 * step)
        worst = max(worst, float(np.max(relative_error(analytic, numeric))))
    return worst


def random_check_case(kind, seed, n_titles=5):
    """A random model and sample for gradient verification.

    Embeddings are drawn at unit scale (not the tiny training init) so every
    parameter carries a gradient worth comparing.
    """
    rng = stream(seed, 'gradcheck-case')
    model = RankerModel.initialize(n_titles, kind, seed)
    model.embeddings = rng.normal(0.0, 1.0, model.embeddings.shape)
    model.b1 = rng.normal(0.0, 0.1, model.b1.shape)
    model.b2 = rng.normal(0.0, 0.1, 1)
    click = int(rng.random() < 0.5)
    watch = float(rng.gamma(2.0, 0.75)) if click else 0.0
    sample = Sample(int(rng.integers(n_titles)), click, watch,
                    watch if click else 1.0)
    return model, sample
