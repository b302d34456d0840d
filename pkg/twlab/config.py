"""Load the single JSON experiment config into typed config objects.

The nesting mirrors the dataclasses field for field::

    {"editorial_days": 3, "total_days": 13, "n_runs": 10, "p": 1.5,
     "kinds": ["tweedie", "mse", "weighted", "logloss"],
     "world": {"n_users": 10000, "click_prob_law": [0.05, 0.02], ...},
     "train": {"learning_rate": 0.001, "epochs": 100, ...}}

Missing keys take their defaults; unknown keys are an error.
"""

__author__ = "twlab contributors"
__license__ = "GNU GPL 2 or later"

import json
import logging
from dataclasses import fields, replace

from .errors import ConfigParseError, LabError
from .losses import DEFAULT_POWER, LossKind
from .ranker import TrainConfig
from .sim.harness import ProtocolConfig
from .sim.world import WorldConfig

log = logging.getLogger(__name__)


def _build(cls, data, where):
    if not isinstance(data, dict):
        raise ConfigParseError("%s: expected an object" % where)
    known = {x.name for x in fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigParseError("%s: unknown key(s) %s"
                               % (where, ', '.join(unknown)))
    values = {k: tuple(v) if isinstance(v, list) else v
              for k, v in data.items()}
    try:
        return cls(**values)
    except (TypeError, LabError) as err:
        raise ConfigParseError("%s: %s" % (where, err))


def parse_kinds(names, p=DEFAULT_POWER):
    return tuple(LossKind.parse(str(x), p) for x in names)


def protocol_from_dict(data, where='config'):
    """Build a validated L{ProtocolConfig} from decoded JSON."""
    if not isinstance(data, dict):
        raise ConfigParseError("%s: expected an object at top level" % where)
    data = dict(data)
    power = data.pop('p', DEFAULT_POWER)
    world = _build(WorldConfig, data.pop('world', {}), where + ':world')
    train = _build(TrainConfig, data.pop('train', {}), where + ':train')
    try:
        kinds = (parse_kinds(data.pop('kinds'), power) if 'kinds' in data
                 else parse_kinds(['tweedie', 'mse', 'weighted', 'logloss'],
                                  power))
    except LabError as err:
        raise ConfigParseError("%s: %s" % (where, err))
    config = _build(ProtocolConfig, data, where)
    config = replace(config, world=world, train=train, kinds=kinds)
    try:
        return config.validate()
    except LabError as err:
        raise ConfigParseError("%s: %s" % (where, err))


def load_protocol(path):
    """Read a protocol config file.

    @raise ConfigParseError: with C{path} in the message on any failure
    """
    try:
        with open(path) as fobj:
            data = json.load(fobj)
    except (OSError, ValueError) as err:
        raise ConfigParseError("Cannot read config %s: %s" % (path, err))
    log.info("Loaded config from %s", path)
    return protocol_from_dict(data, str(path))


def override(config, seed=None, runs=None, kinds=None, p=None, epochs=None):
    """Apply command-line flags on top of a loaded config."""
    if seed is not None:
        config = replace(config, world=replace(config.world,
                                               master_seed=seed))
    if runs is not None:
        config = replace(config, n_runs=runs)
    if epochs is not None:
        config = replace(config, train=replace(config.train, epochs=epochs))
    if kinds is not None or p is not None:
        names = kinds or [str(x).split(':')[0] for x in config.kinds]
        config = replace(config, kinds=parse_kinds(
            names, DEFAULT_POWER if p is None else p))
    return config.validate()
