"""The multi-day protocol: editorial days, then daily retrained rankers.

Within a run index every loss kind sees the same world, the same editorial
permutations and the same per-user session streams, so the kinds differ
only through the rankings their models produce.
"""

__author__ = "twlab contributors"
__license__ = "GNU GPL 2 or later"

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from ..errors import DegenerateVariance, InvalidConfig
from ..losses import TWEEDIE, LossKind
from ..ranker import RankerModel, TrainConfig, TrainingSet, train
from ..rng import derive_seed
from ..stats import lift, welch_t_test
from .world import (EventLog, WorldConfig, editorial_ranking, generate_world,
                    simulate_day)

log = logging.getLogger(__name__)

DEFAULT_KINDS = (LossKind(TWEEDIE), LossKind('mse'), LossKind('weighted'),
                 LossKind('logloss'))

# ========== Configuration Ends ==========


@dataclass(frozen=True)
class ProtocolConfig(object):
    """The day-by-day experiment: editorial warm-up, then daily retraining.

    C{weight_scale} divides the watch seconds that weigh clicked samples for
    the watch-weighted log-loss only; at 1 the weight is raw watch seconds.

    C{validate} is looser than the comparison needs: it admits
    C{editorial_days == total_days} (an editorial-only run, no ranker is
    ever trained) and C{n_runs == 1} (L{run_many} then reports no lifts or
    p-values). A real comparison wants C{editorial_days < total_days} and
    C{n_runs >= 2}.
    """
    editorial_days: int = 3
    total_days: int = 13
    world: WorldConfig = field(default_factory=WorldConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    kinds: tuple = DEFAULT_KINDS
    n_runs: int = 10
    warm_start: bool = False
    weight_scale: float = 1.0

    def validate(self):
        if not 1 <= self.editorial_days <= self.total_days:
            raise InvalidConfig("Need 1 <= editorial_days <= total_days")
        if self.n_runs < 1:
            raise InvalidConfig("n_runs must be >= 1")
        if not self.weight_scale > 0:
            raise InvalidConfig("weight_scale must be > 0")
        self.world.validate()
        self.train.validate()
        return self


@dataclass
class RunResult(object):
    """Per-day watch totals of one (kind, run) pair; days are 1-based."""
    kind: LossKind
    run_index: int
    run_seed: int
    daily_totals: np.ndarray
    n_users: int
    events: EventLog = None
    model: RankerModel = None

    @property
    def daily_means(self):
        return self.daily_totals / self.n_users


def training_set(events, kind, watch_scale, weight_scale=1.0):
    """Targets and weights for C{kind} from everything logged so far.

    Targets are watch seconds over C{watch_scale}; click weights are watch
    seconds over C{weight_scale}. Unclicked samples weigh 1.
    """
    watch = events.watch_seconds / watch_scale
    clicks = events.clicked.astype(float)
    weight = np.where(clicks > 0, events.watch_seconds / weight_scale, 1.0)
    return TrainingSet(events.title_id, clicks, watch, weight)


def run_seed_for(config, run_index):
    return derive_seed(config.world.master_seed, 'run', run_index)


def run_protocol(config, kind, run_seed, run_index=0, keep_events=False,
                 world=None):
    """Simulate C{total_days} days for one loss kind.

    @param world: A prebuilt L{World} to use instead of generating one from
        C{config.world} with C{run_seed}

    @returns: L{RunResult} with the summed watch seconds of every day
    """
    config.validate()
    if world is None:
        world = generate_world(replace(config.world, master_seed=run_seed))
    logs, totals, model = [], [], None
    for day in range(1, config.total_days + 1):
        if day <= config.editorial_days:
            source = editorial_ranking(world, day, run_seed)
        else:
            seed = derive_seed(config.train.shuffle_seed, 'model',
                               run_seed, day)
            if model is None or not config.warm_start:
                model = RankerModel.initialize(world.n_titles, kind, seed)
            data = training_set(EventLog.concat(logs), kind,
                                world.config.watch_scale,
                                config.weight_scale)
            model, trace = train(model, data,
                                 replace(config.train, shuffle_seed=seed))
            log.debug("%s run %d day %d: %d samples, final loss %.6g",
                      kind.label, run_index, day, len(data), trace[-1])
            source = model
        events = simulate_day(source, world, day, seed=run_seed)
        logs.append(events)
        totals.append(events.total_watch())
        log.info("%s run %d day %d: %.0f s watched", kind.label, run_index,
                 day, totals[-1])
    return RunResult(kind, run_index, run_seed, np.array(totals),
                     world.config.n_users,
                     EventLog.concat(logs) if keep_events else None, model)


@dataclass
class ExperimentReport(object):
    """Everything L{run_many} measured, keyed by unique kind labels."""
    config: ProtocolConfig
    labels: list
    runs: dict
    lifts: dict
    p_values: dict
    welch: dict

    def per_run_totals(self, label):
        """Totals over the model-ranked days only."""
        start = self.config.editorial_days
        return [float(r.daily_totals[start:].sum())
                for r in self.runs[label]]

    def daily_means(self, label):
        """Per-day mean watch per user, averaged across runs."""
        return np.mean([r.daily_means for r in self.runs[label]], axis=0)


def unique_labels(kinds):
    labels, seen = [], {}
    for kind in kinds:
        seen[kind.label] = seen.get(kind.label, 0) + 1
        labels.append(kind.label if seen[kind.label] == 1
                      else '%s#%d' % (kind.label, seen[kind.label]))
    return labels


def compare(report_runs, labels, editorial_days):
    """Lifts and Welch p-values for every ordered pair of labels."""
    totals = {x: [float(r.daily_totals[editorial_days:].sum())
                  for r in report_runs[x]] for x in labels}
    lifts, p_values, welch = {}, {}, {}
    for treat in labels:
        for base in labels:
            if treat == base:
                continue
            key = '%s vs %s' % (treat, base)
            lifts[key] = lift(totals[treat], totals[base])
            try:
                result = welch_t_test(totals[treat], totals[base])
            except DegenerateVariance:
                log.warning("%s: both samples constant; not significant",
                            key)
                result = None
            welch[key] = result
            p_values[key] = 1.0 if result is None else result.p
    return lifts, p_values, welch


def _one_run(args):
    config, kind, run_index, keep = args
    return run_protocol(config, kind, run_seed_for(config, run_index),
                        run_index, keep_events=keep)


def run_many(config, threads=1, keep_events_for=()):
    """Replicate the protocol C{n_runs} times per kind and compare kinds.

    @param threads: Worker processes for the (kind, run) fan-out
    @param keep_events_for: Run indices whose full event log is retained
    @rtype: L{ExperimentReport}
    """
    config.validate()
    if not config.kinds:
        raise InvalidConfig("At least one loss kind is required")
    labels = unique_labels(config.kinds)
    jobs = [(config, kind, run, run in keep_events_for)
            for kind in config.kinds for run in range(config.n_runs)]

    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_one_run, jobs))
    else:
        results = [_one_run(job) for job in jobs]

    runs = {label: results[i * config.n_runs:(i + 1) * config.n_runs]
            for i, label in enumerate(labels)}
    if config.n_runs >= 2:
        lifts, p_values, welch = compare(runs, labels, config.editorial_days)
    else:
        log.warning("Significance needs at least two runs per kind")
        lifts, p_values, welch = {}, {}, {}
    return ExperimentReport(config, labels, runs, lifts, p_values, welch)
