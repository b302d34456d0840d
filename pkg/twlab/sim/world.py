"""Synthetic catalog and scroll-and-click user behavior.

Users are featureless and memoryless. A session walks down a ranked list
from position 0: each examined title is clicked with its own probability;
a click ends the session with a watch whose fraction of the title's length
depends on a latent completion intention; an unclicked title is followed by
abandonment with probability C{stop_prob}.
"""

__author__ = "twlab contributors"
__license__ = "GNU GPL 2 or later"

import csv
import logging
from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidConfig, InvalidRanking
from ..rng import stream

log = logging.getLogger(__name__)

PROB_FLOOR, PROB_CEIL = 0.001, 0.999
MIN_DURATION = 600.0
FRACTION_FLOOR, FRACTION_CEIL = 0.01, 1.0

EVENT_COLUMNS = ('day', 'user_id', 'position', 'title_id', 'clicked',
                 'watch_seconds')

# ========== Configuration Ends ==========


@dataclass(frozen=True)
class WorldConfig(object):
    """Generator hyperparameters; every C{*_law} is a normal C{(mean, sd)}."""
    n_users: int = 10000
    n_titles: int = 1000
    click_prob_law: tuple = (0.05, 0.02)
    intention_law: tuple = (0.5, 0.15)
    intender_fraction_law: tuple = (0.9, 0.05)
    non_intender_fraction_law: tuple = (0.2, 0.1)
    duration_law: tuple = (6000.0, 1800.0)
    stop_prob: float = 0.1
    watch_scale: float = 3600.0
    master_seed: int = 0

    LAWS = ('click_prob_law', 'intention_law', 'intender_fraction_law',
            'non_intender_fraction_law', 'duration_law')

    def validate(self):
        if self.n_users < 1 or self.n_titles < 1:
            raise InvalidConfig("n_users and n_titles must be >= 1")
        if not 0 < self.stop_prob <= 1:
            raise InvalidConfig("stop_prob must lie in (0, 1]")
        if not self.watch_scale > 0:
            raise InvalidConfig("watch_scale must be > 0")
        if self.master_seed < 0:
            raise InvalidConfig("master_seed must be >= 0")
        for name in self.LAWS:
            law = getattr(self, name)
            if len(law) != 2 or not np.all(np.isfinite(law)) or law[1] < 0:
                raise InvalidConfig("%s must be a finite (mean, sd >= 0) "
                                    "pair, got %r" % (name, law))
        return self


@dataclass(frozen=True)
class TitleProfile(object):
    title_id: int
    click_prob: float
    completion_intention_prob: float
    duration_seconds: float


@dataclass(frozen=True)
class SessionEvent(object):
    """One examined title in one user's session."""
    user_id: int
    day: int
    position: int
    title_id: int
    clicked: int
    watch_seconds: float


@dataclass
class World(object):
    """A generated catalog: per-title arrays plus the config that made it."""
    config: WorldConfig
    click_prob: np.ndarray
    intention: np.ndarray
    duration: np.ndarray
    titles: list = field(default_factory=list)

    @property
    def n_titles(self):
        return len(self.click_prob)

    def profile(self, title_id):
        return self.titles[title_id]


def _law_draws(config, name, n):
    mean, sd = getattr(config, name)
    return stream(config.master_seed, 'world-' + name).normal(mean, sd, n)


def generate_world(config):
    """Sample every title's click, intention and duration independently."""
    config.validate()
    n = config.n_titles
    click = np.clip(_law_draws(config, 'click_prob_law', n),
                    PROB_FLOOR, PROB_CEIL)
    intent = np.clip(_law_draws(config, 'intention_law', n),
                     PROB_FLOOR, PROB_CEIL)
    duration = np.maximum(_law_draws(config, 'duration_law', n),
                          MIN_DURATION)
    titles = [TitleProfile(i, float(click[i]), float(intent[i]),
                           float(duration[i])) for i in range(n)]
    log.info("Generated %d titles (mean click prob %.4f)", n, click.mean())
    return World(config, click, intent, duration, titles)


def check_ranking(ranking, world):
    ranking = np.asarray(ranking, dtype=np.int64)
    if (ranking.shape != (world.n_titles,) or not np.array_equal(
            np.sort(ranking), np.arange(world.n_titles))):
        raise InvalidRanking("Ranking must be a permutation of %d titles"
                             % world.n_titles)
    return ranking


def _session(user_id, day, ranking, world, rng):
    cfg = world.config
    events = []
    for position, title in enumerate(ranking):
        title = int(title)
        if rng.random() < world.click_prob[title]:
            if rng.random() < world.intention[title]:
                mean, sd = cfg.intender_fraction_law
            else:
                mean, sd = cfg.non_intender_fraction_law
            fraction = min(max(rng.normal(mean, sd), FRACTION_FLOOR),
                           FRACTION_CEIL)
            events.append(SessionEvent(user_id, day, position, title, 1,
                                       float(world.duration[title] * fraction)))
            break
        events.append(SessionEvent(user_id, day, position, title, 0, 0.0))
        if rng.random() < cfg.stop_prob:
            break
    return events


def simulate_session(user_id, day, ranking, world, rng):
    """Run one user's scroll through C{ranking}.

    @param rng: The session's own C{numpy.random.Generator}
    @returns: One L{SessionEvent} per examined title, at most one clicked
        (and then last)
    """
    return _session(user_id, day, check_ranking(ranking, world), world, rng)


def session_stream(seed, day, user_id):
    return stream(seed, 'session', day, user_id)


def resolve_ranking(ranking_source, world):
    """A ranking source is an explicit permutation or anything with
    C{rank()} (a trained model)."""
    if hasattr(ranking_source, 'rank'):
        ranking_source = ranking_source.rank()
    return check_ranking(ranking_source, world)


def simulate_day(ranking_source, world, day, seed=None, users=None):
    """One session per user, each on its own (seed, day, user) stream.

    @param seed: Master seed of the session streams (default: the world's)
    @param users: Optional processing order; the result never depends on it
    @rtype: L{EventLog}
    """
    ranking = resolve_ranking(ranking_source, world)
    seed = world.config.master_seed if seed is None else seed
    users = range(world.config.n_users) if users is None else users
    per_user = {}
    for user in users:
        per_user[int(user)] = _session(int(user), day, ranking, world,
                                       session_stream(seed, day, int(user)))
    return EventLog.from_events(
        [evt for user in sorted(per_user) for evt in per_user[user]])


def editorial_ranking(world, day, seed):
    """The human-edited stand-in: a fixed pseudo-random permutation per day."""
    return stream(seed, 'editorial', day).permutation(world.n_titles)


def continue_probabilities(ranking, world):
    """Chance that the session reaches each position of C{ranking}."""
    ranking = check_ranking(ranking, world)
    step = (1 - world.click_prob[ranking]) * (1 - world.config.stop_prob)
    return np.concatenate(([1.0], np.cumprod(step[:-1])))


def expected_session_length(ranking, world):
    """Closed-form mean number of examined positions."""
    return float(continue_probabilities(ranking, world).sum())


def expected_clicks(ranking, world):
    """Closed-form probability that a session ends in a click."""
    ranking = check_ranking(ranking, world)
    reach = continue_probabilities(ranking, world)
    return float(np.dot(reach, world.click_prob[ranking]))


class EventLog(object):
    """Columnar storage of L{SessionEvent}s, ordered by (day, user, position)."""
    def __init__(self, day, user_id, position, title_id, clicked,
                 watch_seconds):
        self.day = np.asarray(day, dtype=np.int64)
        self.user_id = np.asarray(user_id, dtype=np.int64)
        self.position = np.asarray(position, dtype=np.int64)
        self.title_id = np.asarray(title_id, dtype=np.int64)
        self.clicked = np.asarray(clicked, dtype=np.int64)
        self.watch_seconds = np.asarray(watch_seconds, dtype=float)

    @classmethod
    def from_events(cls, events):
        events = list(events)
        return cls(*([getattr(evt, col) for evt in events]
                     for col in EVENT_COLUMNS))

    @classmethod
    def concat(cls, logs):
        logs = list(logs)
        if not logs:
            return cls.from_events([])
        return cls(*(np.concatenate([getattr(x, col) for x in logs])
                     for col in EVENT_COLUMNS))

    def __len__(self):
        return len(self.day)

    def __iter__(self):
        for row in zip(self.user_id, self.day, self.position, self.title_id,
                       self.clicked, self.watch_seconds):
            yield SessionEvent(int(row[0]), int(row[1]), int(row[2]),
                               int(row[3]), int(row[4]), float(row[5]))

    def total_watch(self):
        return float(self.watch_seconds.sum())

    def export(self, path, seed):
        """Write a comma-separated log with a seed comment and header row."""
        with open(path, 'w', newline='') as fobj:
            fobj.write('# master_seed=%d\n' % seed)
            writer = csv.writer(fobj, lineterminator='\n')
            writer.writerow(EVENT_COLUMNS)
            for row in zip(self.day, self.user_id, self.position,
                           self.title_id, self.clicked, self.watch_seconds):
                writer.writerow([int(x) for x in row[:5]] + [repr(
                    float(row[5]))])
