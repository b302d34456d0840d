"""Tests for the synthetic catalog and the session simulator."""

import numpy as np
import pytest

from twlab.errors import InvalidConfig, InvalidRanking
from twlab.sim.world import (EventLog, World, WorldConfig, editorial_ranking,
                             expected_clicks, expected_session_length,
                             generate_world, simulate_day, simulate_session)


def fixed_world(click, intention=0.5, duration=6000.0, **kwargs):
    """A world with hand-picked per-title arrays."""
    click = np.asarray(click, dtype=float)
    n = click.size
    config = WorldConfig(n_titles=n, **kwargs)
    return World(config, click, np.full(n, intention),
                 np.full(n, duration))


class TestGenerate:
    def test_zero_spread(self):
        config = WorldConfig(n_titles=20, click_prob_law=(0.05, 0.0),
                             intention_law=(0.5, 0.0),
                             duration_law=(6000.0, 0.0))
        world = generate_world(config)
        assert np.all(world.click_prob == 0.05)
        assert np.all(world.intention == 0.5)
        assert np.all(world.duration == 6000.0)

    def test_click_law(self):
        world = generate_world(WorldConfig(n_titles=1000))
        assert abs(world.click_prob.mean() - 0.05) < 3 * 0.02 / np.sqrt(1000)

    def test_clipping(self):
        world = generate_world(WorldConfig(
            n_titles=500, click_prob_law=(0.0, 1.0),
            duration_law=(100.0, 50.0)))
        assert world.click_prob.min() >= 0.001
        assert world.click_prob.max() <= 0.999
        assert world.duration.min() >= 600.0

    def test_deterministic(self):
        first = generate_world(WorldConfig(n_titles=50, master_seed=8))
        second = generate_world(WorldConfig(n_titles=50, master_seed=8))
        np.testing.assert_array_equal(first.click_prob, second.click_prob)
        np.testing.assert_array_equal(first.duration, second.duration)
        other = generate_world(WorldConfig(n_titles=50, master_seed=9))
        assert not np.array_equal(first.click_prob, other.click_prob)

    def test_profiles(self):
        world = generate_world(WorldConfig(n_titles=5))
        profile = world.profile(3)
        assert profile.title_id == 3
        assert profile.click_prob == world.click_prob[3]

    @pytest.mark.parametrize("changes", [
        {'n_users': 0}, {'stop_prob': 0.0}, {'stop_prob': 1.5},
        {'watch_scale': 0.0}, {'click_prob_law': (0.05, -0.1)},
        {'duration_law': (float('nan'), 1.0)}])
    def test_invalid(self, changes):
        with pytest.raises(InvalidConfig):
            WorldConfig(**changes).validate()


class TestSession:
    def test_never_click_always_stop(self):
        world = fixed_world(np.zeros(5), stop_prob=1.0)
        events = simulate_session(0, 1, np.arange(5), world,
                                  np.random.default_rng(0))
        assert len(events) == 1
        assert events[0].position == 0 and events[0].clicked == 0
        assert events[0].watch_seconds == 0.0

    def test_certain_click(self):
        world = fixed_world([1.0, 0.0, 0.0], intention=1.0,
                            intender_fraction_law=(0.9, 0.0))
        events = simulate_session(4, 2, [0, 1, 2], world,
                                  np.random.default_rng(0))
        assert len(events) == 1
        assert events[0].clicked == 1
        assert events[0].watch_seconds == pytest.approx(5400.0)
        assert (events[0].user_id, events[0].day) == (4, 2)

    def test_walks_whole_list(self):
        world = fixed_world(np.zeros(6), stop_prob=1e-12)
        events = simulate_session(0, 1, [5, 4, 3, 2, 1, 0], world,
                                  np.random.default_rng(1))
        assert [x.title_id for x in events] == [5, 4, 3, 2, 1, 0]

    def test_invariants(self):
        world = generate_world(WorldConfig(n_titles=40,
                                           click_prob_law=(0.2, 0.1)))
        rng = np.random.default_rng(2)
        for user in range(500):
            events = simulate_session(user, 1, np.arange(40), world, rng)
            assert [x.position for x in events] == list(range(len(events)))
            assert sum(x.clicked for x in events) <= 1
            assert all(x.clicked == 0 for x in events[:-1])
            for evt in events:
                if evt.clicked:
                    assert 0 < evt.watch_seconds <= world.duration[evt.title_id]
                else:
                    assert evt.watch_seconds == 0.0

    def test_bad_ranking(self):
        world = fixed_world(np.full(3, 0.1))
        rng = np.random.default_rng(0)
        for ranking in ([0, 1], [0, 1, 1], [0, 1, 3]):
            with pytest.raises(InvalidRanking):
                simulate_session(0, 1, ranking, world, rng)

    def test_expected_length(self):
        world = generate_world(WorldConfig(n_titles=100, master_seed=3))
        ranking = np.arange(100)
        rng = np.random.default_rng(5)
        n = 30000
        lengths = [len(simulate_session(u, 1, ranking, world, rng))
                   for u in range(n)]
        expected = expected_session_length(ranking, world)
        assert np.mean(lengths) == pytest.approx(expected, rel=0.02)

    def test_expected_clicks_closed_form(self):
        world = fixed_world([0.5, 0.5], stop_prob=0.5)
        assert expected_session_length([0, 1], world) == pytest.approx(1.25)
        assert expected_clicks([0, 1], world) == pytest.approx(0.625)


class TestDay:
    def setup_method(self):
        self.world = generate_world(WorldConfig(n_users=300, n_titles=60,
                                                master_seed=1))

    def test_one_user(self):
        world = generate_world(WorldConfig(n_users=1, n_titles=10))
        log = simulate_day(np.arange(10), world, 1)
        assert set(log.user_id) == {0}

    def test_user_order_irrelevant(self):
        ranking = editorial_ranking(self.world, 1, 7)
        forward = simulate_day(ranking, self.world, 1, seed=7)
        backward = simulate_day(ranking, self.world, 1, seed=7,
                                users=range(299, -1, -1))
        for col in ('user_id', 'position', 'title_id', 'clicked',
                    'watch_seconds'):
            np.testing.assert_array_equal(getattr(forward, col),
                                          getattr(backward, col))

    def test_sorted_by_user(self):
        log = simulate_day(np.arange(60), self.world, 2)
        assert np.all(np.diff(log.user_id) >= 0)
        assert np.all(log.day == 2)

    def test_click_total(self):
        world = generate_world(WorldConfig(n_users=2000, n_titles=100,
                                           master_seed=4))
        ranking = np.arange(100)
        log = simulate_day(ranking, world, 1)
        q = expected_clicks(ranking, world)
        se = np.sqrt(2000 * q * (1 - q))
        assert abs(log.clicked.sum() - 2000 * q) < 3 * se

    def test_model_source(self):
        class Fixed(object):
            def rank(self):
                return np.arange(60)[::-1]
        log = simulate_day(Fixed(), self.world, 1)
        assert np.all(log.title_id[log.position == 0] == 59)

    def test_editorial_ranking(self):
        first = editorial_ranking(self.world, 3, 11)
        np.testing.assert_array_equal(first,
                                      editorial_ranking(self.world, 3, 11))
        np.testing.assert_array_equal(np.sort(first), np.arange(60))
        same = sum(np.array_equal(editorial_ranking(self.world, d, 11),
                                  editorial_ranking(self.world, d + 1, 11))
                   for d in range(1, 101))
        assert same == 0


class TestEventLog:
    def test_concat_and_iterate(self):
        world = generate_world(WorldConfig(n_users=20, n_titles=10))
        days = [simulate_day(np.arange(10), world, d) for d in (1, 2)]
        log = EventLog.concat(days)
        assert len(log) == len(days[0]) + len(days[1])
        assert log.total_watch() == pytest.approx(
            days[0].total_watch() + days[1].total_watch())
        events = list(log)
        assert events[0].day == 1 and events[-1].day == 2
        assert len(EventLog.concat([])) == 0

    def test_export(self, tmp_path):
        world = generate_world(WorldConfig(n_users=5, n_titles=10))
        log = simulate_day(np.arange(10), world, 1)
        path = tmp_path / 'events.csv'
        log.export(str(path), 42)
        lines = path.read_text().splitlines()
        assert lines[0] == '# master_seed=42'
        assert lines[1] == 'day,user_id,position,title_id,clicked,' \
                           'watch_seconds'
        assert len(lines) == len(log) + 2
