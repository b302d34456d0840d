"""Tests for report files and run manifests."""

import json

import numpy as np
import pytest

from twlab.errors import InvalidConfig
from twlab.losses import LossKind
from twlab.output.manifest import RunManifest
from twlab.output.report import (PLOT_NAME, REPORT_NAME, emit_report,
                                 write_grid_table)
from twlab.fit import GridRange, GridSpec, grid_search
from twlab.ranker import TrainConfig
from twlab.sim.harness import ExperimentReport, ProtocolConfig, run_many
from twlab.sim.world import WorldConfig
from twlab.tweedie import TweedieParams, sample


@pytest.fixture(scope='module')
def report():
    config = ProtocolConfig(
        editorial_days=1, total_days=3, n_runs=2,
        kinds=(LossKind('tweedie'), LossKind('logloss')),
        world=WorldConfig(n_users=40, n_titles=15, master_seed=12),
        train=TrainConfig(epochs=2, batch_size=16))
    return run_many(config)


class TestEmitReport:
    def test_files(self, report, tmp_path):
        paths = emit_report(report, str(tmp_path))
        assert [p.split('/')[-1] for p in paths] == [REPORT_NAME, PLOT_NAME]
        data = json.loads((tmp_path / REPORT_NAME).read_text())
        assert data['master_seed'] == 12
        assert data['config_echo']['kinds'] == ['tweedie:1.5', 'logloss']
        for label in ('Tweedie', 'Pointwise'):
            daily = np.array(data['per_run_daily_totals'][label])
            np.testing.assert_allclose(data['per_run_totals'][label],
                                       daily[:, 1:].sum(axis=1))
        assert set(data['lifts']) == {'Tweedie vs Pointwise',
                                      'Pointwise vs Tweedie'}

    def test_plot_rows(self, report, tmp_path):
        emit_report(report, str(tmp_path))
        lines = (tmp_path / PLOT_NAME).read_text().splitlines()
        assert lines[0] == '# master_seed=12'
        assert lines[1] == 'kind,day,mean_watch_seconds'
        assert len(lines) == 2 + 2 * 3
        assert lines[2].startswith('Tweedie,1,')

    def test_byte_identical(self, report, tmp_path):
        first, second = tmp_path / 'a', tmp_path / 'b'
        first.mkdir()
        second.mkdir()
        emit_report(report, str(first))
        emit_report(report, str(second))
        for name in (REPORT_NAME, PLOT_NAME):
            assert (first / name).read_bytes() == (second / name).read_bytes()

    def test_no_kinds(self, report, tmp_path):
        empty = ExperimentReport(report.config, [], {}, {}, {}, {})
        with pytest.raises(InvalidConfig):
            emit_report(empty, str(tmp_path))
        assert list(tmp_path.iterdir()) == []


def test_grid_table(tmp_path):
    values = sample(TweedieParams(0.2, 1.5, 1.5), 500, 0)
    grid = GridSpec(GridRange(0.2, 0.3, 0.1), GridRange(1.5, 1.5, 0.1),
                    GridRange(1.5, 1.5, 0.1))
    path = write_grid_table(grid_search(values, grid), str(tmp_path / 'g'),
                            3)
    lines = open(path).read().splitlines()
    assert lines[0] == '# master_seed=3'
    assert lines[1] == 'mu,p,phi,ks'
    assert len(lines) == 5
    assert lines[-1].startswith('# best mu=')


class TestManifest:
    def test_json(self):
        manifest = RunManifest('fit', {'p': 1.5}, 7).finish(['out.csv'])
        data = json.loads(manifest.to_json())
        assert data['command'] == 'fit'
        assert data['master_seed'] == 7
        assert data['outputs'] == ['out.csv']
        assert 'started' not in data
        assert set(data['versions']) >= {'twlab', 'numpy', 'scipy'}
        assert data['duration_seconds'] >= 0

    def test_write(self, tmp_path):
        path = str(tmp_path / 'manifest.json')
        RunManifest('simulate', {}, 0).finish().write(path)
        assert json.loads(open(path).read())['outputs'] == [path]
