"""Writers for experiment reports, plot data, fit tables and projections.

Every file starts with the master seed: as a C{# master_seed=N} comment in
delimited text, as a top-level C{master_seed} key in JSON. Nothing
time-dependent is written, so identical inputs give byte-identical files.
"""

__author__ = "twlab contributors"
__license__ = "GNU GPL 2 or later"

import csv
import json
import logging
import os
from dataclasses import asdict

import numpy as np

from ..errors import InvalidConfig

log = logging.getLogger(__name__)

REPORT_NAME = 'report.json'
PLOT_NAME = 'plot_data.csv'


def _jsonable(value):
    """Recursively turn dataclasses, tuples and numpy values into JSON."""
    if hasattr(value, '__dataclass_fields__'):
        return _jsonable(asdict(value))
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_jsonable(x) for x in value]
    if isinstance(value, np.generic):
        return value.item()
    return value


def config_echo(config):
    """The protocol config as plain JSON data, kinds by CLI name."""
    echo = _jsonable(config)
    echo['kinds'] = [str(x) for x in config.kinds]
    return echo


def write_json(data, path, seed):
    payload = {'master_seed': seed}
    payload.update(_jsonable(data))
    with open(path, 'w') as fobj:
        json.dump(payload, fobj, indent=2, sort_keys=True, allow_nan=True)
        fobj.write('\n')
    log.info("Wrote %s", path)
    return path


def _open_delimited(path, seed):
    fobj = open(path, 'w', newline='')
    fobj.write('# master_seed=%d\n' % seed)
    return fobj, csv.writer(fobj, lineterminator='\n')


def report_data(report):
    cfg = report.config
    welch = {}
    for key, res in report.welch.items():
        welch[key] = None if res is None else dict(res._asdict())
    return {
        'config_echo': config_echo(cfg),
        'per_run_totals': {x: report.per_run_totals(x)
                           for x in report.labels},
        'per_run_daily_totals': {
            x: [r.daily_totals.tolist() for r in report.runs[x]]
            for x in report.labels},
        'daily_means': {x: report.daily_means(x).tolist()
                        for x in report.labels},
        'lifts': report.lifts,
        'p_values': report.p_values,
        'welch': welch,
    }


def emit_report(report, out_dir):
    """Write the structured report and the per-day plot data.

    @returns: List of paths written
    @raise InvalidConfig: if the report covers no kinds (nothing is written)
    """
    if not report.labels:
        raise InvalidConfig("Refusing to emit a report with no kinds")
    seed = report.config.world.master_seed
    paths = [write_json(report_data(report),
                        os.path.join(out_dir, REPORT_NAME), seed)]

    plot_path = os.path.join(out_dir, PLOT_NAME)
    fobj, writer = _open_delimited(plot_path, seed)
    with fobj:
        writer.writerow(('kind', 'day', 'mean_watch_seconds'))
        for label in report.labels:
            for day, mean in enumerate(report.daily_means(label), 1):
                writer.writerow((label, day, repr(float(mean))))
    paths.append(plot_path)
    return paths


def write_grid_table(result, path, seed):
    """KS grid as C{mu,p,phi,ks} rows followed by a best-fit summary block."""
    fobj, writer = _open_delimited(path, seed)
    with fobj:
        writer.writerow(('mu', 'p', 'phi', 'ks'))
        for row in result.table:
            writer.writerow([repr(float(x)) for x in row])
        best = result.best
        fobj.write('# best mu=%r p=%r phi=%r ks=%r n=%d normalization=%s\n'
                   % (best.mu, best.p, best.phi, result.best_ks, result.n,
                      result.normalization or 'none'))
    return path


def write_projection(projection, composition, path, seed, library=None):
    data = {
        't_vector': projection.t_vector,
        'v_vector': projection.v_vector,
        't_stderr': projection.t_stderr,
        'v_stderr': projection.v_stderr,
        't_residual': projection.t_residual,
        'v_residual': projection.v_residual,
        'mixture_weights': composition.weights,
        'mixture_cosine': composition.cosine,
    }
    if library is not None:
        data['library'] = [str(x.kind) for x in library]
    return write_json(data, path, seed)
