#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""Tweedie Ranking Lab

Description:
- simulate:  replay the 13-day synthetic recommendation protocol for each
             loss kind, several runs each, and compare total watch time.
- fit:       normalize a watch-time sample and grid-search the Tweedie
             (mu, p, phi) minimizing the Kolmogorov-Smirnov distance.
- decompose: solve metric directions from loss-coefficient observations
             and mix the loss library along the watch direction.
- gradcheck: verify every analytic gradient against finite differences.
- sample:    dump Tweedie draws, one per line, or a histogram.

Note:
- Called as tw-simulate, tw-fit, tw-decompose, tw-gradcheck or tw-sample,
  the subcommand is implied by the program name.

--snip--

Exit codes: 0 success, 1 invalid input, 2 runtime or numeric failure.
"""

__author__ = "twlab contributors"
__license__ = "GNU GPL 2 or later"
from .version import __version__

DEFAULT_OUT = 'twlab-out'
DEFAULT_SAMPLE_SIZE = 100000
GRADCHECK_CASES = 100
GRADCHECK_TOLERANCE = 1e-5

# ========== Configuration Ends ==========

import logging, os, sys
from optparse import OptionParser, OptionGroup, SUPPRESS_HELP
log = logging.getLogger(__name__)

from .config import load_protocol, override
from .decompose import (compose_loss, plant_observations, read_observations,
                        solve_projection, taylor_coeffs)
from .errors import NumericError, ValidationError
from .fit import (GridRange, GridSpec, NormalizationSpec, generate_sample,
                  grid_search, normalize, read_sample)
from .losses import DEFAULT_POWER, KINDS, LossKind, gradient_error
from .output.manifest import RunManifest
from .output.report import (config_echo, emit_report, write_grid_table,
                            write_projection)
from .ranker import grad_check, random_check_case
from .sim.harness import ProtocolConfig, run_many
from .tweedie import TweedieParams, histogram, sample
from .ui.console import parse_choice, parse_range, print_table

COMMANDS = ('simulate', 'fit', 'decompose', 'gradcheck', 'sample')
NORMALIZATIONS = {'none': None, 'zscore': 'zscore_shifted',
                  'scale': 'scale_only'}


def default_threads():
    return os.cpu_count() or 1


def _kinds(opts):
    names = parse_choice(opts.kinds, str) if opts.kinds else list(KINDS)
    return [LossKind.parse(x, opts.p) for x in names]


def _slug(label):
    return ''.join(c if c.isalnum() else '_' for c in label).strip('_')


def cmd_simulate(opts, args):
    """Run the protocol for every kind and write report, plot data, event
    logs of run 0 and the manifest into C{opts.out}."""
    if opts.config:
        config = load_protocol(opts.config)
    else:
        config = ProtocolConfig().validate()
    kinds = parse_choice(opts.kinds, str) if opts.kinds else None
    config = override(config, seed=opts.seed, runs=opts.runs, kinds=kinds,
                      p=opts.p, epochs=opts.epochs)
    manifest = RunManifest('simulate', config_echo(config),
                           config.world.master_seed)

    os.makedirs(opts.out, exist_ok=True)
    report = run_many(config, threads=opts.threads, keep_events_for=(0,))
    paths = emit_report(report, opts.out)
    for label in report.labels:
        path = os.path.join(opts.out, 'events_%s.csv' % _slug(label))
        report.runs[label][0].events.export(path, config.world.master_seed)
        paths.append(path)

    rows = []
    for label in report.labels:
        totals = report.per_run_totals(label)
        rows.append((label, '%.1f' % (sum(totals) / len(totals))))
    print_table(('kind', 'mean total watch (s)'), rows)
    for key in sorted(report.lifts):
        print('%-32s lift %+7.2f%%  p=%.3g' % (
            key, report.lifts[key], report.p_values[key]))
    return manifest.finish(paths), os.path.join(opts.out, 'manifest.json')


def cmd_fit(opts, args):
    """Grid-search Tweedie parameters for a sample file (or generated
    self-consistency sample)."""
    seed = opts.seed or 0
    manifest = RunManifest('fit', {
        'normalize': opts.normalize, 'cap': opts.cap, 'p': opts.p,
        'mu_grid': opts.mu_grid, 'p_grid': opts.p_grid,
        'phi_grid': opts.phi_grid}, seed)
    if opts.generate:
        params = TweedieParams(mu=opts.mu, phi=opts.phi, p=opts.p)
        values = generate_sample(params, opts.generate, seed)
        source = 'generated n=%d' % opts.generate
    elif args:
        values = read_sample(args[0])
        source = args[0]
    else:
        raise ValidationError("fit needs a sample file or --generate N")

    method = NORMALIZATIONS[opts.normalize]
    if method:
        values = normalize(values, NormalizationSpec(method, opts.cap))
    grid = GridSpec(GridRange(*parse_range(opts.mu_grid)),
                    GridRange(*parse_range(opts.p_grid)),
                    GridRange(*parse_range(opts.phi_grid)))
    result = grid_search(values, grid, threads=opts.threads)
    result.normalization = method

    manifest.config['source'] = source
    best = result.best
    print('best mu=%g p=%g phi=%g ks=%.5f (%d grid points, n=%d)' % (
        best.mu, best.p, best.phi, result.best_ks, len(result.table),
        result.n))
    paths = [write_grid_table(result, opts.out, seed)] if opts.out else []
    return manifest.finish(paths), None


def cmd_decompose(opts, args):
    """Solve metric projections from observations (file or planted)."""
    seed = opts.seed or 0
    manifest = RunManifest('decompose', {}, seed)
    library = [taylor_coeffs(x) for x in _kinds(opts)]
    if args:
        obs = read_observations(args[0])
        source = args[0]
    elif opts.plant:
        t = parse_choice(opts.plant.split('=', 1)[-1])
        v = (parse_choice(opts.plant_v.split('=', 1)[-1]) if opts.plant_v
             else list(reversed(t)))
        obs = plant_observations(t, v, opts.rows, opts.noise, seed)
        source = 'planted t=%s v=%s rows=%d noise=%g' % (
            t, v, opts.rows, opts.noise)
    else:
        raise ValidationError("decompose needs an observations file or "
                              "--plant")

    projection = solve_projection(obs)
    composition = compose_loss(projection.t_vector, library)
    manifest.config.update(source=source,
                           library=[str(x.kind) for x in library])
    print('t = %s' % ', '.join('%.6g' % x for x in projection.t_vector))
    print('v = %s' % ', '.join('%.6g' % x for x in projection.v_vector))
    print_table(('loss', 'c1', 'c2', 'c3', 'weight'), [
        (x.kind.label, '%.5f' % x.coeffs[0], '%.5f' % x.coeffs[1],
         '%.5f' % x.coeffs[2], '%.5f' % w)
        for x, w in zip(library, composition.weights)])
    print('cosine to t: %.6f' % composition.cosine)
    paths = []
    if opts.out:
        paths.append(write_projection(projection, composition, opts.out,
                                      seed, library))
    return manifest.finish(paths), None


def gradcheck_rows(cases=GRADCHECK_CASES, seed=0, corrupt=0.0, p=None):
    """(name, max relative error, passed) for each loss and ranker kind."""
    kinds = [LossKind.parse(x, p or DEFAULT_POWER) for x in KINDS]
    rows = []
    for kind in kinds:
        err = gradient_error(kind, cases, seed, corrupt=corrupt)
        rows.append(('loss %s' % kind.label, err))
    for kind in kinds:
        err = 0.0
        for case in range(cases):
            model, smp = random_check_case(kind, seed + case)
            err = max(err, grad_check(model, smp, corrupt=corrupt))
        rows.append(('ranker %s' % kind.label, err))
    return [(name, err, err < GRADCHECK_TOLERANCE) for name, err in rows]


def cmd_gradcheck(opts, args):
    """Finite-difference verdicts; fails (exit 2) if any row fails."""
    seed = opts.seed or 0
    manifest = RunManifest('gradcheck', {'cases': opts.cases,
                                         'tolerance': GRADCHECK_TOLERANCE},
                           seed)
    rows = gradcheck_rows(opts.cases, seed, opts.corrupt, opts.p)
    print_table(('check', 'max rel error', 'verdict'), [
        (name, '%.3e' % err, 'pass' if ok else 'FAIL')
        for name, err, ok in rows])
    failed = [name for name, _, ok in rows if not ok]
    if failed:
        raise NumericError("Gradient check failed: %s" % ', '.join(failed))
    return manifest.finish(), None


def cmd_sample(opts, args):
    """Dump Tweedie draws one per line (or a histogram with --hist)."""
    seed = opts.seed or 0
    manifest = RunManifest('sample', {'mu': opts.mu, 'phi': opts.phi,
                                      'p': opts.p, 'n': opts.count}, seed)
    params = TweedieParams(mu=opts.mu, phi=opts.phi, p=opts.p)
    out = open(opts.out, 'w') if opts.out else sys.stdout
    try:
        out.write('# master_seed=%d mu=%r phi=%r p=%r\n'
                  % (seed, params.mu, params.phi, params.p))
        if opts.hist:
            zero, edges, counts = histogram(params, opts.count, opts.hist,
                                            seed)
            out.write('# zero_fraction=%r\n' % zero)
            for low, high, count in zip(edges[:-1], edges[1:], counts):
                out.write('%r\t%r\t%d\n' % (float(low), float(high), count))
        else:
            for value in sample(params, opts.count, seed):
                out.write('%r\n' % float(value))
    finally:
        if out is not sys.stdout:
            out.close()
    return manifest.finish([opts.out] if opts.out else []), None


HANDLERS = {'simulate': cmd_simulate, 'fit': cmd_fit,
            'decompose': cmd_decompose, 'gradcheck': cmd_gradcheck,
            'sample': cmd_sample}


class LabOptionParser(OptionParser):
    """Bad flags and flag values exit with status 1 like any invalid input."""

    def error(self, msg):
        self.print_usage(sys.stderr)
        self.exit(1, "%s: error: %s\n" % (self.get_prog_name(), msg))


def make_parser(command):
    # pylint: disable=bad-continuation
    opars = LabOptionParser(version="%%prog v%s" % __version__,
        usage="%%prog %s [options] [file]" % command,
        description=__doc__.replace('\r\n', '\n').split('\n--snip--\n')[0])
    # Allow pre-formatted descriptions
    opars.formatter.format_description = lambda description: description

    opars.add_option('-v', '--verbose', action="count", dest="verbose",
        default=2, help="Increased verbosity. Use twice for extra effect")
    opars.add_option('-q', '--quiet', action="count", dest="quiet",
        default=0, help="Decreased verbosity. Use twice for extra effect")
    opars.add_option("--seed", type=int, dest="seed", default=None,
        help="Master seed (overrides the config file)")
    opars.add_option("--threads", type=int, dest="threads",
        default=default_threads(), metavar="NUM",
        help="Workers for run/grid fan-out (default: %default)")
    opars.add_option("--p", type=float, dest="p", default=None,
        help="Tweedie power parameter (default: %s)" % DEFAULT_POWER)
    opars.add_option("--kinds", dest="kinds", default=None,
        help="Comma list of loss kinds: %s" % ','.join(KINDS))
    opars.add_option("-o", "--out", dest="out", default=None,
        help="Output directory (simulate) or file")

    sim = OptionGroup(opars, "simulate")
    sim.add_option("-c", "--config", dest="config", default=None,
        help="JSON protocol config (default: built-in defaults)")
    sim.add_option("--runs", type=int, dest="runs", default=None,
        help="Runs per loss kind")
    sim.add_option("--epochs", type=int, dest="epochs", default=None,
        help="Training epochs per day")
    opars.add_option_group(sim)

    dist = OptionGroup(opars, "fit / sample")
    dist.add_option("--mu", type=float, dest="mu", default=0.2)
    dist.add_option("--phi", type=float, dest="phi", default=1.5)
    dist.add_option("-n", "--count", type=int, dest="count",
        default=DEFAULT_SAMPLE_SIZE, help="Draws to dump (default: %default)")
    dist.add_option("--hist", type=int, dest="hist", default=0,
        metavar="BINS", help="Print a histogram instead of raw draws")
    dist.add_option("--generate", type=int, dest="generate", default=0,
        metavar="N", help="Fit N draws from (--mu, --phi, --p) instead of "
                          "a file")
    dist.add_option("--normalize", dest="normalize", default="none",
        type="choice", choices=sorted(NORMALIZATIONS),
        help="none, zscore (shifted Z-score) or scale (default: %default)")
    dist.add_option("--cap", type=float, dest="cap", default=10.0,
        help="Truncation cap after normalizing (default: %default)")
    dist.add_option("--mu-grid", dest="mu_grid", default="0.05:0.5:0.05")
    dist.add_option("--p-grid", dest="p_grid", default="1.05:1.95:0.05")
    dist.add_option("--phi-grid", dest="phi_grid", default="0.5:2.5:0.05")
    opars.add_option_group(dist)

    dec = OptionGroup(opars, "decompose / gradcheck")
    dec.add_option("--plant", dest="plant", default=None, metavar="t=A,B,C",
        help="Plant a watch direction instead of reading observations")
    dec.add_option("--plant-v", dest="plant_v", default=None,
        metavar="v=A,B,C", help="Planted conversion direction")
    dec.add_option("--rows", type=int, dest="rows", default=3,
        help="Planted observation rows (default: %default)")
    dec.add_option("--noise", type=float, dest="noise", default=0.0,
        help="Planted metric noise deviation (default: %default)")
    dec.add_option("--cases", type=int, dest="cases",
        default=GRADCHECK_CASES, help="Random cases per gradient check")
    dec.add_option("--corrupt", type=float, dest="corrupt", default=0.0,
        help=SUPPRESS_HELP)
    opars.add_option_group(dec)
    return opars


def main(argv=None, prog=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    cmd = os.path.basename(prog or sys.argv[0])
    if cmd.startswith('tw-') and cmd[3:] in COMMANDS:
        command = cmd[3:]
    elif argv and argv[0] in COMMANDS:
        command = argv.pop(0)
    else:
        print("Usage: %s {%s} [options]" % (cmd, ','.join(COMMANDS)),
              file=sys.stderr)
        return 1

    opars = make_parser(command)
    try:
        (opts, args) = opars.parse_args(argv)
    except SystemExit as err:
        return err.code
    if command == 'simulate' and not opts.out:
        opts.out = DEFAULT_OUT
    if command != 'simulate' and opts.p is None:
        opts.p = DEFAULT_POWER

    # Set up clean logging to stderr
    log_levels = [logging.CRITICAL, logging.ERROR, logging.WARNING,
                  logging.INFO, logging.DEBUG]
    opts.verbose = min(opts.verbose - opts.quiet, len(log_levels) - 1)
    opts.verbose = max(opts.verbose, 0)
    logging.basicConfig(level=log_levels[opts.verbose],
                        format='%(levelname)s: %(message)s')

    try:
        manifest, manifest_path = HANDLERS[command](opts, args)
        if manifest_path:
            manifest.write(manifest_path)
    except ValidationError as err:
        log.error("%s", err, exc_info=opts.verbose >= 4)
        return 1
    except (NumericError, OSError) as err:
        log.error("%s", err, exc_info=opts.verbose >= 4)
        return 2
    print(manifest.to_json(), file=sys.stderr)
    return 0


if __name__ == '__main__':
    sys.exit(main())

# vim: set sw=4 sts=4 :
