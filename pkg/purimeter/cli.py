#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
#

"""
This file defines the `purimeter` command line interface

Sub-commands:

* ``simulate`` - write a simulated homodyne record as CSV, reporting the ground truth on standard error
* ``analyze`` - analyze a CSV record and emit the JSON analysis report
* ``bound`` - evaluate the purity bound and the estimators for a purity, an F value or a purity grid
* ``ensemble`` - run an ensemble described by a configuration file

Exit codes are 0 on success, 2 for invalid input and 3 for I/O errors.
"""

import argparse
import json
import logging
import os
import sys

from ._version import __version__
from .analysis import HomodyneAnalyzer
from .bounds import phi_exact, phi_approx, f_bound, f_bound_expanded, bound_table, locate_piece
from .config_parser import ConfigParser
from .ensemble import EnsembleConfig, EnsembleRunner
from .estimators import purity_from_f, purity_from_f_exact, temperature_from_f, mean_photon_from_f
from .gaussian_state import GaussianState, thermal_from_temperature
from .purimeter_constants import (BINS_MODES, BINS_MODE_NATIVE, TEMP_CONVENTIONS, TEMP_CONVENTION_BOTH,
                                  F_STATISTIC_MEAN, F_STATISTIC_MIN, DEFAULT_SIGNIFICANCE, DEFAULT_BIN_COUNT,
                                  DEFAULT_SAMPLES_PER_BIN, DEFAULT_RANDOM_SEED, TABLE_TEMPERATURE_FACTOR,
                                  EXIT_SUCCESS, EXIT_INPUT_ERROR, EXIT_IO_ERROR)
from .record_io import read_series_csv, write_series_csv
from .simulator import AcquisitionConfig, DetectorModel, HomodyneSimulator
from .utils import PurimeterError, PureStateError, derive_seed, parse_grid_spec

LOG_FORMAT = "[%(asctime)s][%(levelname)s][%(module)s][%(funcName)s] %(message)s"


def _state_from_args(args):
    if args.state is not None:
        return ConfigParser.parseStateSpec(args.state)
    if args.thermal_nbar is not None:
        return GaussianState.thermal(args.thermal_nbar)
    if args.thermal_t is not None:
        return thermal_from_temperature(args.thermal_t)
    if args.coherent is not None:
        return GaussianState.coherent(*args.coherent)
    if args.gaussian is not None:
        return GaussianState.general(*args.gaussian)
    return GaussianState.vacuum()


def cmd_simulate(args):
    """ Simulate a record and write it as CSV; ground truth goes to standard error"""
    state = _state_from_args(args)
    detector = DetectorModel(args.eta, args.noise)
    config = AcquisitionConfig(args.bins, args.per_bin, args.seed)
    simulator = HomodyneSimulator(state, detector, config, workers=args.workers, verbose=args.verbose,
                                  debug=args.debug)
    write_series_csv(simulator.build(), args.output)

    effective = simulator.effectiveState()
    print(f"pi_true={state.purity:.6f} F_true={state.uncertaintyFunction:.6f} "
          f"pi_effective={effective.purity:.6f} F_effective={effective.uncertaintyFunction:.6f}", file=sys.stderr)

    if args.shot_output:
        shot = simulator.withState(GaussianState.vacuum()).withSeed(derive_seed(config.seed, 0))
        write_series_csv(shot.build(), args.shot_output)
    return EXIT_SUCCESS


def cmd_analyze(args):
    """ Analyze a CSV record and write the JSON report, or a single value selected by `--query`"""
    series = read_series_csv(args.input)
    shot = read_series_csv(args.shot) if args.shot else None
    provenance = {"input": args.input, "shot": args.shot}
    analyzer = HomodyneAnalyzer(series, shot=shot, efficiency=args.eta, binsMode=args.bins_mode,
                                fStatistic=args.f_statistic, alpha=args.alpha, tempConvention=args.temp_convention,
                                frequencyHz=args.frequency_hz, provenance=provenance, verbose=args.verbose,
                                debug=args.debug)
    report = analyzer.analyze()

    if args.query:
        text = json.dumps(report.valueAt(args.query), sort_keys=True) + "\n"
    else:
        text = report.toJson()

    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_SUCCESS


def _print_rows(rows):
    for name, value in rows:
        formatted = f"{value:.6f}" if isinstance(value, float) else str(value)
        print(f"{name:<16} {formatted}")


def cmd_bound(args):
    """ Evaluate bound functions and estimators"""
    if args.pi is not None:
        pi = args.pi
        _print_rows([("pi", pi),
                     ("piece", locate_piece(pi).k),
                     ("phi", phi_exact(pi)),
                     ("phi_approx", phi_approx(pi)),
                     ("f_bound", f_bound(pi, exact=True)),
                     ("f_bound_approx", f_bound(pi, exact=False)),
                     ("f_bound_expanded", f_bound_expanded(pi))])
    elif args.f is not None:
        f = args.f
        rows = [("f", f), ("pi_f", purity_from_f(f)), ("pi_f_exact", purity_from_f_exact(f))]
        try:
            t = temperature_from_f(f)
            rows += [("t_eq", t.value), ("t_table", t.value * TABLE_TEMPERATURE_FACTOR)]
        except PureStateError:
            rows += [("t_eq", "0 (pure state)"), ("t_table", "0 (pure state)")]
        rows.append(("mean_photon", mean_photon_from_f(f)))
        _print_rows(rows)
    else:
        table = bound_table(parse_grid_spec(args.grid))
        if args.output:
            table.to_csv(args.output, index=False, lineterminator="\n")
        else:
            sys.stdout.write(table.to_csv(index=False, lineterminator="\n"))
        worst = table.loc[table["rel_dev"].idxmax()]
        print(f"max_rel_dev={worst['rel_dev']:.6f} at pi={worst['pi']:.6f}", file=sys.stderr)
    return EXIT_SUCCESS


def cmd_ensemble(args):
    """ Run an ensemble from a configuration file, writing CSV and JSON next to it"""
    options = ConfigParser.readConfigFile(args.config)
    if args.workers is not None:
        options["workers"] = args.workers
    config = EnsembleConfig.fromDict(options)
    summary = EnsembleRunner(config, verbose=args.verbose, debug=args.debug).run()

    prefix = args.output_prefix or os.path.splitext(args.config)[0]
    summary.writeCsv(f"{prefix}_acquisitions.csv")
    summary.writeJson(f"{prefix}_summary.json")

    populations = summary.toDict()["populations"]
    for column, values in populations.items():
        mean = values["mean"]
        print(f"{column:<18} n={values['n']} mean={mean if mean is None else format(mean, '.6f')} "
              f"normal={values['normal']}")
    return EXIT_SUCCESS


def build_parser():
    """ Build the argument parser with one sub-parser per command"""
    parser = argparse.ArgumentParser(prog="purimeter",
                                     description="Purity estimation from homodyne quadrature records")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--verbose", action="store_true", help="log progress at INFO level")
    parser.add_argument("--debug", action="store_true", help="log at DEBUG level")
    commands = parser.add_subparsers(dest="command", required=True)

    simulate = commands.add_parser("simulate", help="write a simulated record as CSV")
    states = simulate.add_mutually_exclusive_group()
    states.add_argument("--state", help="state spec, e.g. 'thermal(nbar=0.5)' or 'coherent(q=2, p=0)'")
    states.add_argument("--thermal-nbar", type=float, help="thermal state with this mean photon number")
    states.add_argument("--thermal-t", type=float, help="thermal state at this dimensionless temperature")
    states.add_argument("--coherent", type=float, nargs=2, metavar=("Q", "P"), help="coherent state")
    states.add_argument("--gaussian", type=float, nargs=5, metavar=("SQQ", "SPP", "SPQ", "Q", "P"),
                        help="general Gaussian state")
    states.add_argument("--vacuum", action="store_true", help="vacuum state (default)")
    simulate.add_argument("--bins", type=int, default=DEFAULT_BIN_COUNT, help="number of phase bins")
    simulate.add_argument("--per-bin", type=int, default=DEFAULT_SAMPLES_PER_BIN, help="samples per bin")
    simulate.add_argument("--eta", type=float, default=1.0, help="detector quantum efficiency")
    simulate.add_argument("--noise", type=float, default=0.0, help="electronic noise variance")
    simulate.add_argument("--seed", type=int, default=DEFAULT_RANDOM_SEED, help="random seed")
    simulate.add_argument("--workers", type=int, default=None, help="threads used to generate bins")
    simulate.add_argument("--shot-output", default=None, help="also write a shot noise record to this path")
    simulate.add_argument("-o", "--output", required=True, help="output CSV path")
    simulate.set_defaults(handler=cmd_simulate)

    analyze = commands.add_parser("analyze", help="analyze a CSV record")
    analyze.add_argument("input", help="input CSV path")
    analyze.add_argument("--shot", default=None, help="shot noise CSV path for baseline subtraction")
    analyze.add_argument("--bins-mode", choices=sorted(BINS_MODES), default=BINS_MODE_NATIVE)
    analyze.add_argument("--eta", type=float, default=None, help="invert losses of a detector with this efficiency")
    analyze.add_argument("--temp-convention", choices=TEMP_CONVENTIONS, default=TEMP_CONVENTION_BOTH)
    analyze.add_argument("--f-statistic", choices=(F_STATISTIC_MEAN, F_STATISTIC_MIN), default=F_STATISTIC_MEAN)
    analyze.add_argument("--alpha", type=float, default=DEFAULT_SIGNIFICANCE, help="normality significance level")
    analyze.add_argument("--frequency-hz", type=float, default=None, help="mode frequency for Kelvin temperatures")
    analyze.add_argument("--query", default=None, help="jmespath expression selecting a single report value")
    analyze.add_argument("-o", "--output", default=None, help="output JSON path, standard output if omitted")
    analyze.set_defaults(handler=cmd_analyze)

    bound = commands.add_parser("bound", help="evaluate the purity bound and estimators")
    bound_input = bound.add_mutually_exclusive_group(required=True)
    bound_input.add_argument("--pi", type=float, help="purity in (0, 1]")
    bound_input.add_argument("--f", type=float, help="uncertainty function value")
    bound_input.add_argument("--grid", help="purity grid start:stop:step, tabulated as CSV")
    bound.add_argument("-o", "--output", default=None, help="CSV path for --grid output")
    bound.set_defaults(handler=cmd_bound)

    ensemble = commands.add_parser("ensemble", help="run an ensemble from a configuration file")
    ensemble.add_argument("config", help="configuration file of key = value lines")
    ensemble.add_argument("--workers", type=int, default=None, help="acquisitions run concurrently")
    ensemble.add_argument("--output-prefix", default=None,
                          help="prefix of the output files, defaults to the config path without extension")
    ensemble.set_defaults(handler=cmd_ensemble)
    return parser


def main(argv=None):
    """ Command line entry point

    :param argv: argument list, defaults to `sys.argv[1:]`
    :returns: exit code
    """
    args = build_parser().parse_args(argv)

    level = logging.DEBUG if args.debug else logging.INFO if args.verbose else logging.WARNING
    logging.basicConfig(level=level, format=LOG_FORMAT)
    logger = logging.getLogger(__name__)

    try:
        return args.handler(args)
    except (PurimeterError, ValueError) as e:
        message = e.msg if isinstance(e, PurimeterError) else str(e)
        logger.debug("input error", exc_info=True)
        print(f"error: {message}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except OSError as e:
        logger.debug("I/O error", exc_info=True)
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO_ERROR
