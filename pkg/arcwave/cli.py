"""
The ``arcwave`` command::

    arcwave solve --config helmholtz.json --out results/
    arcwave sweep --config family.json --index 0 --index 1 --nodes 33 --threads 4
    arcwave verify --suite all
    arcwave info

Exit codes: 0 success, 1 failed verification, 2 configuration or argument error, 3 degenerate
geometry, 4 solver failure, 5 failed certificate.
"""
import argparse
import asyncio
import concurrent.futures
import logging
import os
import sys

from . import bessel, kernels
from .base import ThreadedJobProducer
from .config import fixture_dir, load_config
from .errors import (
    ArcwaveError,
    CertificateError,
    ConfigError,
    DegenerateGeometry,
    InvalidArgument,
    SolverError,
)
from .holomorphy import certificate_report, fit_sweep, require_admissible, sweep_jobs
from .io import (
    CSVWriter,
    coefficient_rows,
    field_header,
    field_rows,
    solution_document,
    write_csv,
    write_json,
)
from .solver import field_grid, solve_scattering
from .spectral import chebyshev_nodes
from .subscriptions import OrderedSubscription
from .verify import SUITES, suite_checks

_log = logging.getLogger("arcwave.cli")

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_CONFIG = 2
EXIT_GEOMETRY = 3
EXIT_SOLVER = 4
EXIT_CERTIFICATE = 5

DEFAULT_NODES = 33
DEFAULT_EPSILON_SCAN = (0.01, 0.03, 0.1, 0.3, 1.0)


def _threads(n):
    return n if n else (os.cpu_count() or 1)


def _outputDir(args):
    os.makedirs(args.out, exist_ok=True)
    return args.out


async def run_jobs(jobs, threads, writer=None):
    """
    Runs the jobs on a :class:`~arcwave.base.ThreadedJobProducer` and returns their
    :class:`~arcwave.base.JobResult` objects in job order. ``writer(n)``, if given, builds a
    consumer that receives the same results in job order.
    """
    producer = ThreadedJobProducer(jobs, threads=threads)
    ordered = producer.subscribe(OrderedSubscription(len(jobs)))
    consumer = None
    if writer is not None:
        consumer = writer(len(jobs))
        consumer.putSubscription(producer.subscribe(OrderedSubscription(len(jobs))))
    results = [await ordered.get() for _ in range(len(jobs))]
    if consumer is not None:
        await consumer
        if consumer.error is not None:
            raise consumer.error
    return results


# --- solve ---------------------------------------------------------------------------------------


def cmd_solve(args):
    config = load_config(args.config)
    params = config.params()
    arcs = config.arcs()
    out = _outputDir(args)
    with concurrent.futures.ThreadPoolExecutor(_threads(args.threads)) as pool:
        incident = config.incident(params)
        solution = solve_scattering(arcs, params, incident, config.problem, config.N, executor=pool)
    write_json(os.path.join(out, "solution.json"), solution_document(solution, config))
    grid = config.outputs.get("field_grid")
    if grid is not None:
        X, Y, U = field_grid(arcs, solution, grid["box"], grid["resolution"])
        write_csv(os.path.join(out, "field.csv"), field_header(params.components), field_rows(X, Y, U))
    _log.info("Solved %s: %s", config, solution.diagnostics)
    return EXIT_OK


# --- sweep ---------------------------------------------------------------------------------------


def _sweepIndices(args, config, family):
    if args.index:
        indices = list(args.index)
    elif "indices" in config.sweep:
        indices = list(config.sweep["indices"])
    else:
        weights = family.parameter_weights()
        indices = [k for k in range(family.n_parameters) if weights[k] > 0]
    if not indices:
        raise InvalidArgument("The family has no parameter to sweep")
    for k in indices:
        if not 0 <= k < family.n_parameters:
            raise InvalidArgument("Parameter index %d outside 0..%d" % (k, family.n_parameters - 1))
    return indices


def _sweepWriter(path, indices, nodes):
    y = chebyshev_nodes(nodes)

    def row(result):
        if not result.ok:
            return None
        k, node = divmod(result.index, nodes)
        return [indices[k], node, y[node], result.value.real, result.value.imag]

    return lambda n: CSVWriter(path, ["index", "node", "y", "re", "im"], row=row, rows=n)


def cmd_sweep(args):
    config = load_config(args.config)
    family = config.family()
    if family is None:
        raise ConfigError("sweep needs a geometry.family block")
    params = config.params()
    incident = config.incident(params)
    functional = config.functional()
    indices = _sweepIndices(args, config, family)
    nodes = args.nodes or config.sweep.get("nodes", DEFAULT_NODES)
    scan = args.epsilon_scan or config.sweep.get("epsilon_scan", DEFAULT_EPSILON_SCAN)
    seed = config.seed if args.seed is None else args.seed
    out = _outputDir(args)

    require_admissible(family)
    jobs = []
    for k in indices:
        jobs += sweep_jobs(family, params, incident, config.problem, functional, k, nodes, config.N)
    writer = _sweepWriter(os.path.join(out, "sweep.csv"), indices, nodes)
    results = asyncio.run(run_jobs(jobs, _threads(args.threads), writer))

    for r in results:
        if not r.ok:
            k, node = divmod(r.index, nodes)
            if isinstance(r.error, ArcwaveError):
                message = "Sweep of parameter %d failed at node %d: %s" % (indices[k], node, r.error)
                raise SolverError(message, node=node)
            raise r.error
    sweeps = [
        fit_sweep(k, [r.value for r in results[i * nodes : (i + 1) * nodes]]) for i, k in enumerate(indices)
    ]
    report = certificate_report(family, sweeps, scan, config.N, nodes, seed)
    report["config"] = config.toDict()
    write_json(os.path.join(out, "certificate.json"), report)
    write_csv(os.path.join(out, "coefficients.csv"), ["index", "n", "abs_c"], coefficient_rows(sweeps))
    if not report["pass"]:
        failed = [k for k, ok in zip(indices, report["pass_flags"]) if not ok]
        reason = "no geometric decay for indices %s" % failed if failed else "decay rates are not monotone in b"
        raise CertificateError("Certificate failed: %s" % reason, report=report)
    return EXIT_OK


# --- verify / info -------------------------------------------------------------------------------


def cmd_verify(args):
    checks = suite_checks(args.suite)
    results = asyncio.run(run_jobs([check for _, check in checks], _threads(args.threads)))
    failed = 0
    print("%-40s %12s %10s  %s" % ("check", "error", "tolerance", "result"))
    for (name, _), r in zip(checks, results):
        if not r.ok:
            failed += 1
            print("%-40s %12s %10s  ERROR %s" % (name, "-", "-", r.error))
            continue
        c = r.value
        failed += not c.passed
        print("%-40s %12.3e %10.1e  %s" % (c.name, c.error, c.tolerance, "pass" if c.passed else "FAIL"))
    print("%d of %d checks passed" % (len(checks) - failed, len(checks)))
    return EXIT_OK if failed == 0 else EXIT_VERIFY


def cmd_info(args):
    from . import __version__

    print("arcwave %s" % __version__)
    print("F1(0) (Helmholtz, Laplace): %.17g" % kernels.LaplaceSplit.F1_at_zero)
    print("split series order: %d, radius |kappa^2 d^2| <= %g" % (kernels.SERIES_ORDER, kernels.SERIES_RADIUS))
    print("Bessel series/asymptotic switch: |z| = %g, %d terms" % (bessel.SERIES_SWITCH, bessel.SERIES_TERMS))
    print("verify suites: %s" % ", ".join(SUITES))
    print("fixture directory: %s" % fixture_dir())
    return EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for info, -vv for debug logs")
    common.add_argument("--threads", type=int, default=0, help="worker threads (0: one per CPU)")
    common.add_argument("--seed", type=int, default=None, help="overrides the config seed")

    parser = argparse.ArgumentParser(prog="arcwave", description="Spectral Galerkin scattering by open arcs")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", parents=[common], help="solve one scattering problem")
    solve.add_argument("--config", required=True, help="experiment config JSON")
    solve.add_argument("--out", default=".", help="output directory")
    solve.set_defaults(func=cmd_solve)

    sweep = sub.add_parser("sweep", parents=[common], help="parameter sweeps and the holomorphy certificate")
    sweep.add_argument("--config", required=True, help="experiment config JSON with a family")
    sweep.add_argument("--out", default=".", help="output directory")
    sweep.add_argument("--index", type=int, action="append", help="parameter index (repeatable)")
    sweep.add_argument("--nodes", type=int, default=None, help="Chebyshev nodes per parameter")
    sweep.add_argument("--epsilon-scan", type=float, nargs="+", default=None, help="epsilon values to scan")
    sweep.set_defaults(func=cmd_sweep)

    verify = sub.add_parser("verify", parents=[common], help="run the oracle checks")
    verify.add_argument("--suite", choices=sorted(SUITES) + ["all"], default="all")
    verify.set_defaults(func=cmd_verify)

    info = sub.add_parser("info", parents=[common], help="print version and kernel metadata")
    info.set_defaults(func=cmd_info)
    return parser


def _configureLogging(verbose):
    level = [logging.WARNING, logging.INFO, logging.DEBUG][min(verbose, 2)]
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    _configureLogging(args.verbose)
    try:
        return args.func(args)
    except (ConfigError, InvalidArgument) as e:
        _log.error("%s", e)
        return EXIT_CONFIG
    except DegenerateGeometry as e:
        if e.pair is not None:
            _log.error("%s (arcs %d and %d)", e, *e.pair)
        else:
            _log.error("%s", e)
        return EXIT_GEOMETRY
    except SolverError as e:
        _log.error("%s", e)
        return EXIT_SOLVER
    except CertificateError as e:
        _log.error("%s", e)
        return EXIT_CERTIFICATE
    except ArcwaveError as e:
        _log.error("%s", e)
        return EXIT_SOLVER
