#!/usr/bin/env python3
"""CLI for Drinfeld modules and modular forms over F_q[theta].

Examples:
    drinfeld_cli.py carlitz --p 3 --prec 120           # pi~ and exp_C(pi~)
    drinfeld_cli.py verify exp                         # functional equations
    drinfeld_cli.py verify legendre --out legendre.json
    drinfeld_cli.py verify automorphy --threads 4 -v
    drinfeld_cli.py eisenstein --u 1/θ,0 --N θ --point sqrt_theta
    drinfeld_cli.py eisenstein --u 1/θ,0 --N θ --point "θ^(1/4) + 1"
    drinfeld_cli.py predict --ranks 2,3
    drinfeld_cli.py relation cm_ratio --d 6 --h 8

Exit status: 0 all checks pass, 1 a check failed, 2 bad configuration,
3 an enumeration or linear-system budget was exceeded.
"""

import argparse
import json
import logging
import os
import sys

# Allow running from repo root or scripts/ directory
SCRIPT_DIR = os.path.dirname(os.path.abspath(__file__))
REPO_ROOT = os.path.dirname(SCRIPT_DIR)
sys.path.insert(0, REPO_ROOT)

from drinfeld.config import build_config, load_config_file, resolve_config_path
from drinfeld.eisenstein import EisensteinSpec, eisenstein_eval
from drinfeld.errors import BudgetExceeded, ConfigError, DrinfeldError, FieldUnsupported
from drinfeld.lattice import omega_r_check
from drinfeld.relations import trdeg_predict
from drinfeld.report import format_valuation, report_to_json, write_report
from drinfeld.samples import parse_point
from drinfeld.suites import NAMED_VALUES, SUITE_NAMES, carlitz_report, relation_search, run_suite

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_BUDGET = 3

_logger = logging.getLogger("drinfeld_cli")

# flag dest -> RunConfig field
CONFIG_FLAGS = ("p", "e", "s", "m", "prec", "t_order", "deg_budget", "kmax", "seed", "out",
                "threads", "threshold", "detector_d", "detector_h")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _setup_logging(getattr(args, "verbose", 0))

    try:
        cfg = _load_config(args)
        if args.command == "carlitz":
            return cmd_carlitz(args, cfg)
        if args.command == "verify":
            return cmd_verify(args, cfg)
        if args.command == "eisenstein":
            return cmd_eisenstein(args, cfg)
        if args.command == "predict":
            return cmd_predict(args, cfg)
        if args.command == "relation":
            return cmd_relation(args, cfg)
    except BudgetExceeded as e:
        return _fail(EXIT_BUDGET, f"budget exceeded: {e}")
    except (ConfigError, FieldUnsupported) as e:
        return _fail(EXIT_CONFIG, str(e))
    except DrinfeldError as e:
        # NotAPeriod and NotInOmega also subclass ValueError
        return _fail(EXIT_CHECK_FAILED, f"{e.__class__.__name__}: {e}")
    except ValueError as e:
        return _fail(EXIT_CONFIG, str(e))
    parser.print_help()
    return EXIT_CONFIG


def cmd_carlitz(args, cfg) -> int:
    """Print pi~ and the residual of exp_C at pi~."""
    report = carlitz_report(cfg)
    check = report.checks[0]
    print(f"pi~        {check.detail['pi']}")
    print(f"log_q|pi~| {check.detail['abs_exponent']}")
    print(f"val exp_C(pi~) >= {format_valuation(check.residual)}  "
          f"(threshold {cfg.threshold * cfg.prec:g}): {'pass' if check.passed else 'FAIL'}")
    _emit(report, cfg.out, quiet=True)
    return EXIT_OK if report.ok else EXIT_CHECK_FAILED


def cmd_verify(args, cfg) -> int:
    """Run one suite and write its JSON report (stdout without --out)."""
    report = run_suite(args.suite, cfg)
    _emit(report, cfg.out)
    print(f"{args.suite}: {report.passed} passed, {report.failed} failed", file=sys.stderr)
    for c in report.checks:
        if not c.passed:
            print(f"  FAIL {c.check} sample {c.sample}: residual {format_valuation(c.residual)}",
                  file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_CHECK_FAILED


def cmd_eisenstein(args, cfg) -> int:
    """Evaluate E_{u,N} at one point with its tail-bound data."""
    ctx = cfg.context()
    spec = EisensteinSpec.from_text(ctx, args.u, args.N)
    omega = parse_point(ctx, args.point, cfg.prec)
    cert = omega_r_check(omega, min(cfg.deg_budget, 4), cfg.enum_budget)
    result = eisenstein_eval(spec, omega, cfg.prec, cfg.deg_budget, method=args.method,
                             degree=args.degree, budget=cfg.enum_budget)
    out = {
        "u": spec.describe(),
        "point": omega.to_json(),
        "omega_test": cert.to_json(),
        "prec": cfg.prec,
        "eisenstein": result.to_json(),
    }
    _emit(out, cfg.out)
    return EXIT_OK


def cmd_predict(args, cfg) -> int:
    try:
        ranks = [int(r) for r in args.ranks.split(",") if r.strip()]
    except ValueError:
        _die(f"--ranks expects comma-separated integers, got {args.ranks!r}")
    prediction = trdeg_predict(ranks, not args.not_disjoint, not args.not_galois, args.endo_degree)
    print(json.dumps(prediction.to_json(), indent=2, sort_keys=True))
    return EXIT_OK


def cmd_relation(args, cfg) -> int:
    """Search for a polynomial relation satisfied by a named quantity."""
    value, cert = relation_search(args.name, cfg, args.d, args.h, args.v_t)
    out = {
        "quantity": args.name,
        "valuation": format_valuation(value.valuation),
        "found": cert is not None,
    }
    if cert is not None:
        out["certificate"] = cert.to_json()
        out["relation"] = cert.describe()
    _emit(out, cfg.out)
    return EXIT_OK if cert is not None else EXIT_CHECK_FAILED


# ==================== Parser ====================


def _add_config_flags(p: argparse.ArgumentParser):
    g = p.add_argument_group("field and precision (override the config file)")
    g.add_argument("--p", type=int, default=None, help="characteristic (default: 3)")
    g.add_argument("--e", type=int, default=None, help="q = p^e (default: 1)")
    g.add_argument("--s", type=int, default=None, help="residue field F_{q^s} (default: 2)")
    g.add_argument("--m", type=int, default=None, help="ramification, T = theta^(-1/m) (default: 4)")
    g.add_argument("--prec", type=int, default=None, help="absolute precision in theta-units (default: 80)")
    g.add_argument("--t-order", type=int, default=None, dest="t_order",
                   help="t-adic order for Omega(t) (default: 12)")
    g.add_argument("--deg-budget", type=int, default=None, dest="deg_budget",
                   help="max enumeration degree D for lattice sums (default: 5)")
    g.add_argument("--kmax", type=int, default=None, help="terms of exp/log series (default: 24)")
    g.add_argument("--seed", type=int, default=None, help="random seed (default: 0)")
    g.add_argument("--threshold", type=float, default=None,
                   help="pass iff residual >= threshold * prec (default: 0.6)")
    g.add_argument("--detector-d", type=int, default=None, dest="detector_d",
                   help="relation detector degree bound (default: 6)")
    g.add_argument("--detector-h", type=int, default=None, dest="detector_h",
                   help="relation detector height bound (default: 8)")
    g.add_argument("--threads", type=int, default=None, help="worker threads (default: 1)")
    g.add_argument("--out", default=None, help="write the JSON report here instead of stdout")
    g.add_argument(
        "--config", "-c",
        default=None,
        metavar="PATH",
        help="Path to a key = value config file. "
             "If omitted, uses ~/.drinfeld-desk/config.txt if present.",
    )
    g.add_argument("-v", "--verbose", action="count", default=0,
                   help="-v for INFO, -vv for DEBUG logging on stderr")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Exact computations with Drinfeld modules and Drinfeld modular forms",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=__doc__,
    )
    subparsers = parser.add_subparsers(dest="command")

    carlitz_p = subparsers.add_parser("carlitz", help="Carlitz period and exp_C(pi~)")
    _add_config_flags(carlitz_p)

    verify_p = subparsers.add_parser("verify", help="Run a verification suite")
    verify_p.add_argument("suite", choices=SUITE_NAMES)
    _add_config_flags(verify_p)

    eis_p = subparsers.add_parser("eisenstein", help="Evaluate an Eisenstein series at a point")
    eis_p.add_argument("--u", required=True, help='u as comma-separated fractions, e.g. "1/θ,0"')
    eis_p.add_argument("--N", required=True, help="monic level, e.g. θ")
    eis_p.add_argument("--point", required=True,
                       help='sqrt_theta, kummer:R, quadratic:A,B or coordinates "w_1; ...; w_(r-1)"')
    eis_p.add_argument("--method", choices=["layers", "direct"], default="layers",
                       help="tail-bounded layers (default) or direct enumeration")
    eis_p.add_argument("--degree", type=int, default=None,
                       help="enumeration degree for --method direct (default: 1)")
    _add_config_flags(eis_p)

    predict_p = subparsers.add_parser("predict", help="Predicted transcendence degree")
    predict_p.add_argument("--ranks", required=True, help="comma-separated ranks, e.g. 2,3")
    predict_p.add_argument("--endo-degree", type=int, default=None, dest="endo_degree",
                           help="endomorphism degree s for a single module")
    predict_p.add_argument("--not-disjoint", action="store_true",
                           help="CM fields are not pairwise disjoint")
    predict_p.add_argument("--not-galois", action="store_true",
                           help="CM fields are not Galois")
    _add_config_flags(predict_p)

    rel_p = subparsers.add_parser("relation", help="Run the algebraicity detector on a named quantity")
    rel_p.add_argument("name", choices=NAMED_VALUES)
    rel_p.add_argument("--d", type=int, default=None, help="degree bound (default: detector_d)")
    rel_p.add_argument("--h", type=int, default=None, help="height bound (default: detector_h)")
    rel_p.add_argument("--v-t", default=None, dest="v_t",
                       help="certified precision in theta-units (default: prec/2)")
    _add_config_flags(rel_p)

    return parser


# ==================== Helpers ====================


def _setup_logging(verbosity: int):
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity and verbosity > 1:
        level = logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def _load_config(args):
    path = resolve_config_path(getattr(args, "config", None))
    file_values = load_config_file(path)
    flags = {name: getattr(args, name, None) for name in CONFIG_FLAGS}
    cfg = build_config(file_values, flags)
    _logger.info("config: %s", path or "defaults")
    return cfg


def _emit(report, out: str | None, quiet: bool = False):
    if out:
        write_report(report, out)
        _logger.info("report written to %s", out)
    elif not quiet:
        print(report_to_json(report))


def _fail(code: int, msg: str) -> int:
    print(f"Error: {msg}", file=sys.stderr)
    return code


def _die(msg: str):
    print(f"Error: {msg}", file=sys.stderr)
    sys.exit(EXIT_CONFIG)


if __name__ == "__main__":
    sys.exit(main())
