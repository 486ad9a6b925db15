"""Command-line interface.

Exit codes: 0 ok, 1 check failure, 2 parse error, 3 validation error,
4 computation error.
"""

import argparse
import sys

from .chain import validate
from .chainfile import parse_chain_text
from .checks import exact_checks, format_table, simulation_checks
from .errors import ChainError, ChainFileError, InvalidInput
from .qsd import DEFAULT_MAX_ITER, DEFAULT_TOL, compute_qsd
from .report import build_report, emit_json, emit_text
from .resurrection import resurrect
from .canonical import build_pi
from .simulate import RngConfig, reconstruct_stationary

EXIT_OK = 0
EXIT_CHECK = 1
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_COMPUTATION = 4


class _Exit(Exception):
    def __init__(self, code):
        self.code = code


def _err(msg):
    print(f"qsdentropy: {msg}", file=sys.stderr)


def _load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        _err(f"cannot read {path}: {exc}")
        raise _Exit(EXIT_PARSE) from None
    try:
        raw = parse_chain_text(text)
    except ChainFileError as exc:
        _err(f"parse error in {path}: {exc}")
        raise _Exit(EXIT_PARSE) from None
    try:
        return validate(raw)
    except InvalidInput as exc:
        for e in exc.errors:
            _err(f"invalid chain {path}: {type(e).__name__}: {e}")
        raise _Exit(EXIT_VALIDATION) from None
    except ChainError as exc:
        _err(f"invalid chain {path}: {type(exc).__name__}: {exc}")
        raise _Exit(EXIT_VALIDATION) from None


def cmd_validate(args):
    chain = _load(args.chain)
    print(f"ok: {chain.n_transient} transient, {chain.n_absorbing} absorbing")
    return EXIT_OK


def cmd_report(args):
    chain = _load(args.chain)
    doc = build_report(chain, base=args.log_base, tol=args.tol, max_iter=args.max_iter)
    sys.stdout.write(emit_json(doc) if args.format == "json" else emit_text(doc))
    return EXIT_OK if doc.passed() else EXIT_CHECK


def cmd_simulate(args):
    chain = _load(args.chain)
    if args.emit == "trace":
        qsd = compute_qsd(chain)
        trace = reconstruct_stationary(resurrect(chain, qsd), chain, qsd, build_pi(chain, qsd),
                                       args.steps, RngConfig(args.seed))
        for line in trace.dump_lines():
            print(line)
    else:
        sys.stdout.write(format_table(simulation_checks(chain, args.steps, args.seed)))
    return EXIT_OK


def cmd_check(args):
    chain = _load(args.chain)
    checks = exact_checks(chain)
    if args.profile == "full":
        checks += simulation_checks(chain, args.steps, args.seed)
    sys.stdout.write(format_table(checks))
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return EXIT_CHECK if failed else EXIT_OK


def _positive_int(text):
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def build_parser():
    p = argparse.ArgumentParser(prog="qsdentropy", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", help="check a chain file")
    s.add_argument("chain")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("report", help="exact QSD, stationary laws and entropies")
    s.add_argument("chain")
    s.add_argument("--log-base", choices=("e", "2"), default="e")
    s.add_argument("--format", choices=("text", "json"), default="text")
    s.add_argument("--tol", type=float, default=DEFAULT_TOL)
    s.add_argument("--max-iter", type=_positive_int, default=DEFAULT_MAX_ITER)
    s.set_defaults(func=cmd_report)

    s = sub.add_parser("simulate", help="reconstruct the stationary chain by simulation")
    s.add_argument("chain")
    s.add_argument("--steps", type=_positive_int, default=10**6)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--emit", choices=("stats", "trace"), default="stats")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("check", help="run exact and (full profile) Monte Carlo checks")
    s.add_argument("chain")
    s.add_argument("--profile", choices=("fast", "full"), default="fast")
    s.add_argument("--steps", type=_positive_int, default=10**6)
    s.add_argument("--seed", type=int)
    s.set_defaults(func=cmd_check)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "check" and args.profile == "full" and args.seed is None:
        parser.error("--seed is required with --profile full")
    try:
        return args.func(args)
    except _Exit as exc:
        return exc.code
    except (ArithmeticError, RuntimeError, ValueError) as exc:
        _err(f"computation failed: {type(exc).__name__}: {exc}")
        return EXIT_COMPUTATION


if __name__ == "__main__":
    sys.exit(main())
