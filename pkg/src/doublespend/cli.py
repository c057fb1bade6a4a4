"""Command-line interface.

Every analytic and simulation capability is exposed as a subcommand. All
outputs echo the resolved parameters for auditability, identical
invocations produce byte-identical output (simulation included, via the
seed), and JSON output round-trips through a strict parser.

Exit codes: 0 success, 2 invalid input or configuration, 3 a series or
integration failed to converge within its certified bounds.
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path
from typing import IO, Sequence

from .economics import EconomicModel, expected_profit, required_value
from .errors import ConvergenceError, DoubleSpendError
from .reporting import build_resource_table, case_study, gamma_from_market, \
    load_network_config, premine_comparison, render_record, render_rows, \
    render_table
from .simulate import estimate, estimate_profit
from .timing import attack_success_prob, expected_success_time, sampling_grid
from .walk import INFINITE, AttackSpec

_DEFAULT_BLOCK_TIME = 600.0
_DEFAULT_TOL = 1e-12
_DEFAULT_TRIALS = 100_000
_DEFAULT_SEED = 0


def _cut_value(text: str) -> object:
    """Parse --cut-time: positive seconds, or 'inf' for an unbounded cut."""
    if text.strip().lower() in ("inf", "infinite", "infinity"):
        return INFINITE
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected a number of seconds or 'inf', got {text!r}"
        ) from None
    if math.isinf(value):
        return INFINITE
    return value


def _mult_value(text: str) -> float:
    """Parse --cut-mult: positive multiplier, or 'inf' for an unbounded cut."""
    if text.strip().lower() in ("inf", "infinite", "infinity"):
        return math.inf
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected a multiplier or 'inf', got {text!r}"
        ) from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated integers, got {text!r}"
        ) from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated numbers, got {text!r}"
        ) from None


def _add_rate_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--lambda-h", type=float, dest="lambda_h", metavar="RATE",
                       help="honest block rate in blocks/second")
    group.add_argument("--block-time", type=float, dest="block_time",
                       metavar="SECONDS",
                       help="mean honest block interval in seconds "
                            f"(default {_DEFAULT_BLOCK_TIME:g} when neither "
                            "rate flag is given)")


def _add_cut_flags(parser: argparse.ArgumentParser, required: bool) -> None:
    group = parser.add_mutually_exclusive_group(required=required)
    group.add_argument("--cut-time", type=_cut_value, dest="cut_time",
                       metavar="SECONDS|inf",
                       help="give-up deadline in seconds, or 'inf'")
    group.add_argument("--cut-mult", "--c", type=_mult_value, dest="cut_mult",
                       metavar="C|inf",
                       help="deadline as C block intervals per confirmation "
                            "(t_cut = C * nbc / lambda_h)")


def _add_common(parser: argparse.ArgumentParser, *, economics: bool = False) -> None:
    parser.add_argument("--pa", type=float, required=True,
                        help="attacker share of total block-finding power")
    parser.add_argument("--nbc", type=int, required=True,
                        help="confirmations required by the merchant")
    if economics:
        parser.add_argument("--gamma", type=float, required=True,
                            help="operating cost per block interval of "
                                 "attacker-scale hashrate")
        parser.add_argument("--beta", type=float, required=True,
                            help="block reward")
        parser.add_argument("--value", type=float, default=0.0, metavar="C",
                            help="double-spent transaction value (default 0)")
    parser.add_argument("--tol", type=float, default=_DEFAULT_TOL,
                        help=f"series truncation tolerance (default {_DEFAULT_TOL:g})")


def _add_output_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=("text", "csv", "json"),
                        default="text", help="output format (default text)")
    parser.add_argument("--out", type=Path, default=None,
                        help="write output to this file instead of stdout")


def _resolve_lambda_h(args: argparse.Namespace) -> float:
    if getattr(args, "lambda_h", None) is not None:
        return args.lambda_h
    block_time = getattr(args, "block_time", None)
    if block_time is not None:
        if block_time <= 0:
            raise DoubleSpendError(
                f"block time must be positive, got {block_time}"
            )
        return 1.0 / block_time
    return 1.0 / _DEFAULT_BLOCK_TIME


def _resolve_spec(args: argparse.Namespace, *, default_cut: object = None) -> AttackSpec:
    lambda_h = _resolve_lambda_h(args)
    cut_time = getattr(args, "cut_time", None)
    cut_mult = getattr(args, "cut_mult", None)
    if cut_time is not None:
        t_cut = cut_time
    elif cut_mult is not None:
        t_cut = INFINITE if math.isinf(cut_mult) \
            else cut_mult * args.nbc / lambda_h
    elif default_cut is not None:
        t_cut = default_cut
    else:
        raise DoubleSpendError("one of --cut-time / --cut-mult is required")
    return AttackSpec(p_a=args.pa, n_bc=args.nbc, t_cut=t_cut, lambda_h=lambda_h)


def _spec_params(spec: AttackSpec, tol: float | None = None) -> dict[str, object]:
    params: dict[str, object] = {
        "p_a": spec.p_a,
        "n_bc": spec.n_bc,
        "t_cut_seconds": math.inf if spec.infinite_cut else spec.t_cut,
        "lambda_h": spec.lambda_h,
    }
    if tol is not None:
        params["tol"] = tol
    return params


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def _requirement_assessment(c_req: float) -> str:
    if c_req == math.inf:
        return "never profitable"
    if c_req < 0:
        return "always profitable"
    return "profitable above required value"


# ---------------------------------------------------------------------------
# subcommand handlers

def _cmd_prob(args: argparse.Namespace) -> int:
    spec = _resolve_spec(args)
    result = {"p_as": attack_success_prob(spec, args.tol)}
    _emit(render_record(_spec_params(spec, args.tol), result, args.format),
          args.out)
    return 0


def _cmd_pdf(args: argparse.Namespace) -> int:
    spec = _resolve_spec(args, default_cut=INFINITE)
    if args.t_max is not None:
        t_max = args.t_max
    elif not spec.infinite_cut:
        t_max = spec.t_cut
    else:
        t_max = 6.0 * spec.n_bc / spec.lambda_h
    if t_max <= 0:
        raise DoubleSpendError(f"--t-max must be positive, got {t_max}")
    if args.points < 1:
        raise DoubleSpendError(f"--points must be positive, got {args.points}")
    times = [t_max * k / args.points for k in range(1, args.points + 1)]
    rows = [
        {"t_seconds": t, "density": d, "success_prob": p}
        for t, d, p in sampling_grid(spec, times, args.tol)
    ]
    params = _spec_params(spec, args.tol)
    params["t_max"] = t_max
    params["points"] = args.points
    _emit(render_rows(params, rows, ("t_seconds", "density", "success_prob"),
                      args.format), args.out)
    return 0


def _cmd_expect_time(args: argparse.Namespace) -> int:
    spec = _resolve_spec(args)
    result = {
        "e_tas_seconds": expected_success_time(spec, args.tol),
        "p_as": attack_success_prob(spec, args.tol),
    }
    _emit(render_record(_spec_params(spec, args.tol), result, args.format),
          args.out)
    return 0


def _cmd_profit(args: argparse.Namespace) -> int:
    spec = _resolve_spec(args)
    model = EconomicModel(gamma=args.gamma, beta=args.beta, value=args.value)
    params = _spec_params(spec, args.tol)
    params.update(gamma=args.gamma, beta=args.beta, value=args.value,
                  mu=model.mu)
    result = {"e_p": expected_profit(model, spec, args.tol)}
    _emit(render_record(params, result, args.format), args.out)
    return 0


def _cmd_creq(args: argparse.Namespace) -> int:
    spec = _resolve_spec(args)
    model = EconomicModel(gamma=args.gamma, beta=args.beta)
    params = _spec_params(spec, args.tol)
    params.update(gamma=args.gamma, beta=args.beta, mu=model.mu)
    c_req = required_value(model, spec, args.tol)
    result = {"c_req": c_req, "assessment": _requirement_assessment(c_req)}
    _emit(render_record(params, result, args.format), args.out)
    return 0


def _cmd_table(args: argparse.Namespace) -> int:
    table = build_resource_table(args.nbc, args.pa, args.cut_mult, args.tol)
    params = {
        "c": args.cut_mult,
        "n_bc_list": ",".join(str(n) for n in args.nbc),
        "p_a_list": ",".join(repr(p) for p in args.pa),
        "tol": args.tol,
    }
    _emit(render_table(table, args.format, params), args.out)
    return 0


def _cmd_case_study(args: argparse.Namespace) -> int:
    cfg = load_network_config(args.config)
    cut_mult = args.cut_mult
    if args.cut_time is not None:
        if args.cut_time is INFINITE:
            cut_mult = math.inf
        else:
            cut_mult = args.cut_time / (args.nbc * cfg.block_time_seconds)
    report = case_study(cfg, args.pa, args.nbc, cut_mult, args.tol)
    params = {"config": str(args.config), "tol": args.tol}
    _emit(render_record(params, report, args.format), args.out)
    return 0


def _cmd_compare_premine(args: argparse.Namespace) -> int:
    result = premine_comparison(args.pa, args.nbc)
    params = {"p_a": args.pa, "n_bc": args.nbc}
    _emit(render_record(params, result, args.format), args.out)
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    spec = _resolve_spec(args)
    if (args.gamma is None) != (args.beta is None):
        raise DoubleSpendError(
            "--gamma and --beta must be given together for profit estimation"
        )
    trace_handle: IO[str] | None = None
    try:
        if args.trace is not None:
            trace_handle = open(args.trace, "w", encoding="utf-8", newline="")
        if args.gamma is not None:
            model = EconomicModel(gamma=args.gamma, beta=args.beta,
                                  value=args.value)
            summary = estimate_profit(model, spec, args.trials, args.seed,
                                      event_cap=args.event_cap,
                                      trace_to=trace_handle)
        else:
            summary = estimate(spec, args.trials, args.seed,
                               event_cap=args.event_cap,
                               independent_clocks=args.independent_clocks,
                               trace_to=trace_handle)
    finally:
        if trace_handle is not None:
            trace_handle.close()
    params = _spec_params(spec)
    params.update(trials=args.trials, seed=args.seed)
    if args.event_cap is not None:
        params["event_cap"] = args.event_cap
    if args.independent_clocks:
        params["independent_clocks"] = True
    if args.gamma is not None:
        params.update(gamma=args.gamma, beta=args.beta, value=args.value)
    result: dict[str, object] = {
        "trials": summary.trials,
        "successes": summary.successes,
        "p_as_hat": summary.p_as_hat,
        "se_p_as": summary.se_p_as,
        "mean_tas": summary.mean_tas,
        "se_tas": summary.se_tas,
        "var_tas": summary.var_tas,
        "truncated_trials": summary.truncated_trials,
    }
    if summary.mean_profit is not None:
        result["mean_profit"] = summary.mean_profit
    _emit(render_record(params, result, args.format), args.out)
    return 0


def _cmd_market_gamma(args: argparse.Namespace) -> int:
    cfg = load_network_config(args.config)
    params: dict[str, object] = {
        "config": str(args.config),
        "network": cfg.name,
        "block_time_seconds": cfg.block_time_seconds,
    }
    if cfg.rental_price_per_hash is not None:
        params["rental_price_per_hash"] = cfg.rental_price_per_hash
    if cfg.network_hashrate is not None:
        params["network_hashrate"] = cfg.network_hashrate
    result = {"gamma": gamma_from_market(cfg)}
    _emit(render_record(params, result, args.format), args.out)
    return 0


# ---------------------------------------------------------------------------
# parser assembly

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="doublespend",
        description="Success probability, timing, and economics of "
                    "double-spending attacks on proof-of-work blockchains.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prob", help="attack success probability")
    _add_common(p)
    _add_cut_flags(p, required=True)
    _add_rate_flags(p)
    _add_output_flags(p)
    p.set_defaults(handler=_cmd_prob)

    p = sub.add_parser("pdf", help="achieving-time density and success "
                                   "probability on a time grid")
    _add_common(p)
    _add_cut_flags(p, required=False)
    _add_rate_flags(p)
    p.add_argument("--t-max", type=float, default=None,
                   help="largest grid time in seconds (default: the cut-time "
                        "if finite, else 6*nbc block intervals)")
    p.add_argument("--points", type=int, default=50,
                   help="number of grid points (default 50)")
    _add_output_flags(p)
    p.set_defaults(handler=_cmd_pdf)

    p = sub.add_parser("expect-time", help="conditional mean success time")
    _add_common(p)
    _add_cut_flags(p, required=True)
    _add_rate_flags(p)
    _add_output_flags(p)
    p.set_defaults(handler=_cmd_expect_time)

    p = sub.add_parser("profit", help="expected attack profit")
    _add_common(p, economics=True)
    _add_cut_flags(p, required=True)
    _add_rate_flags(p)
    _add_output_flags(p)
    p.set_defaults(handler=_cmd_profit)

    p = sub.add_parser("creq", help="transaction value required for "
                                    "profitability")
    _add_common(p, economics=True)
    _add_cut_flags(p, required=True)
    _add_rate_flags(p)
    _add_output_flags(p)
    p.set_defaults(handler=_cmd_creq)

    p = sub.add_parser("table", help="scaled resource table over a "
                                     "(nbc, pa) grid")
    p.add_argument("--nbc", type=_int_list, required=True,
                   help="comma-separated confirmation depths")
    p.add_argument("--pa", type=_float_list, required=True,
                   help="comma-separated attacker shares")
    p.add_argument("--cut-mult", "--c", type=float, required=True,
                   dest="cut_mult", metavar="C",
                   help="deadline as C block intervals per confirmation")
    p.add_argument("--tol", type=float, default=_DEFAULT_TOL,
                   help=f"series truncation tolerance (default {_DEFAULT_TOL:g})")
    _add_output_flags(p)
    p.set_defaults(handler=_cmd_table)

    p = sub.add_parser("case-study", help="full attack economics for a "
                                          "configured network")
    p.add_argument("--config", type=Path, required=True,
                   help="network config file (key = value lines)")
    _add_common(p)
    _add_cut_flags(p, required=True)
    _add_output_flags(p)
    p.set_defaults(handler=_cmd_case_study)

    p = sub.add_parser("compare-premine",
                       help="attack success probability versus a pre-built "
                            "secret lead")
    p.add_argument("--pa", type=float, required=True,
                   help="attacker share of total block-finding power")
    p.add_argument("--nbc", type=int, required=True,
                   help="confirmations required by the merchant")
    _add_output_flags(p)
    p.set_defaults(handler=_cmd_compare_premine)

    p = sub.add_parser("simulate", help="Monte Carlo estimate of success "
                                        "probability and timing")
    _add_common(p)
    _add_cut_flags(p, required=True)
    _add_rate_flags(p)
    p.add_argument("--trials", type=int, default=_DEFAULT_TRIALS,
                   help=f"number of trials (default {_DEFAULT_TRIALS})")
    p.add_argument("--seed", type=int, default=_DEFAULT_SEED,
                   help=f"master seed (default {_DEFAULT_SEED})")
    p.add_argument("--event-cap", type=int, default=None, dest="event_cap",
                   help="per-trial arrival cap; required for an unbounded "
                        "cut with pa < 0.5")
    p.add_argument("--independent-clocks", action="store_true",
                   help="simulate two racing exponential clocks instead of "
                        "the merged process (self-check variant)")
    p.add_argument("--gamma", type=float, default=None,
                   help="with --beta: also estimate mean profit per attempt")
    p.add_argument("--beta", type=float, default=None,
                   help="with --gamma: also estimate mean profit per attempt")
    p.add_argument("--value", type=float, default=0.0, metavar="C",
                   help="double-spent transaction value (default 0)")
    p.add_argument("--trace", type=Path, default=None,
                   help="write one CSV row per trial to this file")
    _add_output_flags(p)
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser("market-gamma", help="per-block operating cost implied "
                                            "by hashrate rental figures")
    p.add_argument("--config", type=Path, required=True,
                   help="network config file (key = value lines)")
    _add_output_flags(p)
    p.set_defaults(handler=_cmd_market_gamma)

    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.handler(args)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (DoubleSpendError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
