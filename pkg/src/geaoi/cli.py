"""Command-line interface: ``geaoi {age,simulate,optimize,sweep,validate}``.

Every flag can also come from a JSON file passed with ``--config``; flags on
the command line override file values.  Exit codes: 0 success, 1 internal
error or failed validation check, 2 invalid input, 3 infeasible budget.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Any

from . import analytic, optimize, validation
from .analytic import GEArrivalScenario, GEServiceScenario
from .chain import CostModel, State, TransitionMatrix, stationary_distribution
from .errors import InfeasibleBudgetError, ValidationError
from .simulate import SimConfig, simulate_area_paper_partition, simulate_cycles

SCENARIOS = ("ge-service", "ge-arrival", "single")
SCENARIO_FLAGS = {
    "ge-service": ("lam", "mu_b", "mu_g"),
    "ge-arrival": ("mu", "lam_b", "lam_g"),
    "single": ("lam", "mu"),
}
RATE_FLAGS = ("lam", "mu", "mu_b", "mu_g", "lam_b", "lam_g")

# dest -> (flag, type, default, help)
OPTIONS: dict[str, tuple[str, Any, Any, str]] = {
    "scenario": ("--scenario", str, None, "ge-service, ge-arrival or single"),
    "lam": ("--lambda", float, None, "arrival rate"),
    "mu": ("--mu", float, None, "service rate"),
    "mu_b": ("--mu-b", float, None, "service rate in the bad state"),
    "mu_g": ("--mu-g", float, None, "service rate in the good state"),
    "lam_b": ("--lambda-b", float, None, "arrival rate in the bad state"),
    "lam_g": ("--lambda-g", float, None, "arrival rate in the good state"),
    "p": ("--p", float, None, "bad -> good transition probability"),
    "q": ("--q", float, None, "good -> bad transition probability"),
    "cycles": ("--cycles", int, 10**6, "update cycles per replication"),
    "seed": ("--seed", int, 0, "random seed"),
    "replications": ("--replications", int, 8, "independent replications"),
    "workers": ("--workers", int, 1, "threads used for replications"),
    "initial_state": ("--initial-state", str, "stationary", "stationary, bad or good"),
    "estimator": ("--estimator", str, "sawtooth", "sawtooth or trapezoid"),
    "c_b": ("--c-b", float, None, "cost per unit time in the bad state"),
    "c_g": ("--c-g", float, None, "cost per unit time in the good state"),
    "budget": ("--budget", float, None, "average cost budget"),
    "epsilon": ("--epsilon", float, optimize.DEFAULT_EPSILON, "distance kept from open boundaries"),
    "vary": ("--vary", str, None, "swept probability: p or q"),
    "range": ("--range", str, None, "start:stop:step, stop inclusive"),
    "fix": ("--fix", str, None, "other probability, e.g. q=0.1,0.5,0.9"),
    "with_sim": ("--with-sim", bool, False, "add Monte Carlo columns"),
    "quick": ("--quick", bool, False, "analytic checks only"),
    "format": ("--format", str, None, "json or csv"),
    "out": ("--out", str, None, "output path (default stdout)"),
}
CHOICES = {
    "scenario": SCENARIOS,
    "initial_state": ("stationary", "bad", "good"),
    "estimator": ("sawtooth", "trapezoid"),
    "vary": ("p", "q"),
    "format": ("json", "csv"),
}
SCENARIO_OPTS = ["scenario", *RATE_FLAGS]
SIM_OPTS = ["cycles", "seed", "replications", "workers"]
COMMANDS = {
    "age": [*SCENARIO_OPTS, "p", "q", "format", "out"],
    "simulate": [*SCENARIO_OPTS, "p", "q", *SIM_OPTS, "initial_state", "estimator", "format", "out"],
    "optimize": [*SCENARIO_OPTS, "c_b", "c_g", "budget", "epsilon", "format", "out"],
    "sweep": [*SCENARIO_OPTS, "vary", "range", "fix", "with_sim", *SIM_OPTS, "format", "out"],
    "validate": ["quick", *SIM_OPTS, "format", "out"],
}
DEFAULT_FORMAT = {"sweep": "csv"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="geaoi", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, dests in COMMANDS.items():
        sp = sub.add_parser(name)
        sp.add_argument("--config", default=argparse.SUPPRESS, help="JSON file with flag values")
        for dest in dests:
            flag, typ, _, help_ = OPTIONS[dest]
            kw: dict[str, Any] = {"dest": dest, "default": argparse.SUPPRESS, "help": help_}
            if typ is bool:
                kw["action"] = "store_true"
            else:
                kw["type"] = typ
                if dest in CHOICES:
                    kw["choices"] = CHOICES[dest]
            sp.add_argument(flag, **kw)
    return parser


def _coerce_config(command: str, raw: dict) -> dict:
    allowed = set(COMMANDS[command])
    by_flag = {OPTIONS[d][0].lstrip("-"): d for d in allowed}
    out = {}
    for key, value in raw.items():
        dest = key if key in allowed else by_flag.get(key)
        if dest is None:
            raise ValidationError(f"unknown config key {key!r} for {command}")
        typ = OPTIONS[dest][1]
        if typ is bool:
            if not isinstance(value, bool):
                raise ValidationError(f"config key {key!r} must be true or false")
        elif typ is int:
            if isinstance(value, bool) or not isinstance(value, (int, float)) or value != int(value):
                raise ValidationError(f"config key {key!r} must be an integer")
            value = int(value)
        elif typ is float:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ValidationError(f"config key {key!r} must be a number")
            value = float(value)
        elif not isinstance(value, str):
            raise ValidationError(f"config key {key!r} must be a string")
        if dest in CHOICES and value not in CHOICES[dest]:
            raise ValidationError(f"config key {key!r} must be one of {CHOICES[dest]}")
        out[dest] = value
    return out


def resolve_options(argv: list[str]) -> dict:
    ns = vars(build_parser().parse_args(argv))
    command = ns.pop("command")
    opts = {d: OPTIONS[d][2] for d in COMMANDS[command]}
    if "format" in opts:
        opts["format"] = DEFAULT_FORMAT.get(command, "json")
    config_path = ns.pop("config", None)
    if config_path is not None:
        try:
            with open(config_path, encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read config {config_path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ValidationError("config file must hold a JSON object")
        opts.update(_coerce_config(command, raw))
    opts.update(ns)
    opts["command"] = command
    return opts


def build_scenario(opts: dict):
    kind = opts.get("scenario")
    if kind is None:
        raise ValidationError("--scenario is required")
    needed = SCENARIO_FLAGS[kind]
    for dest in RATE_FLAGS:
        flag = OPTIONS[dest][0]
        if dest in needed and opts.get(dest) is None:
            raise ValidationError(f"scenario {kind} requires {flag}")
        if dest not in needed and opts.get(dest) is not None:
            raise ValidationError(f"{flag} does not apply to scenario {kind}")
    if kind == "ge-service":
        return GEServiceScenario(opts["lam"], opts["mu_b"], opts["mu_g"])
    if kind == "ge-arrival":
        return GEArrivalScenario(opts["mu"], opts["lam_b"], opts["lam_g"])
    return None


def _matrix(opts: dict) -> TransitionMatrix:
    if opts.get("p") is None or opts.get("q") is None:
        raise ValidationError("--p and --q are required")
    return TransitionMatrix(opts["p"], opts["q"])


def _require_modulated(scenario, command: str):
    if scenario is None:
        raise ValidationError(f"scenario single is not supported by {command}")
    return scenario


def _check_sim_controls(opts: dict) -> None:
    if opts["cycles"] < 1:
        raise ValidationError(f"--cycles must be positive, got {opts['cycles']}")
    if opts["replications"] < 1:
        raise ValidationError(f"--replications must be positive, got {opts['replications']}")
    if opts["workers"] < 1:
        raise ValidationError(f"--workers must be positive, got {opts['workers']}")


def parse_range(text: str) -> list[float]:
    """``start:stop:step`` with stop included when within half a step."""
    try:
        start, stop, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise ValidationError(f"--range must be start:stop:step, got {text!r}") from None
    if step <= 0 or stop < start:
        raise ValidationError(f"--range needs step > 0 and stop >= start, got {text!r}")
    count = int((stop - start) / step + 0.5) + 1
    return [round(start + k * step, 12) for k in range(count)]


def parse_fix(text: str, vary: str) -> list[float]:
    other = "q" if vary == "p" else "p"
    name, sep, values = text.partition("=")
    if not sep or name.strip() != other:
        raise ValidationError(f"--fix must look like {other}=v1,v2,...; got {text!r}")
    try:
        out = [float(v) for v in values.split(",") if v.strip()]
    except ValueError:
        raise ValidationError(f"--fix values must be numbers, got {values!r}") from None
    if not out:
        raise ValidationError("--fix needs at least one value")
    return out


def _fmt_g10(x: float) -> str:
    return f"{x:.10g}"


def _render(rows: list[dict], fmt: str, single: bool, number=repr) -> str:
    if fmt == "json":
        return json.dumps(rows[0] if single else rows) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(rows[0]))
    for row in rows:
        writer.writerow(["" if v is None else number(v) if isinstance(v, float) else v for v in row.values()])
    return buf.getvalue()


def cmd_age(opts: dict) -> tuple[str, int]:
    scenario = build_scenario(opts)
    if scenario is None:
        for k in ("p", "q"):
            if opts.get(k) is not None:
                raise ValidationError(f"--{k} does not apply to scenario single")
        row = {
            "scenario": "single",
            "lambda": opts["lam"],
            "mu": opts["mu"],
            "delta": analytic.age_single_state(opts["lam"], opts["mu"]),
        }
    else:
        P = _matrix(opts)
        pi = stationary_distribution(P)
        br = analytic.age(scenario, P)
        row = {
            "scenario": scenario.kind,
            "p": P.p,
            "q": P.q,
            "pi_b": pi.pi_b,
            "pi_g": pi.pi_g,
            "EQ_b": br.eq_b,
            "EQ_g": br.eq_g,
            "EY_b": br.ey_b,
            "EY_g": br.ey_g,
            "delta": br.delta,
        }
    return _render([row], opts["format"], single=True), 0


def cmd_simulate(opts: dict) -> tuple[str, int]:
    scenario = _require_modulated(build_scenario(opts), "simulate")
    P = _matrix(opts)
    _check_sim_controls(opts)
    init = {"stationary": None, "bad": State.BAD, "good": State.GOOD}[opts["initial_state"]]
    cfg = SimConfig(scenario, P, opts["cycles"], opts["seed"], opts["replications"], init)
    if opts["estimator"] == "sawtooth":
        res = simulate_cycles(cfg, workers=opts["workers"])
    else:
        res = simulate_area_paper_partition(cfg, workers=opts["workers"])
    row = {
        "scenario": scenario.kind,
        "p": P.p,
        "q": P.q,
        "estimator": opts["estimator"],
        "delta_hat": res.delta_hat,
        "std_error": res.std_error,
        "delta_analytic": analytic.age(scenario, P).delta,
        "cycles": opts["cycles"],
        "cycles_total": res.cycles_total,
        "sim_time_total": res.sim_time_total,
        "bad_fraction": res.bad_fraction,
        "seed": opts["seed"],
        "replications": opts["replications"],
    }
    return _render([row], opts["format"], single=True), 0


def _optim_row(kind: str, res: optimize.OptimResult | None, feas, alpha) -> dict:
    return {
        "scenario": kind,
        "feasibility": feas.value,
        "alpha": alpha,
        "p_star": res.p_star if res else None,
        "q_star": res.q_star if res else None,
        "delta_star": res.delta_star if res else None,
        "attained": res.attained if res else None,
        "constant_along_line": res.constant_along_line if res else None,
        "tie": res.tie if res else None,
    }


def cmd_optimize(opts: dict) -> tuple[str, int]:
    scenario = _require_modulated(build_scenario(opts), "optimize")
    cost = [opts.get(k) for k in ("c_b", "c_g", "budget")]
    if all(v is None for v in cost):
        res = optimize.optimal_unconstrained(scenario, opts["epsilon"])
        return _render([_optim_row(scenario.kind, res, res.feasibility, None)], opts["format"], True), 0
    if any(v is None for v in cost):
        raise ValidationError("a cost model needs all of --c-b, --c-g and --budget")
    cm = CostModel(*cost)
    feas, alpha = optimize.classify(cm)
    try:
        res = optimize.optimal_constrained(scenario, cm, opts["epsilon"])
    except InfeasibleBudgetError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return _render([_optim_row(scenario.kind, None, feas, alpha)], opts["format"], True), 3
    return _render([_optim_row(scenario.kind, res, feas, alpha)], opts["format"], True), 0


def cmd_sweep(opts: dict) -> tuple[str, int]:
    scenario = _require_modulated(build_scenario(opts), "sweep")
    for k in ("p", "q"):
        if opts.get(k) is not None:
            raise ValidationError(f"--{k} does not apply to sweep; use --vary/--fix")
    if opts.get("vary") is None or opts.get("range") is None or opts.get("fix") is None:
        raise ValidationError("sweep requires --vary, --range and --fix")
    if opts["with_sim"]:
        _check_sim_controls(opts)
    varied = parse_range(opts["range"])
    fixed = parse_fix(opts["fix"], opts["vary"])
    rows = []
    for f in fixed:
        for v in varied:
            p, q = (v, f) if opts["vary"] == "p" else (f, v)
            P = TransitionMatrix(p, q)
            row = {
                "scenario": scenario.kind,
                "p": p,
                "q": q,
                "delta_analytic": analytic.age(scenario, P).delta,
                "delta_sim": None,
                "sim_stderr": None,
            }
            if opts["with_sim"]:
                cfg = SimConfig(scenario, P, opts["cycles"], opts["seed"], opts["replications"])
                res = simulate_cycles(cfg, workers=opts["workers"])
                row["delta_sim"], row["sim_stderr"] = res.delta_hat, res.std_error
            rows.append(row)
    return _render(rows, opts["format"], single=False, number=_fmt_g10), 0


def cmd_validate(opts: dict) -> tuple[str, int]:
    if not opts["quick"]:
        _check_sim_controls(opts)
    checks = validation.run_checks(
        opts["quick"], opts["cycles"], opts["replications"], opts["seed"], opts["workers"]
    )
    passed = all(c.passed for c in checks)
    if opts["format"] == "csv":
        rows = [{"check": c.name, "passed": c.passed, "detail": c.detail} for c in checks]
        text = _render(rows, "csv", single=False)
    else:
        report = {
            "passed": passed,
            "quick": opts["quick"],
            "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks],
        }
        text = json.dumps(report) + "\n"
    return text, 0 if passed else 1


HANDLERS = {
    "age": cmd_age,
    "simulate": cmd_simulate,
    "optimize": cmd_optimize,
    "sweep": cmd_sweep,
    "validate": cmd_validate,
}


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        opts = resolve_options(argv)
        text, code = HANDLERS[opts["command"]](opts)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code or 0)
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {exc!r}", file=sys.stderr)
        return 1
    if opts.get("out"):
        with open(opts["out"], "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
