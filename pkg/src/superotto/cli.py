"""Deterministic command-line front end.

Five subcommands: ``stroke`` (time series of protocol and work-statistics
columns), ``sweep-tau`` (stroke-integrated excess work vs duration with a
power-law fit), ``cycle`` (four-stroke engine report), ``cutoff``
(confinement cut-off time), and ``oracle-check`` (Gaussian vs Fock
cross-validation table).

Time series and sweeps are CSV with a ``#``-prefixed metadata header; reports
are JSON.  All output is byte-deterministic for a fixed resolved config: no
wall-clock stamps, sorted JSON keys, and 17-significant-digit floats in CSV.
Exit codes: 0 success, 1 invalid input, 2 numerical failure, 3 oracle-check
discrepancy above tolerance.

The physical setup is fixed to natural units (hbar = m = omega0 = 1); flags
select the stroke shape (--gamma or --omega-f), duration, temperatures, and
sampling.  A flat JSON config file may supply any flag value; explicit flags
win over the file, the file wins over defaults.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .cycle import CycleSpec, run_superadiabatic_cycle
from .errors import PropagationError, TruncationError
from .errors import NumericalConsistencyError, ParameterError
from .fock_oracle import FockConfig, discrepancy_table, geometric_basis
from .protocol import OscillatorParams, StrokeSpec, cutoff_time, trajectory_point
from .workstats import _require_confined, sweep_avg_delta_w, work_record

__all__ = ["main"]

_FORMAT_VERSION = 1
_ORACLE_TOL = 1e-4
_MAX_FOCK_DIM = 1600

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NUMERICAL = 2
EXIT_ACCEPTANCE = 3

# Per-command defaults; None for gamma/omega_f means "gamma 4 unless the
# other member of the pair is given".  Keys double as the config-file
# vocabulary.
_DEFAULTS: dict[str, dict] = {
    "stroke": {"gamma": None, "omega_f": None, "tau": 10.0, "beta": 1.0,
               "samples": 101, "format": "csv", "out": None},
    "sweep-tau": {"gamma": None, "omega_f": None, "tau_min": None,
                  "tau_max": None, "tau_points": 16, "beta": 1.0,
                  "format": "csv", "out": None},
    "cycle": {"gamma": None, "omega_f": None, "tau": 10.0, "beta": 1.0,
              "beta_cold": 20.0, "out": None},
    "cutoff": {"gamma": None, "omega_f": None, "out": None},
    "oracle-check": {"gamma": None, "omega_f": None, "tau": 10.0, "beta": 1.0,
                     "fock_dim": None, "samples": 5, "out": None},
}

_INT_KEYS = {"samples", "tau_points", "fock_dim"}
_STR_KEYS = {"format", "out"}
_KNOWN_KEYS = set().union(*(d.keys() for d in _DEFAULTS.values()))


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad flags; remap to 1 (invalid input)
    so 2 stays reserved for numerical failures."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="superotto",
                     description="Frictionless quantum Otto engine toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", metavar="PATH",
                       help="flat JSON file with flag values (flags win)")
        p.add_argument("--out", metavar="PATH", help="output file (default stdout)")
        p.add_argument("--gamma", type=float,
                       help="expansion factor sqrt(omega0/omega_f)")
        p.add_argument("--omega-f", type=float, dest="omega_f",
                       help="final trap frequency (alternative to --gamma)")
        return p

    p = add("stroke", "time series of protocol and work-statistics columns")
    p.add_argument("--tau", type=float, help="stroke duration")
    p.add_argument("--beta", type=float, help="inverse bath temperature")
    p.add_argument("--samples", type=int, help="number of uniform time samples")
    p.add_argument("--format", choices=("csv", "json"))

    p = add("sweep-tau", "integrated excess work vs stroke duration, fitted")
    p.add_argument("--tau-min", type=float, dest="tau_min",
                   help="smallest duration (default 2 tau_c)")
    p.add_argument("--tau-max", type=float, dest="tau_max",
                   help="largest duration (default 20 tau_c)")
    p.add_argument("--tau-points", type=int, dest="tau_points",
                   help="number of geometrically spaced durations")
    p.add_argument("--beta", type=float, help="inverse bath temperature")
    p.add_argument("--format", choices=("csv", "json"))

    p = add("cycle", "four-stroke engine report (JSON)")
    p.add_argument("--tau", type=float, help="duration of each work stroke")
    p.add_argument("--beta", type=float, help="hot-bath inverse temperature")
    p.add_argument("--beta-cold", type=float, dest="beta_cold",
                   help="cold-bath inverse temperature")

    add("cutoff", "confinement cut-off time for the stroke shape (JSON)")

    p = add("oracle-check", "Gaussian vs Fock discrepancy report (JSON)")
    p.add_argument("--tau", type=float, help="stroke duration")
    p.add_argument("--beta", type=float, help="inverse bath temperature")
    p.add_argument("--fock-dim", type=int, dest="fock_dim",
                   help="Fock truncation (fixed; default 200 with escalation)")
    p.add_argument("--samples", type=int, help="number of grid times")
    return parser


def _load_config_file(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ParameterError("config file must be a flat JSON object")
    for key, value in data.items():
        if key not in _KNOWN_KEYS:
            raise ParameterError(f"unknown config key {key!r}")
        if key in _STR_KEYS:
            if not isinstance(value, str):
                raise ParameterError(f"config key {key!r} must be a string")
        elif isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ParameterError(f"config key {key!r} must be a number")
    return data


def _resolve(args: argparse.Namespace) -> dict:
    """Merge flags > config file > defaults for the active command.

    The gamma/omega_f pair is resolved as a unit so a flag for one member
    shadows a config-file value for the other.
    """
    cfg = dict(_DEFAULTS[args.command])
    file_cfg = _load_config_file(args.config) if args.config else {}
    for key in cfg:
        if key in ("gamma", "omega_f"):
            continue
        if key in file_cfg:
            cfg[key] = file_cfg[key]
        flag = getattr(args, key, None)
        if flag is not None:
            cfg[key] = flag
    if args.gamma is not None or args.omega_f is not None:
        pair = (args.gamma, args.omega_f)
    elif "gamma" in file_cfg or "omega_f" in file_cfg:
        pair = (file_cfg.get("gamma"), file_cfg.get("omega_f"))
    else:
        pair = (None, None)
    if pair[0] is not None and pair[1] is not None:
        raise ParameterError("give either gamma or omega_f, not both")
    cfg["gamma"], cfg["omega_f"] = pair
    for key in _INT_KEYS & cfg.keys():
        value = cfg[key]
        if value is not None:
            if value != int(value):
                raise ParameterError(f"{key} must be an integer, got {value!r}")
            cfg[key] = int(value)
    for key in ("samples", "tau_points"):
        if key in cfg and cfg[key] < 2:
            raise ParameterError(f"{key} must be >= 2, got {cfg[key]}")
    if cfg.get("format") not in (None, "csv", "json"):
        raise ParameterError(f"format must be csv or json, got {cfg['format']!r}")
    return cfg


def _stroke_shape(cfg: dict, params: OscillatorParams) -> tuple[float, float]:
    """(gamma, omega_end) from the gamma/omega_f pair; default gamma = 4."""
    if cfg["omega_f"] is not None:
        omega_end = float(cfg["omega_f"])
        if omega_end <= 0.0:
            raise ParameterError(f"omega_f must be positive, got {omega_end}")
        return math.sqrt(params.omega0 / omega_end), omega_end
    gamma = 4.0 if cfg["gamma"] is None else float(cfg["gamma"])
    if gamma <= 0.0:
        raise ParameterError(f"gamma must be positive, got {gamma}")
    return gamma, params.omega0 / gamma**2


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _check_finite(rows) -> None:
    flat = [v for row in rows for v in row]
    if not np.all(np.isfinite(flat)):
        raise NumericalConsistencyError("non-finite value in output table")


def _echo(cfg: dict) -> dict:
    """Resolved config for the metadata header; defaults left unset (None)
    are dropped so the echo is itself a valid config file."""
    return {k: v for k, v in sorted(cfg.items()) if k != "out" and v is not None}


def _csv_doc(command: str, cfg: dict, columns, rows, extra_comments=()) -> str:
    lines = [f"# format-version: {_FORMAT_VERSION}",
             f"# superotto {command}",
             "# config: " + json.dumps(_echo(cfg), sort_keys=True)]
    lines.extend(extra_comments)
    lines.append(",".join(columns))
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def _json_doc(command: str, cfg: dict, payload: dict) -> str:
    doc = {"format_version": _FORMAT_VERSION, "command": command,
           "config": _echo(cfg)}
    doc.update(payload)
    try:
        return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"
    except ValueError as err:
        raise NumericalConsistencyError(f"non-finite value in report: {err}") from err


def _table_doc(command, cfg, columns, rows, summary=None) -> str:
    _check_finite(rows)
    if cfg["format"] == "json":
        payload = {"columns": list(columns), "rows": [list(map(float, r)) for r in rows]}
        if summary is not None:
            payload["summary"] = summary
        return _json_doc(command, cfg, payload)
    extra = []
    if summary is not None:
        extra.append("# summary: " + json.dumps(summary, sort_keys=True))
    return _csv_doc(command, cfg, columns, rows, extra)


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


_STROKE_COLUMNS = ("t", "b", "bdot", "omega_sq", "mean_w", "mean_w_ad",
                   "std_w", "delta_w", "rel_ent_t_eq", "rel_ent_ad_eq")


def cmd_stroke(cfg: dict) -> tuple[str, int]:
    params = OscillatorParams(beta=float(cfg["beta"]))
    gamma, omega_end = _stroke_shape(cfg, params)
    spec = StrokeSpec(params.omega0, omega_end, float(cfg["tau"]))
    _require_confined(spec)
    scale = params.hbar * params.omega0  # energies reported in units of hbar*omega0
    rows = []
    for t in np.linspace(0.0, spec.tau, cfg["samples"]):
        tp = trajectory_point(spec, float(t))
        rec = work_record(params, spec, float(t))
        rows.append((rec.t, tp.b, tp.bdot, tp.omega_sq,
                     rec.mean_w / scale, rec.mean_w_ad / scale,
                     rec.std_w / scale, rec.delta_w / scale,
                     rec.rel_ent_t / scale, rec.rel_ent_ad / scale))
    return _table_doc("stroke", cfg, _STROKE_COLUMNS, rows), EXIT_OK


def cmd_sweep_tau(cfg: dict) -> tuple[str, int]:
    params = OscillatorParams(beta=float(cfg["beta"]))
    gamma, omega_end = _stroke_shape(cfg, params)
    tau_c = cutoff_time(params.omega0, omega_end)
    tau_min = 2.0 * tau_c if cfg["tau_min"] is None else float(cfg["tau_min"])
    tau_max = 20.0 * tau_c if cfg["tau_max"] is None else float(cfg["tau_max"])
    if not (0.0 < tau_min < tau_max):
        raise ParameterError(f"need 0 < tau_min < tau_max, got ({tau_min}, {tau_max})")
    taus = np.geomspace(tau_min, tau_max, cfg["tau_points"])
    sweep = sweep_avg_delta_w(params, gamma, taus)
    summary = {"tau_c": sweep.tau_c,
               "fitted_exponent": sweep.fitted_exponent,
               "r_squared": sweep.r_squared}
    rows = list(zip(sweep.tau_values, sweep.avg_delta_w))
    return _table_doc("sweep-tau", cfg, ("tau", "avg_delta_w"), rows, summary), EXIT_OK


def cmd_cycle(cfg: dict) -> tuple[str, int]:
    params = OscillatorParams(beta=float(cfg["beta"]))
    _, omega_end = _stroke_shape(cfg, params)
    cycle = CycleSpec(omega0=params.omega0, omega_f=omega_end,
                      beta_hot=float(cfg["beta"]), beta_cold=float(cfg["beta_cold"]),
                      tau1=float(cfg["tau"]), tau3=float(cfg["tau"]))
    rep = run_superadiabatic_cycle(cycle, params)
    qsl_unbounded = math.isinf(rep.qsl_bound)
    report = {
        "w1": rep.w1, "w3": rep.w3, "q2": rep.q2, "q4": rep.q4,
        "net_work": rep.net_work,
        "efficiency": rep.efficiency,
        "otto_efficiency_closed_form": rep.otto_efficiency_closed_form,
        "power": rep.power,
        "qsl_bound": rep.qsl_bound if math.isfinite(rep.qsl_bound) else None,
        "qsl_unbounded": qsl_unbounded,
        "is_engine": rep.is_engine,
    }
    return _json_doc("cycle", cfg, {"report": report}), EXIT_OK


def cmd_cutoff(cfg: dict) -> tuple[str, int]:
    params = OscillatorParams()
    gamma, omega_end = _stroke_shape(cfg, params)
    tau_c = cutoff_time(params.omega0, omega_end)
    payload = {"gamma": gamma, "omega_start": params.omega0,
               "omega_end": omega_end, "tau_c": tau_c}
    return _json_doc("cutoff", cfg, payload), EXIT_OK


def cmd_oracle_check(cfg: dict) -> tuple[str, int]:
    params = OscillatorParams(beta=float(cfg["beta"]))
    _, omega_end = _stroke_shape(cfg, params)
    spec = StrokeSpec(params.omega0, omega_end, float(cfg["tau"]))
    _require_confined(spec)
    times = np.linspace(0.0, spec.tau, cfg["samples"])
    # A user-supplied dimension is binding; the default escalates x2 on
    # truncation failures up to the hard cap.
    dim = 200 if cfg["fock_dim"] is None else cfg["fock_dim"]
    escalate = cfg["fock_dim"] is None
    while True:
        fock = FockConfig(dim=dim, basis_omega=geometric_basis(spec))
        try:
            table = discrepancy_table(params, spec, times, fock)
            break
        except TruncationError as err:
            if not escalate or 2 * dim > _MAX_FOCK_DIM:
                raise TruncationError(
                    f"{err} [fock dimension {dim}, escalation "
                    f"{'disabled' if not escalate else 'exhausted'}]") from err
            dim *= 2
    worst = table["max_discrepancy"]
    passed = max(worst.values()) <= _ORACLE_TOL
    payload = {"fock_dim": dim, "tolerance": _ORACLE_TOL, "passed": passed,
               "rows": table["rows"], "max_discrepancy": worst}
    return _json_doc("oracle-check", cfg, payload), EXIT_OK if passed else EXIT_ACCEPTANCE


_COMMANDS = {
    "stroke": cmd_stroke,
    "sweep-tau": cmd_sweep_tau,
    "cycle": cmd_cycle,
    "cutoff": cmd_cutoff,
    "oracle-check": cmd_oracle_check,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _resolve(args)
        text, code = _COMMANDS[args.command](cfg)
        _emit(text, cfg["out"])
        return code
    except ValueError as err:  # ParameterError, DomainError, CutoffViolationError
        print(f"superotto: invalid input: {err}", file=sys.stderr)
        return EXIT_INVALID
    except (TruncationError, PropagationError) as err:
        print(f"superotto: numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    except RuntimeError as err:
        print(f"superotto: numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as err:
        print(f"superotto: invalid input: {err}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
