"""Command-line front end.

Subcommands::

    stoplight spectrum  --config fig1.toml          # <chi> and its slope vs Delta1
    stoplight sweep     --config fig2a.toml         # group velocity vs the sweep variable
    stoplight groupvel  --config fig2a.toml         # one group-velocity report
    stoplight find-stop --config fig2a.toml --bracket 1e-3,3e-3
    stoplight params    [--emit]                    # resolved configuration

Exit status is 0 on success, 1 for configuration errors and 2 for
numerical failures.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys

import numpy as np

from .config import SWEEP_COLUMNS, ConfigError, RunConfig, parse_scalar
from .core import ParameterError, SolverError
from .dispersion import GroupVelocityReport, group_velocity
from .scan import find_stop_omega, sweep, sweep_values
from .susceptibility import spectrum

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER = 0, 1, 2

SPECTRUM_COLUMNS = ["delta1_over_gamma", "re_chi", "im_chi", "dchi_re", "dchi_im"]
REPORT_COLUMNS = [
    "vg_cm_s", "vg_no_spatial_cm_s",
    "numerator_re", "numerator_im", "denominator_re", "denominator_im",
    "chi_re", "chi_im", "dchi_re", "dchi_im", "vchi_re", "vchi_im",
    "absorption_per_cm",
]
STATUS_COLUMNS = ["status", "message"]
STOP_COLUMNS = [
    "omega_star", "omega_star_over_gamma", "bracket_lo", "bracket_hi",
    "iterations", "residual_numerator", "equivalent_B_field_gauss",
]


def report_row(report: GroupVelocityReport | None):
    if report is None:
        return dict.fromkeys(REPORT_COLUMNS)
    return {
        "vg_cm_s": report.vg,
        "vg_no_spatial_cm_s": report.vg_no_spatial,
        "numerator_re": report.numerator.real,
        "numerator_im": report.numerator.imag,
        "denominator_re": report.denominator.real,
        "denominator_im": report.denominator.imag,
        "chi_re": report.chi_at_center.real,
        "chi_im": report.chi_at_center.imag,
        "dchi_re": report.dchi.real,
        "dchi_im": report.dchi.imag,
        "vchi_re": report.vchi.real,
        "vchi_im": report.vchi.imag,
        "absorption_per_cm": report.absorption_coeff,
    }


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return value


def render(rows, columns, fmt):
    """Serialize rows as CSV (header + one line per row) or a JSON array."""
    if fmt == "json":
        clean = [{c: (float(r[c]) if isinstance(r[c], np.floating) else r[c]) for c in columns}
                 for r in rows]
        return json.dumps(clean, indent=1) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([_cell(r[c]) for c in columns])
    return buf.getvalue()


def emit(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def cmd_spectrum(config: RunConfig, args):
    if config.sweep.variable != "Delta1":
        raise ConfigError('spectrum needs sweep_variable = "Delta1" (probe detuning grid in units of gamma)')
    gam = config.gamma
    grid = sweep_values(config) * gam
    points = spectrum(config.params, grid, config.quad, config.fd_step)
    rows = [
        {
            "delta1_over_gamma": p.Delta1 / gam,
            "re_chi": p.chi.real,
            "im_chi": p.chi.imag,
            "dchi_re": p.dchi_domega.real,
            "dchi_im": p.dchi_domega.imag,
        }
        for p in points
    ]
    return rows, SPECTRUM_COLUMNS


def cmd_sweep(config: RunConfig, args):
    key = SWEEP_COLUMNS[config.sweep.variable]
    rows = []
    for row in sweep(config):
        out = {key: row.value, **report_row(row.report)}
        out["status"] = "ok" if row.ok else "error"
        out["message"] = row.error or ""
        rows.append(out)
    return rows, [key] + REPORT_COLUMNS + STATUS_COLUMNS


def cmd_groupvel(config: RunConfig, args):
    report = group_velocity(config.params, config.quad, config.fd_step)
    row = {
        "delta1_over_gamma": config["Delta1"],
        "omega_over_gamma": config["Omega"],
        **report_row(report),
    }
    return [row], ["delta1_over_gamma", "omega_over_gamma"] + REPORT_COLUMNS


def cmd_find_stop(config: RunConfig, args):
    bracket = None
    if args.bracket:
        try:
            lo, hi = (float(x) for x in args.bracket.split(","))
        except ValueError:
            raise ConfigError(f"--bracket: expected LO,HI in units of gamma, got {args.bracket!r}") from None
        bracket = (lo * config.gamma, hi * config.gamma)
    result = find_stop_omega(config, bracket)
    return [result.as_row()], STOP_COLUMNS


def cmd_params(config: RunConfig, args):
    text = config.to_toml()
    if not args.emit:
        d = config.params.derived()
        p = config.params
        text += (
            "# derived (not configuration keys):\n"
            f"# Delta4 = {d.Delta4!r} rad/s\n"
            f"# omega1 = {p.omega1!r} rad/s\n"
            f"# k1 = {d.k1!r} rad/cm\n"
            f"# d13_sq = {d.d13_sq!r} esu^2 cm^2\n"
            f"# chi_prefactor = {d.chi_prefactor!r}\n"
        )
    return text


COMMANDS = {
    "spectrum": cmd_spectrum,
    "sweep": cmd_sweep,
    "groupvel": cmd_groupvel,
    "find-stop": cmd_find_stop,
    "params": cmd_params,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="flat TOML configuration file")
    common.add_argument("--set", metavar="KEY=VALUE", action="append", default=[],
                        help="override one configuration key (repeatable)")
    common.add_argument("--output", metavar="PATH", help="output file ('-' for stdout)")
    common.add_argument("--format", choices=("csv", "json"), help="output format")
    common.add_argument("--nodes", type=int, metavar="N", help="velocity quadrature nodes")
    common.add_argument("--fd-step", type=float, metavar="X", help="finite-difference step in units of gamma")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="stoplight", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("spectrum", parents=[common], help="averaged susceptibility vs probe detuning")
    sub.add_parser("sweep", parents=[common], help="group velocity vs the sweep variable")
    sub.add_parser("groupvel", parents=[common], help="group velocity at the configured point")
    stop = sub.add_parser("find-stop", parents=[common], help="LL coupling that stops the light")
    stop.add_argument("--bracket", metavar="LO,HI", help="search interval for Omega in units of gamma")
    params = sub.add_parser("params", parents=[common], help="print the resolved configuration")
    params.add_argument("--emit", action="store_true", help="emit only re-loadable configuration")
    return parser


def resolve_config(args) -> RunConfig:
    overrides = []
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"--set: expected KEY=VALUE, got {item!r}")
        overrides.append((key.strip(), parse_scalar(value.strip())))
    if args.nodes is not None:
        overrides.append(("quad_nodes", args.nodes))
    if args.fd_step is not None:
        overrides.append(("fd_step", args.fd_step))
    if args.output is not None:
        overrides.append(("output_path", args.output))
    if args.format is not None:
        overrides.append(("output_format", args.format))
    return RunConfig.load(args.config, overrides)


def run_cli(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = resolve_config(args)
        result = COMMANDS[args.command](config, args)
        out = config.output
        text = result if isinstance(result, str) else render(*result, out.format)
        emit(text, out.path)
    except (ConfigError, ParameterError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
