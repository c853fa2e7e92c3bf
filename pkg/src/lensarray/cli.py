"""Command-line client for the receiver-design service handlers.

Exit codes: 0 success, 2 valid-but-infeasible design, 3 configuration
error, 4 validation-battery failure.
"""

from __future__ import annotations

import csv
import json
import sys

import click

from . import config as cfgmod
from .errors import ConfigError, DesignError
from .service import handlers

EXIT_OK = 0
EXIT_INFEASIBLE = 2
EXIT_CONFIG = 3
EXIT_CHECK_FAILED = 4


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".9g")
    return str(value)


def _write_csv(rows, columns, out_path):
    def emit(fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(getattr(row, c)) for c in columns])

    if out_path is None:
        emit(sys.stdout)
    else:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            emit(fh)


def _write_text(text, out_path):
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _load(config_path) -> cfgmod.DesignConfig:
    try:
        return cfgmod.load_config(config_path)
    except OSError as exc:
        raise ConfigError(str(exc)) from None


@click.group()
def main():
    """Design toolkit for lensed PD-array optical wireless receivers."""


@main.command()
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", default=None, type=click.Path(dir_okay=False))
@click.option("--human", is_flag=True, help="Append a human-readable summary.")
def design(config_path, out_path, human):
    """Solve the rate-maximization problem for one configuration file."""
    try:
        cfg = _load(config_path)
        report = handlers.run_design(cfg)
    except ConfigError as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_CONFIG)
    except DesignError as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_CONFIG)
    text = report.model_dump_json(indent=2) + "\n"
    if human:
        text += _human_summary(report)
    _write_text(text, out_path)
    sys.exit(EXIT_OK if report.solution.feasible else EXIT_INFEASIBLE)


def _human_summary(report) -> str:
    s = report.solution
    lines = ["", "== design summary =="]
    if not s.feasible:
        lines.append("infeasible: no (d, L) satisfies the constraints")
        reasons = {p.case_id for p in report.per_configuration}
        lines.append(f"sub-problem outcomes: {sorted(reasons)}")
    else:
        lines += [
            f"configuration: {s.n_pd} PDs per array, {s.n_a} arrays",
            f"PD side: {s.d_opt_um:.2f} um   lens distance: "
            f"[{s.l_lo_um:.1f}, {s.l_hi_um:.1f}] um",
            f"rate: {s.rate_gbps:.2f} Gbps   SNR: {s.snr:.2f}   regime: {s.regime}",
            f"case: {s.case_id}",
        ]
    return "\n".join(lines) + "\n"


@main.command()
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", default=None, type=click.Path(dir_okay=False))
@click.option("--fov-min", type=float, required=True)
@click.option("--fov-max", type=float, required=True)
@click.option("--fov-step", type=float, required=True)
def sweep(config_path, out_path, fov_min, fov_max, fov_step):
    """Rate-versus-FOV trade-off rows per (n_pd, n_a) configuration."""
    try:
        cfg = _load(config_path)
        result = handlers.run_sweep(cfg, fov_min, fov_max, fov_step)
    except (ConfigError, ValueError) as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_CONFIG)
    _write_csv(result.rows,
               ["fov_req_deg", "n_pd", "n_a", "d_opt_um", "l_lo_um", "l_hi_um",
                "rate_gbps", "feasible"], out_path)


@main.command("snr-curve")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", default=None, type=click.Path(dir_okay=False))
@click.option("--combiner", type=click.Choice(["mrc", "egc", "both"]), default="mrc")
@click.option("--mc-samples", type=int, default=0)
@click.option("--seed", type=int, default=0)
@click.option("--l-steps", type=int, default=60)
def snr_curve(config_path, out_path, combiner, mc_samples, seed, l_steps):
    """Analytic (and optionally Monte-Carlo) SNR versus lens distance."""
    try:
        cfg = _load(config_path)
        result = handlers.run_snr_curve(cfg, combiner, mc_samples, seed, l_steps)
    except (ConfigError, ValueError) as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_CONFIG)
    columns = ["l_um"]
    selected = ["mrc", "egc"] if combiner == "both" else [combiner]
    for comb in selected:
        columns.append(f"analytic_{comb}_db")
    if mc_samples > 0:
        for comb in selected:
            columns += [f"mc_{comb}_db", f"mc_stderr_{comb}_db"]
    if combiner != "both":
        # Single-combiner output keeps the generic column names.
        rename = {f"analytic_{combiner}_db": "analytic_snr_db",
                  f"mc_{combiner}_db": "mc_snr_db",
                  f"mc_stderr_{combiner}_db": "mc_stderr_db"}
        rows = result.rows

        class _Row:
            def __init__(self, r):
                self._r = r

            def __getattr__(self, name):
                for new, old in rename.items():
                    if name == old:
                        return getattr(self._r, new)
                return getattr(self._r, name)

        rows = [_Row(r) for r in rows]
        columns = [rename.get(c, c) for c in columns]
        _write_csv(rows, columns, out_path)
    else:
        _write_csv(result.rows, columns, out_path)


@main.command()
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", default=None, type=click.Path(dir_okay=False))
@click.option("--grid", default="80x80", help="Grid resolution as NxM.")
def feasible(config_path, out_path, grid):
    """Per-sub-problem feasibility dump over the (d, L) grid."""
    try:
        d_steps, l_steps = (int(p) for p in grid.lower().split("x"))
    except ValueError:
        click.echo(f"bad --grid value {grid!r}, expected NxM", err=True)
        sys.exit(EXIT_CONFIG)
    try:
        cfg = _load(config_path)
        result = handlers.run_feasible(cfg, d_steps, l_steps)
    except (ConfigError, ValueError) as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_CONFIG)
    _write_csv(result.rows, ["d_um", "l_um", "problem_id", "satisfies_all"], out_path)


@main.command()
@click.option("--config", "config_path", default=None,
              type=click.Path(exists=True, dir_okay=False),
              help="Validate against this configuration (default: bundled).")
@click.option("--out", "out_path", default=None, type=click.Path(dir_okay=False))
@click.option("--json", "as_json", is_flag=True)
def validate(config_path, out_path, as_json):
    """Run the built-in calibration and cross-check battery."""
    try:
        cfg = _load(config_path) if config_path else None
        report = handlers.run_validate(cfg)
    except ConfigError as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_CONFIG)
    if as_json:
        _write_text(report.model_dump_json(indent=2) + "\n", out_path)
    else:
        lines = []
        for c in report.checks:
            status = "PASS" if c.passed else "FAIL"
            lines.append(f"{status} {c.name}: expected={_fmt(c.expected)} "
                         f"actual={_fmt(c.actual)} tol={_fmt(c.tolerance)}")
        lines.append("all checks passed" if report.all_passed else "FAILURES present")
        _write_text("\n".join(lines) + "\n", out_path)
    sys.exit(EXIT_OK if report.all_passed else EXIT_CHECK_FAILED)


if __name__ == "__main__":
    main()
