"""``blowup-lab`` command line entry point.

Exit codes: 0 success, 1 runtime failure, 2 hypothesis violation,
3 verification-check failure.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import logging
import sys
from pathlib import Path

from .. import __version__, blowup_ode, regions
from ..errors import BlowupLabError, HypothesisViolation
from . import checks, runs
from .config import ConfigError, Experiment, RunConfig, load_config

EXIT_OK, EXIT_RUNTIME, EXIT_HYPOTHESIS, EXIT_CHECK = 0, 1, 2, 3


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def parse_csv(text: str) -> tuple[list[str], list[list[str]]]:
    lines = text.splitlines()
    return lines[0].split(","), [ln.split(",") for ln in lines[1:]]


class Outputs:
    """Collects artifacts for one run and writes them plus the manifest."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.files: dict[str, str] = {}

    def add(self, name: str, text: str) -> None:
        self.files[name] = text

    def write(self, extra: dict | None = None) -> Path:
        out = Path(self.config.out)
        out.mkdir(parents=True, exist_ok=True)
        for name, text in self.files.items():
            (out / name).write_text(text)
        manifest = {
            "tool": "blowup-lab",
            "version": __version__,
            "config": self.config.echo(),
            "artifacts": {n: hashlib.sha256(t.encode()).hexdigest() for n, t in sorted(self.files.items())},
        }
        if extra:
            manifest.update(extra)
        (out / "run.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        return out


PARAM_COLS = ["N", "m", "mu1", "mu2", "nu1_sq", "nu2_sq", "p", "q", "eps"]


def cmd_classify(config: RunConfig) -> int:
    cls = regions.omega(config.params)
    pr = config.params
    print(f"Omega={cls.omega:.12g} lambda1={cls.lambda1:.12g} lambda2={cls.lambda2:.12g} "
          f"branch={cls.branch.value} lifespan<= {cls.exponent_descriptor}")
    header = PARAM_COLS + ["lambda1", "lambda2", "omega", "branch", "lifespan_law"]
    row = [getattr(pr, k) for k in PARAM_COLS] + [cls.lambda1, cls.lambda2, cls.omega, cls.branch.value,
                                                  str(cls.exponent_descriptor)]
    outs = Outputs(config)
    outs.add("classify.csv", csv_text(header, [row]))
    outs.write()
    return EXIT_OK


def cmd_integrate(config: RunConfig) -> int:
    res = blowup_ode.integrate(config.params, config.horizon, config.thresholds, config.tolerances)
    gap = blowup_ode.simultaneity_gap(res, config.thresholds[0]) if res.blew_up else None
    print(f"termination={res.termination.value} blew_up={res.blew_up} "
          f"T={res.final_time:.6g} steps={res.steps} gap={gap if gap is None else format(gap, '.3g')}")
    header = ["eps", "termination", "blew_up", "reported_time", "t_b_estimate", "blowup_rate", "leading"]
    header += [f"t_at_{thr:g}" for thr in config.thresholds] + ["simultaneity_gap", "steps"]
    row = [config.params.eps, res.termination.value, res.blew_up, res.final_time, res.t_b_estimate,
           res.blowup_rate, f"y{res.leading + 1}", *res.threshold_spread, gap, res.steps]
    outs = Outputs(config)
    outs.add("trajectory.csv", res.trajectory.to_csv())
    outs.add("blowup.csv", csv_text(header, [row]))
    outs.write()
    return EXIT_OK


def _fit_text(report: runs.SweepReport) -> str:
    lines = [f"theoretical_omega {report.theoretical_omega:.12g}", f"branch {report.branch}"]
    if report.fit_subcritical is None:
        lines.append("fit_subcritical none (fewer than two blow-up rows)")
    else:
        f = report.fit_subcritical
        lines.append(f"fit_subcritical slope {f.slope:.12g} intercept {f.intercept:.12g} r2 {f.r2:.12g}")
    if report.fit_critical is not None:
        f = report.fit_critical
        lines.append(f"fit_critical slope {f.slope:.12g} r2 {f.r2:.12g}")
    lines.append("note: fitted slopes are reported next to Omega; the ODE model is a reduced "
                 "surrogate and equality is not asserted")
    return "\n".join(lines) + "\n"


def cmd_sweep(config: RunConfig) -> int:
    eps_list = config.eps_list
    if not eps_list:
        raise ConfigError("sweep needs eps_list (directly or via a preset)")
    report = runs.run_sweep(config.params, eps_list, config.horizon, config.thresholds, config.tolerances)
    rows = [(r.eps, r.t_b, r.termination) for r in report.rows]
    outs = Outputs(config)
    outs.add("sweep.csv", csv_text(["eps", "t_b", "termination"], rows))
    text = _fit_text(report)
    outs.add("fit.txt", text)
    outs.write()
    for r in report.rows:
        print(f"eps={r.eps:g} T={r.t_b:.6g} {r.termination}")
    print(text, end="")
    return EXIT_OK


def cmd_region_grid(config: RunConfig) -> int:
    rows = runs.region_grid(config.params, config.grid)
    outs = Outputs(config)
    outs.add("region_grid.csv", csv_text(["p", "q", "lambda1", "lambda2", "omega", "branch"], rows))
    outs.write()
    print(f"{len(rows)} cells written")
    return EXIT_OK


def cmd_verify(config: RunConfig) -> int:
    results = checks.run_all(self_test=config.self_test)
    rows = [(r.name, r.value, r.limit, r.margin, r.passed) for r in results]
    outs = Outputs(config)
    outs.add("verify.csv", csv_text(["check", "value", "limit", "margin", "passed"], rows))
    outs.write()
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.value:.3e} (limit {r.limit:.1e}) {r.detail}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK


COMMANDS = {
    Experiment.CLASSIFY: cmd_classify,
    Experiment.INTEGRATE: cmd_integrate,
    Experiment.SWEEP: cmd_sweep,
    Experiment.REGION_GRID: cmd_region_grid,
    Experiment.VERIFY: cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blowup-lab", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=[e.value for e in Experiment])
    parser.add_argument("--config", help="JSON configuration file")
    parser.add_argument("--preset", help="fig-a ... fig-f")
    parser.add_argument("--out", help="output directory (default: ./out)")
    parser.add_argument("--self-test", action="store_true", default=None,
                        help="verify: add the negative-control check on a perturbed profile")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    experiment = Experiment(args.command)
    try:
        config = load_config(experiment, args.config, args.preset, args.out, args.self_test)
        return COMMANDS[experiment](config)
    except HypothesisViolation as exc:
        print(f"hypothesis violation: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except (BlowupLabError, ConfigError, OSError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
