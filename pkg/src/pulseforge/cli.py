"""Command-line front end: ``pulseforge synth | verify | selftest``.

Exit status: 0 when the d=4 fidelity reaches the threshold, 1 when it does
not, 2 for configuration or input errors, 3 when synthesis fails (the report
is still written).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .algebra import gate_fidelity, kron
from .config import RunConfig, parse_config
from .errors import ConfigError, OptimizationError, PulseforgeError, SynthesisError
from .synth.optimize import OptimizerConfig
from .synth.program import PulseProgram, sample_times
from .synth.stages import StageConfig, synthesize_plan, synthesize_rotation
from .verify import SynthesisReport, encode_matrix, locality_residual, make_report, simulate_samples

log = logging.getLogger("pulseforge")

EXIT_OK, EXIT_BELOW, EXIT_CONFIG, EXIT_SYNTH = 0, 1, 2, 3
PULSE_HEADER = ("t_s", "omega1_rad_s", "omega2_rad_s", "phi1_rad", "phi2_rad")
OPT_STEPS = 2**12

# curves written to the plot table next to the chosen strategy
COMPARE = {
    "approximate": ("approximate",),
    "optimized": ("approximate", "optimized"),
    "min-energy": ("approximate", "optimized", "min-energy"),
    "bang-bang": ("approximate", "bang-bang"),
}


def stage_config(cfg: RunConfig, strategy: str | None = None) -> StageConfig:
    return StageConfig(strategy or cfg.strategy, cfg.n, cfg.bounds(), OptimizerConfig(seed=cfg.seed, steps=OPT_STEPS))


def synthesize(cfg: RunConfig, strategy: str | None = None) -> list[PulseProgram]:
    sc = stage_config(cfg, strategy)
    if cfg.target_form == "angles":
        return synthesize_rotation(cfg.target[0], cfg.target[1], cfg.J, sc)
    return synthesize_plan(cfg.target_unitaries(), cfg.J, sc)


def _f(x) -> str:
    return repr(float(x))


def pulse_rows(programs: list[PulseProgram], rate: float):
    """``(t, w1, w2, phi1, phi2)`` rows; jumps and stage boundaries repeat ``t``."""
    t0 = 0.0
    for prog in programs:
        bps = set(prog.breakpoints())
        times = np.union1d(sample_times(prog.duration, rate), sorted(bps))
        for t in times:
            if t in bps:
                left = np.nextafter(t, -np.inf)
                yield t0 + t, float(prog.omega1(left)), float(prog.omega2(left)), prog.phi1, prog.phi2
            yield t0 + t, float(prog.omega1(t)), float(prog.omega2(t)), prog.phi1, prog.phi2
        t0 += prog.duration


def write_pulses(path: Path, programs, rate: float) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(PULSE_HEADER)
        for row in pulse_rows(programs, rate):
            w.writerow([_f(v) for v in row])


def read_pulses(path: Path) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ConfigError("pulse table is empty", field="header", line=1) from None
        if tuple(header) != PULSE_HEADER:
            raise ConfigError(f"unexpected header {header!r}", field="header", line=1)
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(PULSE_HEADER):
                raise ConfigError(f"expected {len(PULSE_HEADER)} columns", line=lineno)
            try:
                rows.append([float(v) for v in row])
            except ValueError:
                raise ConfigError(f"malformed number in {row!r}", line=lineno) from None
    data = np.array(rows, dtype=float).reshape(-1, len(PULSE_HEADER))
    return {name: data[:, i] for i, name in enumerate(PULSE_HEADER)}


def write_plot(path: Path, curves: dict[str, list[PulseProgram]], rate: float, display_hz: bool) -> None:
    unit = "hz" if display_hz else "rad_s"
    div = 2 * np.pi if display_hz else 1.0
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("strategy", "stage", "t_s", f"omega1_{unit}", f"omega2_{unit}"))
        for name, programs in curves.items():
            t0 = 0.0
            for prog in programs:
                t = sample_times(prog.duration, rate)
                w1, w2 = prog.omega1(t) / div, prog.omega2(t) / div
                for ti, a, b in zip(t, w1, w2):
                    w.writerow((name, prog.label, _f(t0 + ti), _f(a), _f(b)))
                t0 += prog.duration


def _write_text(path: Path, text: str) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def _config_record(cfg: RunConfig) -> dict:
    lo, hi = cfg.bounds()
    return {
        "J": cfg.J,
        "strategy": cfg.strategy,
        "target_form": cfg.target_form,
        "n": cfg.n,
        "bounds": [lo, hi],
        "sample_rate": cfg.sample_rate,
        "steps": cfg.steps,
        "seed": cfg.seed,
        "threshold": cfg.threshold,
        "units": "rad/s",
    }


def failure_report(cfg: RunConfig, exc: PulseforgeError) -> SynthesisReport:
    a, b = cfg.target_unitaries()
    diag = getattr(exc, "diagnostics", {}) or {}
    return SynthesisReport(
        target={"qubit1": encode_matrix(a), "qubit2": encode_matrix(b)},
        strategy=cfg.strategy,
        J=cfg.J,
        fidelity=0.0,
        duration=0.0,
        energy=[0.0, 0.0],
        locality_residual=0.0,
        stages=[],
        parameters={**_config_record(cfg), "error": str(exc), "diagnostics": json.loads(json.dumps(diag, default=float))},
        status="synthesis-failure",
    )


def run(cfg: RunConfig, out: Path, display_hz: bool = False) -> int:
    """Synthesize, verify, and write the pulse table, report and plot data."""
    out.mkdir(parents=True, exist_ok=True)
    try:
        programs = synthesize(cfg)
    except (SynthesisError, OptimizationError) as exc:
        log.error("synthesis failed: %s", exc)
        _write_text(out / cfg.report, failure_report(cfg, exc).to_json())
        return EXIT_SYNTH
    report = make_report(cfg.target_unitaries(), programs, cfg.J, cfg.strategy, cfg.steps, _config_record(cfg))
    write_pulses(out / cfg.pulses, programs, cfg.sample_rate)
    _write_text(out / cfg.report, report.to_json())

    curves = {}
    for name in COMPARE[cfg.strategy]:
        if name == cfg.strategy:
            curves[name] = programs
            continue
        try:
            curves[name] = synthesize(cfg, name)
        except PulseforgeError as exc:
            log.warning("comparison strategy %s skipped: %s", name, exc)
    write_plot(out / cfg.plot, curves, cfg.sample_rate, display_hz)

    log.info("fidelity %.12f, duration %.6g s, locality residual %.3g", report.fidelity, report.duration, report.locality_residual)
    print(f"{cfg.strategy}: fidelity={report.fidelity!r} duration_s={report.duration!r} residual={report.locality_residual!r}")
    return EXIT_OK if report.fidelity >= cfg.threshold else EXIT_BELOW


def verify_table(cfg: RunConfig, pulses: Path) -> dict:
    data = read_pulses(pulses)
    U = simulate_samples(data["t_s"], data["omega1_rad_s"], data["omega2_rad_s"], data["phi1_rad"], data["phi2_rad"], cfg.J, cfg.steps)
    a, b = cfg.target_unitaries()
    res, _ = locality_residual(U)
    return {"fidelity": gate_fidelity(U, kron(a, b)), "locality_residual": res, "rows": int(data["t_s"].size)}


def _load_config(args) -> RunConfig:
    if not args.config:
        raise ConfigError("--config is required", field="config")
    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}", field="config") from None
    cfg = parse_config(text)
    return cfg.with_overrides(threshold=args.threshold, steps=args.steps, seed=args.seed)


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="run configuration file")
    common.add_argument("--out", metavar="DIR", default=".", help="output directory (default: .)")
    common.add_argument("--display-hz", action="store_true", help="divide plot amplitudes by 2 pi")
    common.add_argument("--threshold", type=float, metavar="F", help="override the fidelity threshold")
    common.add_argument("--steps", type=int, metavar="N", help="override integrator steps per stage")
    common.add_argument("--seed", type=int, metavar="N", help="override the optimizer seed")
    p = argparse.ArgumentParser(prog="pulseforge", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("synth", parents=[common], help="synthesize pulses for a configuration")
    v = sub.add_parser("verify", parents=[common], help="re-simulate a pulse table against the configured target")
    v.add_argument("--pulses", metavar="PATH", help="pulse CSV (default: OUT/<pulses>)")
    sub.add_parser("selftest", parents=[common], help="run quick invariant checks")
    return p


def _setup_logging() -> None:
    level = os.environ.get("PULSEFORGE_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def main(argv=None) -> int:
    _setup_logging()
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    out = Path(args.out)
    try:
        if args.command == "selftest":
            from .selftest import run_selftest

            return run_selftest()
        cfg = _load_config(args)
        if args.command == "synth":
            return run(cfg, out, args.display_hz)
        result = verify_table(cfg, Path(args.pulses) if args.pulses else out / cfg.pulses)
        buf = io.StringIO()
        json.dump(result, buf, sort_keys=True)
        print(buf.getvalue())
        return EXIT_OK if result["fidelity"] >= cfg.threshold else EXIT_BELOW
    except ConfigError as exc:
        print(f"pulseforge: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"pulseforge: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
