"""Batch command-line front end.

Every experiment is a subcommand that emits CSV: `#`-prefixed key=value
metadata lines, then a header row, then data rows.  Floats are written in
shortest round-trip form, so identical flags produce byte-identical files and
regression tests can diff them directly.  Flags override an optional
line-oriented `key = value` config file given via --config.

Exit codes: 0 success, 2 bad arguments or validation failure, 3 numerical
failure (the message names the error and the time).  The environment variable
TUBEINT_SEED is reserved; the deterministic core does not read it (the
logistic seed is a flag).
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import (
    Escape,
    InconsistentEpsilon,
    InsufficientSamples,
    InsufficientWindows,
    MissingInput,
    NonFinite,
    NonPositive,
    NonPositiveF,
    NonPositiveW,
    NonPositiveY,
    OutOfRange,
    PositivityViolation,
    PositivityViolationW,
    TubeIntError,
    UnsupportedOmega,
)
from .ermakov import LogisticDriver, integrate_ermakov, lewis_invariant
from .integrate import IntegrationConfig, integrate_y
from .invariant import drift_experiment, drift_percent, exact_drift_experiment
from .model import SystemParams, validate_params
from .perturb import validity, y_composite
from .resonance import (
    TWO_PI,
    _complete_windows,
    _window_project,
    project_harmonics,
    secular_slope,
    third_harmonic_check,
)

_USAGE_ERRORS = (
    NonPositive,
    InconsistentEpsilon,
    OutOfRange,
    MissingInput,
    UnsupportedOmega,
    InsufficientSamples,
    InsufficientWindows,
    ValueError,
)
_NUMERICAL_ERRORS = (
    PositivityViolation,
    PositivityViolationW,
    NonFinite,
    Escape,
    NonPositiveF,
    NonPositiveW,
    NonPositiveY,
)


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return repr(float(v))


def write_csv(path: str, meta: list[tuple[str, str]], header: list[str], rows) -> None:
    lines = [f"# {k}={v}" for k, v in meta]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    content = "\n".join(lines) + "\n"
    if path == "-":
        sys.stdout.write(content)
    else:
        Path(path).write_text(content, encoding="utf-8")


def _params_from_args(args) -> SystemParams:
    if args.c1 is not None or args.c2 is not None:
        raw = SystemParams(
            omega=args.omega, c1=args.c1, c2=args.c2, epsilon=args.eps, y0=args.y0
        )
    else:
        raw = SystemParams(omega=args.omega, epsilon=args.eps, y0=args.y0)
    return validate_params(raw)


def _param_meta(params: SystemParams, cfg: IntegrationConfig) -> list[tuple[str, str]]:
    return [
        ("version", __version__),
        ("omega", _fmt(params.omega)),
        ("c1", _fmt(params.c1)),
        ("c2", _fmt(params.c2)),
        ("eps", _fmt(params.epsilon)),
        ("y0", _fmt(params.y0)),
        ("h", _fmt(cfg.h)),
        ("record_every", str(cfg.record_every)),
    ]


def _maybe_emit_plot(args, kind: str) -> None:
    if getattr(args, "emit_plot", False):
        if args.out == "-":
            raise ValueError("--emit-plot needs --out pointing to a file")
        script = _plot_script(args.out, kind)
        Path(args.out + ".gp").write_text(script, encoding="utf-8")


def cmd_simulate_y(args) -> int:
    params = _params_from_args(args)
    cfg = IntegrationConfig(t_end=args.tau_max, h=args.h, record_every=args.record_every)
    traj = integrate_y(params, cfg)
    tau = traj.column("tau")
    y_num = traj.column("y")
    o1 = y_composite(tau, params, 1)
    o2 = y_composite(tau, params, 2)
    o3 = y_composite(tau, params, 3)
    abs_err = np.abs(y_num - o3)
    rel_err = abs_err / np.abs(y_num)
    meta = [("kind", "simulate-y")] + _param_meta(params, cfg)
    vw = validity(params)
    meta.append(("tau_star", _fmt(vw.tau_star) if math.isfinite(vw.tau_star) else "inf"))
    header = ["tau", "y_numeric", "y_series_o1", "y_series_o2", "y_series_o3",
              "abs_err_o3", "rel_err_o3"]
    rows = zip(tau, y_num, o1, o2, o3, abs_err, rel_err)
    write_csv(args.out, meta, header, rows)
    _maybe_emit_plot(args, "simulate-y")
    return 0


def cmd_invariant_drift(args) -> int:
    params = _params_from_args(args)
    if args.mode == "exact":
        traj = exact_drift_experiment(
            params, z0=args.z0, p0=args.p0, t_end=args.t_max,
            h=args.h, record_every=args.record_every,
        )
    else:
        traj = drift_experiment(
            params, z0=args.z0, p0=args.p0, t_end=args.t_max, order=args.order,
            h=args.h, record_every=args.record_every,
        )
    cfg = traj.meta["config"]
    meta = [("kind", "invariant-drift"), ("mode", args.mode)] + _param_meta(params, cfg)
    if args.mode == "perturbative":
        meta.append(("order", str(args.order)))
    meta += [
        ("z0", _fmt(args.z0)),
        ("p0", _fmt(args.p0)),
        ("max_drift_pct", _fmt(traj.meta["max_drift_pct"])),
        ("final_drift_pct", _fmt(traj.meta["final_drift_pct"])),
        ("absolute_mode", str(traj.meta["absolute_mode"]).lower()),
    ]
    header = ["t", "I_value", "drift_pct"]
    write_csv(args.out, meta, header, traj.data)
    if args.out != "-":
        print(f"mode={args.mode} max_drift_pct={_fmt(traj.meta['max_drift_pct'])} "
              f"final_drift_pct={_fmt(traj.meta['final_drift_pct'])}")
    _maybe_emit_plot(args, "invariant-drift")
    return 0


def cmd_fourier(args) -> int:
    params = _params_from_args(args)
    cfg = IntegrationConfig(t_end=args.tau_max, h=args.h, record_every=args.record_every)
    traj = integrate_y(params, cfg)
    tau = traj.column("tau")
    y = traj.column("y")
    windows = _complete_windows(tau)
    if len(windows) < 5:
        raise InsufficientWindows(f"need >= 5 complete windows, got {len(windows)}")

    eps = params.epsilon
    y0 = params.y0
    fit = secular_slope(traj, harmonic=2, windows=windows, params=params)
    s3_measured, s3_pred = third_harmonic_check(params, traj)
    resid3 = y - y_composite(tau, params, 2)
    slope_pred = (5.0 / 96.0) * eps**2 * y0**-6.0
    s1_pred = eps * y0**-2.5 / 3.0

    rows = []
    for i, k in enumerate(windows):
        hw = project_harmonics(traj, k, n_harmonics=3)
        _, s3_win = _window_project(tau, resid3, k, 3)
        rows.append(
            (k, TWO_PI * (k + 0.5), hw.c[0], hw.c[1], hw.c[2], hw.c[3],
             hw.s[0], hw.s[1], hw.s[2], fit.amplitudes[i], s3_win[2], s3_pred)
        )
    meta = [("kind", "fourier")] + _param_meta(params, cfg)
    meta += [
        ("secular_slope_measured", _fmt(fit.slope)),
        ("secular_slope_predicted", _fmt(slope_pred)),
        ("secular_fit_r2", _fmt(fit.r2)),
        ("s1_predicted", _fmt(s1_pred)),
        ("s3_measured", _fmt(s3_measured)),
        ("s3_predicted", _fmt(s3_pred)),
    ]
    header = ["k", "tau_center", "c0", "c1", "c2", "c3", "s1", "s2", "s3",
              "resid_s2", "resid_s3", "s3_pred"]
    write_csv(args.out, meta, header, rows)
    _maybe_emit_plot(args, "fourier")
    return 0


def cmd_ermakov(args) -> int:
    driver = LogisticDriver(l0=args.l0, ts=args.ts, f0=args.f0, df=args.df)
    cfg = IntegrationConfig(t_end=args.t_max, h=args.h, record_every=args.record_every)
    traj = integrate_ermakov(driver, z0=args.z0, p0=args.p0, w0=args.w0, dw0=args.dw0,
                             config=cfg)
    I = lewis_invariant(traj.column("z"), traj.column("p"), traj.column("w"),
                        traj.column("dw"))
    drift, absolute = drift_percent(I)
    meta = [
        ("kind", "ermakov"),
        ("version", __version__),
        ("l0", _fmt(args.l0)),
        ("ts", _fmt(args.ts)),
        ("f0", _fmt(args.f0)),
        ("df", _fmt(args.df)),
        ("z0", _fmt(args.z0)),
        ("p0", _fmt(args.p0)),
        ("w0", _fmt(traj.meta["w0"])),
        ("dw0", _fmt(args.dw0)),
        ("h", _fmt(cfg.h)),
        ("record_every", str(cfg.record_every)),
        ("max_drift_pct", _fmt(float(np.max(drift)))),
        ("absolute_mode", str(absolute).lower()),
    ]
    header = ["t", "f", "z", "p", "w", "I", "drift_pct"]
    rows = zip(traj.column("t"), traj.column("f"), traj.column("z"), traj.column("p"),
               traj.column("w"), I, drift)
    write_csv(args.out, meta, header, rows)
    _maybe_emit_plot(args, "ermakov")
    return 0


_PLOT_BODIES = {
    "simulate-y": (
        'set xlabel "tau"\nset ylabel "y"\n'
        'plot CSV using 1:2 with lines lc rgb "red" title "numeric", \\\n'
        '     CSV using 1:5 with lines lc rgb "green" title "series order 3"\n'
    ),
    "invariant-drift": (
        'set xlabel "t"\nset ylabel "drift [% of I(0)]"\n'
        "plot CSV using 1:3 with lines title \"drift\"\n"
    ),
    "fourier": (
        'set xlabel "window center tau"\nset ylabel "amplitude"\n'
        'plot CSV using 2:10 with linespoints title "sin(2 tau) residual amplitude", \\\n'
        '     CSV using 2:11 with linespoints title "sin(3 tau) residual amplitude"\n'
    ),
    "ermakov": (
        "set multiplot layout 2,2\n"
        'set ylabel "f"\nplot CSV using 1:2 with lines title "f"\n'
        'set ylabel "z"\nplot CSV using 1:3 with lines title "z"\n'
        'set ylabel "w"\nplot CSV using 1:5 with lines title "w"\n'
        'set ylabel "I"\nplot CSV using 1:6 with lines title "I"\n'
        "unset multiplot\n"
    ),
}


def _plot_script(csv_path: str, kind: str) -> str:
    body = _PLOT_BODIES[kind].replace("CSV", f'"{csv_path}"')
    return (
        "# gnuplot script; run: gnuplot -p <this file>\n"
        'set datafile separator ","\n'
        "set key autotitle columnhead\n"
        "set grid\n" + body
    )


def _csv_kind(path: str) -> str:
    kind = None
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            key, _, value = line[1:].strip().partition("=")
            if key.strip() == "kind":
                kind = value.strip()
    if kind not in _PLOT_BODIES:
        raise ValueError(f"cannot infer plot kind from {path!r} (kind={kind!r})")
    return kind


def cmd_gplot(args) -> int:
    if not Path(args.csv).is_file():
        raise MissingInput(f"CSV file not found: {args.csv!r}")
    kind = args.kind or _csv_kind(args.csv)
    script = _plot_script(args.csv, kind)
    if args.out == "-":
        sys.stdout.write(script)
    else:
        Path(args.out).write_text(script, encoding="utf-8")
    return 0


def _add_common(sub, tau_axis: bool, t_default: float, h_default: float = 1e-3) -> None:
    sub.add_argument("--h", type=float, default=h_default, help="integration step")
    sub.add_argument("--record-every", type=int, default=100,
                     help="store every Nth step (CSV decimation)")
    sub.add_argument("--out", default="-", help="output CSV path ('-' = stdout)")
    sub.add_argument("--emit-plot", action="store_true",
                     help="also write a gnuplot script next to the CSV")
    sub.add_argument("--config", default=None,
                     help="key = value file; flags override file values")
    if tau_axis:
        sub.add_argument("--tau-max", type=float, default=t_default,
                         help="final rescaled time")
    else:
        sub.add_argument("--t-max", type=float, default=t_default, help="final time")


def _add_params(sub, eps_default: float = 0.1, y0_default: float = 1.0) -> None:
    sub.add_argument("--omega", type=float, default=1.0, help="angular frequency")
    sub.add_argument("--eps", type=float, default=eps_default,
                     help="reduced forcing strength C/omega^3")
    sub.add_argument("--c1", type=float, default=None,
                     help="cos forcing coefficient (overrides --eps)")
    sub.add_argument("--c2", type=float, default=None, help="sin forcing coefficient")
    sub.add_argument("--y0", type=float, default=y0_default,
                     help="initial coefficient value (> 0)")


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(
        prog="tubeint",
        description="Simulate the tube-integrable oscillator and verify its invariants.",
        epilog=(
            "experiment one-liners: "
            "`simulate-y --y0 1 --eps 0.1 --tau-max 500` (series vs numerics, valid regime); "
            "`simulate-y --y0 0.7 --eps 0.1 --tau-max 500` (series breakdown); "
            "`invariant-drift --mode perturbative --eps 0.05 --y0 1.2` "
            "(repeat for y0 1.1/0.9/0.8 for the drift table); "
            "`invariant-drift --mode exact --eps 0.05 --y0 1.1` (exact conservation); "
            "`fourier --eps 0.1 --y0 1 --tau-max 300` (resonance coefficients); "
            "`ermakov --t-max 200` (chaotically driven conserved invariant). "
            "TUBEINT_SEED is reserved and currently unused."
        ),
    )
    parser.add_argument("--version", action="version", version=f"tubeint {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)
    table: dict[str, argparse.ArgumentParser] = {}

    s = subs.add_parser("simulate-y", help="coefficient equation: RK4 vs series orders 1-3")
    _add_params(s)
    _add_common(s, tau_axis=True, t_default=500.0)
    s.set_defaults(func=cmd_simulate_y)
    table["simulate-y"] = s

    s = subs.add_parser("invariant-drift", help="invariant deviation along an oscillator run")
    _add_params(s, eps_default=0.05)
    s.add_argument("--mode", choices=("exact", "perturbative"), default="perturbative")
    s.add_argument("--order", type=int, choices=(1, 2, 3), default=3,
                   help="series truncation order (perturbative mode)")
    s.add_argument("--z0", type=float, default=0.2)
    s.add_argument("--p0", type=float, default=0.0)
    _add_common(s, tau_axis=False, t_default=500.0)
    s.set_defaults(func=cmd_invariant_drift)
    table["invariant-drift"] = s

    s = subs.add_parser("fourier", help="windowed harmonic amplitudes and secular slopes")
    _add_params(s)
    _add_common(s, tau_axis=True, t_default=300.0)
    s.set_defaults(func=cmd_fourier)
    table["fourier"] = s

    s = subs.add_parser("ermakov", help="logistic-driver run with its conserved invariant")
    s.add_argument("--l0", type=float, default=0.37, help="logistic seed in [0, 1]")
    s.add_argument("--ts", type=float, default=1.0, help="driver sampling period")
    s.add_argument("--f0", type=float, default=1.0, help="driver base level")
    s.add_argument("--df", type=float, default=0.3, help="driver modulation depth")
    s.add_argument("--z0", type=float, default=0.2)
    s.add_argument("--p0", type=float, default=0.0)
    s.add_argument("--w0", type=float, default=None,
                   help="auxiliary amplitude start (default f(0)^(-1/4))")
    s.add_argument("--dw0", type=float, default=0.0)
    _add_common(s, tau_axis=False, t_default=200.0)
    s.set_defaults(func=cmd_ermakov)
    table["ermakov"] = s

    s = subs.add_parser("gplot", help="emit a gnuplot script for an existing CSV")
    s.add_argument("--csv", required=True, help="input CSV produced by another subcommand")
    s.add_argument("--kind", choices=tuple(_PLOT_BODIES), default=None,
                   help="plot layout (default: infer from CSV metadata)")
    s.add_argument("--out", default="-", help="script path ('-' = stdout)")
    s.add_argument("--config", default=None)
    s.set_defaults(func=cmd_gplot)
    table["gplot"] = s

    return parser, table


def _parse_config_value(text: str):
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text


def _load_config(path: str) -> dict[str, object]:
    p = Path(path)
    if not p.is_file():
        raise MissingInput(f"config file not found: {path!r}")
    values: dict[str, object] = {}
    for raw in p.read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"bad config line (expect key = value): {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key.replace("-", "_")] = _parse_config_value(value)
    return values


def _find_config(argv: list[str]) -> str | None:
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            return argv[i + 1]
        if tok.startswith("--config="):
            return tok.split("=", 1)[1]
    return None


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, table = build_parser()
    try:
        config_path = _find_config(argv)
        if config_path is not None:
            command = next((tok for tok in argv if not tok.startswith("-")), None)
            if command not in table:
                raise ValueError("--config requires a subcommand")
            sub = table[command]
            values = _load_config(config_path)
            known = {action.dest for action in sub._actions}
            unknown = sorted(set(values) - known)
            if unknown:
                raise ValueError(f"unknown config keys for {command}: {', '.join(unknown)}")
            sub.set_defaults(**values)
        args = parser.parse_args(argv)
        return args.func(args)
    except _NUMERICAL_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except _USAGE_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except TubeIntError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
