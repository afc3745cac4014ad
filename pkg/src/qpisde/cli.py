"""Command-line front end: reproducible experiments emitting CSV/SVG files.

Subcommands:
    simulate    exact vs. numerical trajectories on one or more paths
    converge    strong-convergence table over a refinement ladder
    stability   (mu, dt) stability-region scan at fixed sigma
    local-error mean-square one-block error vs. dt, with fitted slope

Every subcommand is deterministic for fixed flags and seed. Flags override
an optional `key=value` config file (--config), which overrides built-in
defaults; the defaults mirror the reference experiment settings
(mu=-1, sigma=0.5, x0=1, T=1).

Exit codes: 0 success, 2 argument/validation failure, 1 runtime/IO failure.
"""

from __future__ import annotations

import argparse
import sys

from . import analysis, brownian, stability
from .errors import InvalidInputError, QpisdeError
from .model import GbmParams, TimeGrid, exact_solution
from .schemes import SchemeId, integrate

DEFAULTS = {
    "mu": -1.0,
    "sigma": 0.5,
    "x0": 1.0,
    "t_end": 1.0,
    "seed": 85,
    "n": 256,
    "scheme": "qpi",
    "paths": 1,
    "milstein_sign": "standard",
    "n_list": "4,16,64,256,1024",
    "schemes": "qpi,iem,milstein",
    "converge_paths": 500,
    "mu_range": "-4:1",
    "dt_range": "0.01:1",
    "grid": 100,
    "stability_scheme": "qpi-paper",
    "format": "csv",
    "dt_list": "0.125,0.0625,0.03125,0.015625,0.0078125,0.00390625",
    "samples": 100000,
    "output": "-",
}


def _load_config(path: str) -> dict:
    """Parse a line-based `key=value` config file; `#` starts a comment."""
    cfg = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidInputError(f"{path}:{lineno}: expected key=value, got {raw.rstrip()!r}")
            key, value = line.split("=", 1)
            cfg[key.strip().replace("-", "_")] = value.strip()
    return cfg


def _resolve(args: argparse.Namespace, config: dict, key: str, cast, default_key: str | None = None):
    """Flag > config file > built-in default."""
    v = getattr(args, key, None)
    if v is not None:
        return v
    if key in config:
        return cast(config[key])
    return cast(DEFAULTS[default_key or key])


def _parse_floats(text: str) -> list[float]:
    items = [s for s in text.replace(" ", "").split(",") if s]
    if not items:
        raise InvalidInputError("expected a comma-separated list of numbers")
    return [float(s) for s in items]


def _parse_ints(text: str) -> list[int]:
    return [int(round(v)) for v in _parse_floats(text)]


def _parse_range(text: str) -> tuple[float, float]:
    parts = text.split(":")
    if len(parts) != 2:
        raise InvalidInputError(f"expected a range low:high, got {text!r}")
    return float(parts[0]), float(parts[1])


def _write_output(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)


def _gbm_params(args, config) -> GbmParams:
    return GbmParams(mu=_resolve(args, config, "mu", float),
                     sigma=_resolve(args, config, "sigma", float),
                     x0=_resolve(args, config, "x0", float))


def cmd_simulate(args, config) -> int:
    params = _gbm_params(args, config)
    t_end = _resolve(args, config, "t_end", float)
    n = _resolve(args, config, "n", int)
    scheme = SchemeId.parse(_resolve(args, config, "scheme", str))
    seed = _resolve(args, config, "seed", int)
    n_paths = _resolve(args, config, "paths", int)
    sign = _resolve(args, config, "milstein_sign", str)
    if n_paths < 1:
        raise InvalidInputError(f"--paths must be >= 1, got {n_paths}")
    grid = TimeGrid(t_end=t_end, n_steps=n)
    if scheme is SchemeId.QPI:
        grid.require_even()

    if n_paths == 1:
        path = brownian.generate_path(brownian.mix_seed(seed, 0), t_end, n)
        exact = exact_solution(params, grid, brownian.node_values(path))
        approx = integrate(scheme, params, grid, path, milstein_sign=sign)
        lines = ["t,exact,approx"]
        for t, e, a in zip(grid.times, exact.values, approx.values):
            lines.append(f"{t:.17g},{e:.17g},{a:.17g}")
    else:
        trajectories = []
        for k in range(n_paths):
            path = brownian.generate_path(brownian.mix_seed(seed, k), t_end, n)
            trajectories.append(integrate(scheme, params, grid, path, milstein_sign=sign))
        header = "t," + ",".join(f"path_{k + 1}" for k in range(n_paths))
        lines = [header]
        for i, t in enumerate(grid.times):
            row = ",".join(f"{tr.values[i]:.17g}" for tr in trajectories)
            lines.append(f"{t:.17g},{row}")
    _write_output(_resolve(args, config, "output", str), "\n".join(lines) + "\n")
    return 0


def cmd_converge(args, config) -> int:
    params = _gbm_params(args, config)
    t_end = _resolve(args, config, "t_end", float)
    n_list = _parse_ints(_resolve(args, config, "n_list", str))
    schemes = [SchemeId.parse(s) for s in _resolve(args, config, "schemes", str).split(",")]
    n_paths = _resolve(args, config, "paths", int, default_key="converge_paths")
    seed = _resolve(args, config, "seed", int)
    sign = _resolve(args, config, "milstein_sign", str)
    table = analysis.convergence_study(schemes, params, n_list, n_paths, seed,
                                       t_end=t_end, milstein_sign=sign)
    _write_output(_resolve(args, config, "output", str), table.to_csv())
    return 0


def cmd_stability(args, config) -> int:
    sigma = _resolve(args, config, "sigma", float)
    condition = _resolve(args, config, "scheme", str, default_key="stability_scheme")
    mu_range = _parse_range(_resolve(args, config, "mu_range", str))
    dt_range = _parse_range(_resolve(args, config, "dt_range", str))
    resolution = _resolve(args, config, "grid", int)
    fmt = _resolve(args, config, "format", str)
    if fmt not in ("csv", "svg"):
        raise InvalidInputError(f"--format must be csv or svg, got {fmt!r}")
    grid = stability.region_scan(condition, sigma, mu_range, dt_range, resolution)
    text = stability.region_to_csv(grid) if fmt == "csv" else stability.region_to_svg(grid)
    _write_output(_resolve(args, config, "output", str), text)
    return 0


def cmd_local_error(args, config) -> int:
    params = _gbm_params(args, config)
    dt_list = _parse_floats(_resolve(args, config, "dt_list", str))
    samples = _resolve(args, config, "samples", int)
    seed = _resolve(args, config, "seed", int)
    report = analysis.local_error_study(params, dt_list, samples, seed)
    _write_output(_resolve(args, config, "output", str), report.to_csv())
    return 0


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value config file (flags take precedence)")
    p.add_argument("--mu", type=float, help=f"drift (default {DEFAULTS['mu']})")
    p.add_argument("--sigma", type=float, help=f"volatility (default {DEFAULTS['sigma']})")
    p.add_argument("--x0", type=float, help=f"initial value (default {DEFAULTS['x0']})")
    p.add_argument("--seed", type=int, help=f"master seed (default {DEFAULTS['seed']})")
    p.add_argument("--output", "-o", help="output file ('-' for stdout, the default)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qpisde",
        description="Two-step quadratic-interpolation scheme for GBM: "
                    "simulation, convergence and stability experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate trajectories and dump them as CSV")
    _add_common(p)
    p.add_argument("--t-end", type=float, dest="t_end", help=f"horizon T (default {DEFAULTS['t_end']})")
    p.add_argument("--n", type=int, help=f"number of steps (default {DEFAULTS['n']})")
    p.add_argument("--scheme", help=f"qpi|em|iem|milstein (default {DEFAULTS['scheme']})")
    p.add_argument("--paths", type=int, help=f"number of paths (default {DEFAULTS['paths']})")
    p.add_argument("--milstein-sign", dest="milstein_sign", choices=("standard", "paper"),
                   help=f"Milstein correction sign (default {DEFAULTS['milstein_sign']})")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("converge", help="strong-convergence error table as CSV")
    _add_common(p)
    p.add_argument("--t-end", type=float, dest="t_end", help=f"horizon T (default {DEFAULTS['t_end']})")
    p.add_argument("--n-list", dest="n_list", help=f"comma list of step counts (default {DEFAULTS['n_list']})")
    p.add_argument("--schemes", help=f"comma list of schemes (default {DEFAULTS['schemes']})")
    p.add_argument("--paths", type=int, help=f"Monte Carlo paths (default {DEFAULTS['converge_paths']})")
    p.add_argument("--milstein-sign", dest="milstein_sign", choices=("standard", "paper"),
                   help=f"Milstein correction sign (default {DEFAULTS['milstein_sign']})")
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("stability", help="stability-region scan as CSV or SVG")
    _add_common(p)
    p.add_argument("--scheme", help="qpi-paper|qpi-exact|iem|milstein "
                                    f"(default {DEFAULTS['stability_scheme']})")
    p.add_argument("--mu-range", dest="mu_range", help=f"low:high (default {DEFAULTS['mu_range']})")
    p.add_argument("--dt-range", dest="dt_range", help=f"low:high (default {DEFAULTS['dt_range']})")
    p.add_argument("--grid", type=int, help=f"samples per axis (default {DEFAULTS['grid']})")
    p.add_argument("--format", choices=("csv", "svg"), help=f"output format (default {DEFAULTS['format']})")
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("local-error", help="one-block mean-square error vs dt as CSV")
    _add_common(p)
    p.add_argument("--dt-list", dest="dt_list", help=f"comma list of dt values, descending "
                                                     f"(default {DEFAULTS['dt_list']})")
    p.add_argument("--samples", type=int, help=f"samples per dt (default {DEFAULTS['samples']})")
    p.set_defaults(func=cmd_local_error)
    return parser


def _merge_range_flags(argv: list[str]) -> list[str]:
    """Join `--mu-range -4:1` into `--mu-range=-4:1` so argparse does not
    mistake a negative range for an option."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in ("--mu-range", "--dt-range") and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    args = parser.parse_args(_merge_range_flags(list(argv)))
    try:
        config = _load_config(args.config) if args.config else {}
        return args.func(args, config)
    except QpisdeError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except OSError as exc:
        print(str(exc), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
