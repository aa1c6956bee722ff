"""Command-line front end.

Subcommands: generate, energy, sweep, distortion, invert, elcheck,
seminorm.  Every subcommand accepts --config FILE with flat key=value
lines mirroring the long flags; explicit flags override the file.  Exit
codes: 0 success, 2 invalid input, 3 numerical-domain failure, 4 config
error.  All numeric output uses 12 significant digits so repeated runs
with the same config and seed are byte-identical regardless of
--threads.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import curve as curvemod
from . import energy as energymod
from .energy import EnergyParams
from .errors import (ConfigError, InvalidCurveError, InversionSingularityError,
                     NonTangentialTestFunction, NumericalDomainError)
from .seminorm import SeminormParams, bracket_seminorm, gagliardo
from .tangentmap import (EL_SIGNS, SphereMap, energy_e, first_variation_check,
                         random_tangential_fields)

BUILTIN_CURVES = ("circle", "square", "stadion", "stadion-inv", "wavy")


def _fmt(x: float) -> str:
    return f"{x:.12g}"


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # bad usage is a config error (exit 4)
        self.exit(4, f"{self.prog}: error: {message}\n")


def _read_config(path) -> dict:
    values = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                text = line.strip()
                if not text or text.startswith("#"):
                    continue
                if "=" not in text:
                    raise ConfigError(f"{path}:{lineno}: expected key=value")
                key, _, val = text.partition("=")
                values[key.strip().replace("-", "_")] = val.strip()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return values


def _resolve(args, defaults: dict) -> None:
    """Fill unset options from the config file, then from defaults."""
    config = _read_config(args.config) if getattr(args, "config", None) else {}
    for key, default in defaults.items():
        if getattr(args, key, None) is not None:
            continue
        if key in config:
            raw = config[key]
            if isinstance(default, bool):
                value = raw.lower() in ("1", "true", "yes", "on")
            elif isinstance(default, int) and not isinstance(default, bool):
                value = int(raw)
            elif isinstance(default, float):
                value = float(raw)
            else:
                value = raw
            setattr(args, key, value)
        else:
            setattr(args, key, default)
    unknown = set(config) - {k.replace("-", "_") for k in defaults} - {"config"}
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")


def _load_named_curve(name: str, n: int):
    if name == "stadion-inv":
        return curvemod.sphere_inversion(curvemod.generate("stadion", n),
                                         center=(0.0, 0.0), radius=1.0)
    if name in ("circle", "square", "stadion", "wavy"):
        return curvemod.generate(name, n)
    return curvemod.read_curve(name)


# ---------------------------------------------------------------------------
# subcommands


def cmd_generate(args) -> int:
    _resolve(args, {"n": 1000, "out": None, "wavy_k": 5, "wavy_amp": 0.3})
    curve = curvemod.generate(args.kind, args.n, wavy_k=args.wavy_k,
                              wavy_amp=args.wavy_amp)
    if args.out:
        curvemod.write_curve(curve, args.out)
        print(f"wrote={args.out} n={curve.n} dim={curve.dim}")
    else:
        curvemod.write_curve(curve, "/dev/stdout")
    return 0


def cmd_energy(args) -> int:
    _resolve(args, {"alpha": 2.0, "p": None, "stable": False, "threads": 1})
    curve = curvemod.read_curve(args.path)
    p = args.p if args.p is not None else 4.0 / args.alpha
    params = EnergyParams(alpha=args.alpha, p=p)
    report = energymod.ohara_energy(curve, params, threads=args.threads)
    print(f"value={_fmt(report.value)}")
    if report.stable_value is not None:
        print(f"stable_value={_fmt(report.stable_value)}")
    print(f"beta={_fmt(report.beta)}")
    print(f"terms={report.terms}")
    print(f"max_term={_fmt(report.max_term)}")
    if report.underflowed or (report.stable_value is not None and report.stable_value > 0
                              and abs(report.value - report.stable_value)
                              > 1e-6 * report.stable_value):
        print("warning=catastrophic-cancellation")
    if args.stable:
        if not params.is_scale_invariant:
            raise ConfigError("--stable needs the scale-invariant pairing p = 4/alpha")
        val = energymod.scaled_energy_stable(curve, args.alpha, threads=args.threads)
        print(f"scaled_stable={_fmt(val)}")
    return 0


def cmd_distortion(args) -> int:
    _resolve(args, {"threads": 1})
    curve = curvemod.read_curve(args.path)
    print(f"distortion={_fmt(curvemod.distortion(curve, threads=args.threads))}")
    return 0


def cmd_invert(args) -> int:
    _resolve(args, {"cx": 0.0, "cy": 0.0, "cz": None, "r": 1.0, "out": None})
    curve = curvemod.read_curve(args.path)
    center = (args.cx, args.cy) if curve.dim == 2 else (args.cx, args.cy, args.cz or 0.0)
    inverted = curvemod.sphere_inversion(curve, center=center, radius=args.r)
    if args.out:
        curvemod.write_curve(inverted, args.out)
        print(f"wrote={args.out} n={inverted.n}")
    else:
        curvemod.write_curve(inverted, "/dev/stdout")
    return 0


def _parse_alphas(spec: str) -> list[float]:
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ConfigError("alpha range must be start:stop:count")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise ConfigError("alpha count must be >= 1")
        if count == 1:
            return [start]
        step = (stop - start) / (count - 1)
        return [start + i * step for i in range(count)]
    return [float(x) for x in spec.split(",") if x.strip()]


def cmd_sweep(args) -> int:
    _resolve(args, {"curves": "circle,stadion,stadion-inv", "n": 1000,
                    "alphas": "0.05:2.0:40", "out": "sweep.csv",
                    "plot": None, "plot_script": None, "threads": 1, "seed": 0})
    names = [c.strip() for c in args.curves.split(",") if c.strip()]
    if len(set(names)) != len(names):
        raise ConfigError("duplicate curve ids in sweep")
    curves = [(name, _load_named_curve(name, args.n)) for name in names]
    alphas = _parse_alphas(args.alphas)
    table = energymod.alpha_sweep(curves, alphas, threads=args.threads)
    table.write_csv(args.out)
    print(f"wrote={args.out} rows={len(table.rows)}")
    if args.plot:
        from .plotting import render_sweep_figure
        render_sweep_figure(table, args.plot)
        print(f"plot={args.plot}")
    if args.plot_script:
        from .plotting import write_plot_script
        write_plot_script(args.out, args.plot_script, png_path=args.plot)
        print(f"plot_script={args.plot_script}")
    return 0


def cmd_elcheck(args) -> int:
    _resolve(args, {"n": 500, "alpha": 2.0, "p": None, "trials": 10, "seed": 0,
                    "tol": 1e-3, "phi_mode": "random-tangential", "threads": 1})
    p = args.p if args.p is not None else 4.0 / args.alpha
    params = EnergyParams(alpha=args.alpha, p=p)
    if not params.is_scale_invariant:
        raise ConfigError("elcheck needs alpha * p = 4")
    t = np.arange(args.n) / args.n
    u = SphereMap(np.column_stack([-np.sin(2 * np.pi * t), np.cos(2 * np.pi * t),
                                   np.zeros(args.n)]))
    if args.phi_mode == "identity":
        phis = [u.samples.copy()]
    elif args.phi_mode == "random-tangential":
        phis = random_tangential_fields(u, args.trials, args.seed)
    else:
        raise ConfigError(f"unknown phi mode {args.phi_mode!r}")
    scale = energy_e(u, params, threads=args.threads)
    print(f"n={args.n} alpha={_fmt(args.alpha)} p={_fmt(p)} trials={len(phis)} "
          f"seed={args.seed}")
    print(f"signs={EL_SIGNS[0]:+.0f},{EL_SIGNS[1]:+.0f}")
    worst = 0.0
    for k, phi in enumerate(phis):
        chk = first_variation_check(u, phi, params, scale=scale, threads=args.threads)
        worst = max(worst, chk.rel_err)
        print(f"trial={k} fd={_fmt(chk.fd)} assembled={_fmt(chk.assembled)} "
              f"rel_err={_fmt(chk.rel_err)}")
    status = "pass" if worst < args.tol else "fail"
    print(f"max_rel_err={_fmt(worst)}")
    print(f"status={status}")
    return 0 if status == "pass" else 3


def cmd_seminorm(args) -> int:
    _resolve(args, {"beta": 0.5, "p": 2.0, "bracket": False, "threads": 1})
    data = np.loadtxt(args.path, comments="#", ndmin=2)
    params = SeminormParams(beta=args.beta, p=args.p)
    print(f"gagliardo={_fmt(gagliardo(data, params, threads=args.threads))}")
    if args.bracket:
        print(f"bracket={_fmt(bracket_seminorm(data, params, threads=args.threads))}")
    if not params.equivalence_range:
        print("note=beta outside the comparability range beta > 1/p - 1/2")
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="knotenergy",
                     description="Scale-invariant knot energies on polygonal curves")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="flat key=value config file; flags override")
        sp.add_argument("--threads", type=int, help="worker threads (results identical)")

    sp = sub.add_parser("generate", help="write a canonical curve file")
    sp.add_argument("kind", choices=("circle", "square", "stadion", "wavy"))
    sp.add_argument("--n", type=int)
    sp.add_argument("--out")
    sp.add_argument("--wavy-k", dest="wavy_k", type=int)
    sp.add_argument("--wavy-amp", dest="wavy_amp", type=float)
    sp.add_argument("--config")
    sp.set_defaults(fn=cmd_generate)

    sp = sub.add_parser("energy", help="O'hara energy of a curve file")
    sp.add_argument("path")
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--p", type=float)
    sp.add_argument("--stable", action="store_true", default=None,
                    help="also print the cancellation-stable scaled energy")
    common(sp)
    sp.set_defaults(fn=cmd_energy)

    sp = sub.add_parser("distortion", help="discrete Gromov distortion of a curve file")
    sp.add_argument("path")
    common(sp)
    sp.set_defaults(fn=cmd_distortion)

    sp = sub.add_parser("invert", help="sphere inversion of a curve file")
    sp.add_argument("path")
    sp.add_argument("--cx", type=float)
    sp.add_argument("--cy", type=float)
    sp.add_argument("--cz", type=float)
    sp.add_argument("--r", type=float)
    sp.add_argument("--out")
    sp.add_argument("--config")
    sp.set_defaults(fn=cmd_invert)

    sp = sub.add_parser("sweep", help="alpha sweep -> CSV (+ optional figure/script)")
    sp.add_argument("--curves", help="comma list of builtin names or file paths")
    sp.add_argument("--n", type=int)
    sp.add_argument("--alphas", help="comma list or start:stop:count")
    sp.add_argument("--out")
    sp.add_argument("--plot", help="render a PNG figure")
    sp.add_argument("--plot-script", dest="plot_script",
                    help="emit a standalone matplotlib script")
    sp.add_argument("--seed", type=int)
    common(sp)
    sp.set_defaults(fn=cmd_sweep)

    sp = sub.add_parser("elcheck", help="finite-difference check of the first variation")
    sp.add_argument("--n", type=int)
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--p", type=float)
    sp.add_argument("--trials", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--tol", type=float)
    sp.add_argument("--phi-mode", dest="phi_mode",
                    choices=("random-tangential", "identity"))
    common(sp)
    sp.set_defaults(fn=cmd_elcheck)

    sp = sub.add_parser("seminorm", help="fractional seminorms of a sampled function")
    sp.add_argument("path")
    sp.add_argument("--beta", type=float)
    sp.add_argument("--p", type=float)
    sp.add_argument("--bracket", action="store_true", default=None,
                    help="also print the double-averaged form")
    common(sp)
    sp.set_defaults(fn=cmd_seminorm)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except FileNotFoundError as exc:
        print(f"error=missing-file detail={exc}")
        return 2
    except InvalidCurveError as exc:
        print(f"error={'self-intersection' if exc.self_intersection else 'invalid-curve'} "
              f"detail={exc}")
        return 2
    except NonTangentialTestFunction:
        print("error=nontangential-test-function")
        return 2
    except InversionSingularityError as exc:
        print(f"error=inversion-singularity detail={exc}")
        return 3
    except NumericalDomainError as exc:
        print(f"error=numerical-domain detail={exc}")
        return 3
    except (ConfigError, ValueError) as exc:
        print(f"error=config detail={exc}")
        return 4


if __name__ == "__main__":
    sys.exit(main())
