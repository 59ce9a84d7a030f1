"""Command-line front end: every experiment and check as a subcommand.

Output is CSV or JSON with deterministic float formatting (17 significant
digits, lowercase exponent), so identical invocations are byte-identical.
Exit codes: 0 success, 1 validation error, 2 numerical failure, 3 property
check failure.
"""

from __future__ import annotations

import argparse
import cmath
import csv
import io
import json
import math
import sys

import numpy as np

from . import decomp, experiments, linear, operators, steady
from .field import (
    MonomialField,
    boundary_trace,
    compose_rotation,
    grad,
    l2_norm,
    laplacian,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2
EXIT_PROPERTY = 3


class _Parser(argparse.ArgumentParser):
    """argparse with validation failures mapped to exit code 1."""

    def error(self, message):
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def emit(rows: list, fmt: str, path: str | None) -> None:
    """Write a list of dict rows as CSV (one header row) or JSON."""
    if not rows:
        raise ValueError("nothing to emit")
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, quoting=csv.QUOTE_MINIMAL)
        header = list(rows[0].keys())
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(row[key]) for key in header])
        text = buf.getvalue()
    elif fmt == "json":
        text = json.dumps(rows, indent=2, sort_keys=False) + "\n"
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_obj(obj: dict, path: str | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=False) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _apply_config_defaults(args_list: list, config_path: str | None) -> list:
    """Prepend key=value pairs from a config file as long-option defaults.

    Flags given on the command line come later and therefore win.
    """
    if not config_path:
        return args_list
    injected: list = []
    with open(config_path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"bad config line: {line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            injected.append(f"--{key.replace('_', '-')}")
            if value.lower() not in ("true",):
                injected.append(value)
    return injected + args_list


# -- subcommand implementations ----------------------------------------------


def _cmd_steady(args) -> int:
    _emit_obj(steady.steady_summary(args.b, args.mu0), args.output)
    return EXIT_OK


def _cmd_taylor(args) -> int:
    _emit_obj(
        {
            "taylor_sign": steady.taylor_sign(args.b, args.mu0),
            "stability_condition_holds": steady.stability_condition_holds(
                args.b, args.mu0
            ),
        },
        args.output,
    )
    return EXIT_OK


def _mode_rows(n: int, b: float, t_end: float, dt: float) -> list:
    samples = linear.integrate_mode(n, b, t_end, dt)
    rows = []
    for s in samples:
        w_exact = linear.mode_closed_form(n, b, s.t)
        w_num = s.reconstruct(n)
        rows.append(
            {
                "t": s.t,
                "re_lead": s.sigma.real,
                "im_lead": s.sigma.imag,
                "l2_norm": l2_norm(w_num),
                "residual": (w_num - w_exact).norm_inf(),
            }
        )
    return rows


def _cmd_mode(args) -> int:
    emit(_mode_rows(args.n, args.b, args.t_end, args.dt), args.output_format, args.output)
    return EXIT_OK


def _cmd_evolve(args) -> int:
    init = linear.mode_initial_state(args.n, args.b)
    if args.engine == "closed_form":
        ts = [k * args.dt for k in range(int(round(args.t_end / args.dt)) + 1)] or [0.0]
        states = [
            linear.LinState(
                w=linear.mode_closed_form(args.n, args.b, t),
                w_dot=linear.mode_closed_form_velocity(args.n, args.b, t),
                t=t,
            )
            for t in ts
        ]
    elif args.engine == "rk4_direct":
        states = linear.integrate_linearized(init, args.b, args.t_end, args.dt)
    else:
        dstates = decomp.integrate_decomposed(
            decomp.decompose(init.w, init.w_dot, args.n),
            args.b,
            args.t_end,
            args.dt,
        )
        states = [
            linear.LinState(w=d.reassemble(), w_dot=d.reassemble_velocity(), t=d.t)
            for d in dstates
        ]
    rows = []
    for st in states:
        lead = st.w.coeff(0, args.n)
        # sector leakage: coefficient mass outside the zbar^n / z span
        off_mode = MonomialField(
            {jk: c for jk, c in st.w.coeffs.items() if jk not in ((0, args.n), (1, 0))}
        )
        rows.append(
            {
                "t": st.t,
                "re_lead": lead.real,
                "im_lead": lead.imag,
                "l2_norm": l2_norm(st.w),
                "residual": off_mode.norm_inf(),
            }
        )
    emit(rows, args.output_format, args.output)
    return EXIT_OK


def _cmd_energies(args) -> int:
    rows = []
    steps = int(round(args.t_end / args.dt))
    for k in range(steps + 1):
        t = k * args.dt
        w = linear.mode_closed_form(args.n, args.b, t)
        wd = linear.mode_closed_form_velocity(args.n, args.b, t)
        st = decomp.decompose(w, wd, args.n)
        rep = decomp.energies(st, args.b, args.mu, sigma=args.mu + 1, nu=args.mu, t=t)
        rows.append(
            {
                "t": t,
                "E_plus": rep.E_plus,
                "E_minus": rep.E_minus,
                "F": rep.F,
                "G": rep.G,
                "inv1": rep.invariant_flags[0],
                "inv2": rep.invariant_flags[1],
                "inv3": rep.invariant_flags[2],
            }
        )
    emit(rows, args.output_format, args.output)
    return EXIT_OK


def _cmd_growth(args) -> int:
    t_grid = tuple(np.linspace(0.0, args.t_end, args.t_samples))
    cfg = experiments.ScanConfig(
        n_list=tuple(args.n_list),
        b=args.b,
        mu=args.mu,
        t_grid=t_grid,
        engine=args.engine,
        dt=args.dt,
    )
    rows = [
        {
            "n": r.n,
            "t": r.t,
            "E_plus": r.E_plus,
            "lower_bound": r.lower_bound,
            "init_norm": r.init_norm,
            "fitted_rate": r.fitted_rate,
            "theorem_rate": r.theorem_rate,
            "engine": r.engine,
        }
        for r in experiments.growth_scan(cfg)
    ]
    emit(rows, args.output_format, args.output)
    return EXIT_OK


def _cmd_illpose(args) -> int:
    cfg = experiments.ScanConfig(
        n_list=tuple(args.n_list),
        b=args.b,
        mu=args.mu,
        t_grid=(0.0, args.t_star if args.t_star > 0 else 1.0),
    )
    table = experiments.illposedness_table(cfg, args.t_star)
    emit(table.as_dicts(), args.output_format, args.output)
    return EXIT_OK


def _opcheck_suites(seed: int, degree: int) -> list:
    """Residuals of the core operator identities on random fields."""
    rng = np.random.default_rng(seed)

    def rand_field(deg: int, real: bool = False) -> MonomialField:
        coeffs = {}
        for j in range(deg + 1):
            for k in range(deg + 1 - j):
                coeffs[(j, k)] = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        f = MonomialField(coeffs)
        return f + f.conj() if real else f

    def rand_gradient(deg: int) -> MonomialField:
        return MonomialField(
            {
                (0, m): complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
                for m in range(deg + 1)
            }
        )

    rows = []

    worst = 0.0
    for _ in range(20):
        g = rand_field(degree)
        sol = operators.dirichlet_inverse(g)
        worst = max(worst, (laplacian(sol) - g).norm_inf())
        worst = max(worst, boundary_trace(sol).norm_inf())
    rows.append(("elliptic_inverse", worst, 1e-11))

    worst = 0.0
    for _ in range(20):
        f = rand_field(degree)
        t = float(rng.uniform(0, 2 * math.pi))
        proj = operators.harmonic_projection(f)
        worst = max(worst, (operators.harmonic_projection(proj) - proj).norm_inf())
        conj_lap = operators.ConjugatedOperator("laplacian", t)
        conj_inv = operators.ConjugatedOperator("dirichlet_inverse", t)
        conj_proj = operators.ConjugatedOperator("harmonic_projection", t)
        resid = conj_inv(conj_lap(f)) - (f - conj_proj(f))
        worst = max(worst, resid.norm_inf())
    rows.append(("right_inverse_identity", worst, 1e-11))

    worst = 0.0
    for ident in (1, 2, 3):
        u = rand_gradient(min(degree, 6))
        f = rand_field(2 if ident == 3 else min(degree, 4))
        t = float(rng.uniform(0, 2 * math.pi))
        worst = max(worst, operators.commutator_residual(ident, u, f, t))
    rows.append(("advection_commutators", worst, 1e-8))

    worst = 0.0
    for _ in range(10):
        y = rand_field(degree)
        yd = rand_field(degree)
        st = decomp.decompose(y, yd, 3)
        worst = max(worst, decomp.orthogonality_defect(st))
        worst = max(worst, (st.reassemble() - y).norm_inf())
    rows.append(("decomposition", worst, 1e-10))

    worst = 0.0
    for m in range(1, degree + 1):
        t = float(rng.uniform(0, 2 * math.pi))
        basis = MonomialField.zbar(m - 1).scale(m)
        rotated = compose_rotation(basis, t)
        phase = cmath.exp(-1j * (m - 1) * t)
        worst = max(worst, (rotated - basis.scale(phase)).norm_inf())
    rows.append(("rotation_phases", worst, 1e-13))

    return [
        {"suite": name, "residual": value, "tolerance": tol, "passed": value < tol}
        for name, value, tol in rows
    ]


def _cmd_opcheck(args) -> int:
    rows = _opcheck_suites(args.seed, args.degree)
    emit(rows, args.output_format, args.output)
    if not all(r["passed"] for r in rows):
        return EXIT_PROPERTY
    return EXIT_OK


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="diskmhd",
        description=(
            "Exact spectral checks and growth experiments for the rotating "
            "magnetized column on the unit disk."
        ),
    )
    parser.add_argument("--config", help="key=value file merged under the flags")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--output-format", choices=("csv", "json"), default="csv")
        p.add_argument("--output", help="output path (default: stdout)")
        p.add_argument("--seed", type=int, default=0, help="seed for randomized checks")

    p = sub.add_parser(
        "steady",
        help="rotating-column pressure, its gradient, the magnetic force, and "
        "the equation-of-motion residual",
        description="Prints the rotating-column pressure field, its gradient "
        "(1-b^2)z, the magnetic self-advection -b^2 z, the equation-of-motion "
        "residual, and the boundary pressure derivative 1-b^2/mu0, as JSON.",
    )
    p.add_argument("--b", type=float, default=0.0, help="magnetic strength, |b|<1")
    p.add_argument("--mu0", type=float, default=1.0, help="vacuum permeability, >0")
    p.add_argument("--output", help="output path (default: stdout)")
    p.set_defaults(func=_cmd_steady, validate=_validate_steady)

    p = sub.add_parser(
        "taylor",
        help="boundary pressure derivative 1 - b^2/mu0 and the stability flag",
        description="Evaluates the outward boundary derivative of the column "
        "pressure, 1 - b^2/mu0; the stability condition asks it to be negative.",
    )
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--mu0", type=float, default=1.0)
    p.add_argument("--output", help="output path (default: stdout)")
    p.set_defaults(func=_cmd_taylor, validate=_validate_steady)

    p = sub.add_parser(
        "mode",
        help="per-mode amplitude integration against the closed form",
        description="Integrates the per-mode amplitude equation "
        "sigma'' = (1-b^2)(n-1) sigma (plus the rotating drive on the z part) "
        "and tabulates amplitude, norm, and gap to the closed-form mode.",
    )
    add_common(p)
    p.add_argument("--n", type=int, required=True, help="mode index, >= 2")
    p.add_argument("--b", type=float, default=0.0)
    p.add_argument("--t-end", type=float, default=1.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.set_defaults(func=_cmd_mode, validate=_validate_mode_args)

    p = sub.add_parser(
        "evolve",
        help="integrate the assembled linearized evolution for one mode datum",
        description="Evolves (w, w_dot) under the assembled linearized "
        "right-hand side from the growing-mode initial data, with the engine "
        "choice: closed_form samples, direct RK4, or sector-projected RK4.",
    )
    add_common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--b", type=float, default=0.0)
    p.add_argument("--t-end", type=float, default=1.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--engine", choices=experiments.ENGINES, default="rk4_direct")
    p.set_defaults(func=_cmd_evolve, validate=_validate_mode_args)

    p = sub.add_parser(
        "energies",
        help="growth energies E+/E-/F/G and invariant flags along a mode",
        description="Decomposes the closed-form mode trajectory into gradient "
        "and remainder sectors and tabulates the spectral energies with the "
        "three invariant-set inequality flags.",
    )
    add_common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--b", type=float, default=0.0)
    p.add_argument("--mu", type=float, default=2.0)
    p.add_argument("--t-end", type=float, default=1.0)
    p.add_argument("--dt", type=float, default=0.05)
    p.set_defaults(func=_cmd_energies, validate=_validate_energies)

    p = sub.add_parser(
        "growth",
        help="energy growth scan over mode indices vs the exponential bound",
        description="For each n, evolves the growing-mode data, fits the "
        "late-time log-slope of E+, and compares with the lower-bound rate "
        "sqrt(1-b^2) sqrt(n) and the closed-form rate 2 sqrt((1-b^2)(n-1)).",
    )
    add_common(p)
    p.add_argument("--n-list", type=int, nargs="+", required=True)
    p.add_argument("--b", type=float, default=0.0)
    p.add_argument("--mu", type=float, default=2.0)
    p.add_argument("--t-end", type=float, default=2.0)
    p.add_argument("--t-samples", type=int, default=41)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--engine", choices=experiments.ENGINES, default="closed_form")
    p.set_defaults(func=_cmd_growth, validate=_validate_energies)

    p = sub.add_parser(
        "illpose",
        help="initial-data norms vs the diverging growth bound over n",
        description="Tabulates, over mode indices, the initial-data norm and "
        "the lower bound 2 pi (n-1)^{2 mu}/(2n+1) "
        "exp(sqrt(1-b^2) sqrt(n) t - 2 n^{1/4}) at a fixed positive time: the "
        "data shrink while the bound diverges.",
    )
    add_common(p)
    p.add_argument("--n-list", type=int, nargs="+", required=True)
    p.add_argument("--b", type=float, default=0.0)
    p.add_argument("--mu", type=float, default=2.0)
    p.add_argument("--t-star", type=float, default=0.5)
    p.set_defaults(func=_cmd_illpose, validate=_validate_energies)

    p = sub.add_parser(
        "opcheck",
        help="run the operator identity suites and print pass/fail residuals",
        description="Random-field residual checks: the elliptic inverse, the "
        "right-inverse identity against the harmonic projection, the "
        "advection commutators against the deformation derivative, the "
        "orthogonal decomposition, and rotation phases on gradient modes.",
    )
    add_common(p)
    p.add_argument("--degree", type=int, default=8)
    p.set_defaults(func=_cmd_opcheck, validate=_validate_opcheck)

    return parser


def _validate_steady(args) -> str | None:
    if args.mu0 <= 0:
        return "mu0 must be positive"
    return None


def _validate_mode_args(args) -> str | None:
    if args.n < 2:
        return "n must be at least 2"
    if not args.b * args.b < 1.0:
        return "b^2 must be below 1"
    if args.t_end < 0 or args.dt <= 0:
        return "t-end must be >= 0 and dt > 0"
    return None


def _validate_energies(args) -> str | None:
    if getattr(args, "n", 2) < 2:
        return "n must be at least 2"
    if any(n < 2 for n in getattr(args, "n_list", [2])):
        return "all n must be at least 2"
    if not args.b * args.b < 1.0:
        return "b^2 must be below 1"
    if getattr(args, "mu", 2.0) < 2:
        return "mu must be at least 2"
    return None


def _validate_opcheck(args) -> str | None:
    if args.degree < 1 or args.degree > 12:
        return "degree must be between 1 and 12"
    return None


def main(argv: list | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    # --config must be extracted before subcommand parsing so its values can
    # act as defaults for any subcommand.
    config_path = None
    if "--config" in argv:
        idx = argv.index("--config")
        if idx + 1 >= len(argv):
            sys.stderr.write("diskmhd: error: --config needs a path\n")
            return EXIT_VALIDATION
        config_path = argv[idx + 1]
        argv = argv[:idx] + argv[idx + 2 :]
    parser = build_parser()
    try:
        if config_path:
            head, tail = argv[:1], argv[1:]
            argv = head + _apply_config_defaults(tail, config_path)
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (OSError, ValueError) as exc:
        sys.stderr.write(f"diskmhd: error: {exc}\n")
        return EXIT_VALIDATION
    message = args.validate(args) if getattr(args, "validate", None) else None
    if message:
        sys.stderr.write(f"diskmhd: error: {message}\n")
        return EXIT_VALIDATION
    try:
        return args.func(args)
    except experiments.PropertyCheckError as exc:
        sys.stderr.write(f"diskmhd: property check failed: {exc}\n")
        return EXIT_PROPERTY
    except linear.IntegrationError as exc:
        sys.stderr.write(f"diskmhd: numerical failure: {exc}\n")
        return EXIT_NUMERICAL
    except (OSError, ValueError) as exc:
        sys.stderr.write(f"diskmhd: error: {exc}\n")
        return EXIT_VALIDATION


if __name__ == "__main__":
    raise SystemExit(main())
