"""Quantitative reproductions: initial energy, growth-rate scans, divergence table.

Each scan evolves the growing-mode family, measures the spectral energy of the
gradient sector along the way, and compares against the exponential lower
bound exp(sqrt(1-b^2) sqrt(n) t) and the closed-form rate 2 sqrt((1-b^2)(n-1)).
Rows over the mode index are independent and evaluated in parallel.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .decomp import HarmonicGradient, a_power, decompose, energies, sobolev_norm
from .field import l2_norm
from .linear import (
    integrate_linearized,
    mode_closed_form,
    mode_closed_form_velocity,
    mode_initial_state,
)

ENGINES = ("closed_form", "rk4_direct", "rk4_decomposed")

THREAD_ENV_VAR = "ILLPOSE_THREADS"


class PropertyCheckError(AssertionError):
    """A scan-level assertion (monotonicity, bound satisfaction) failed."""


def _worker_count() -> int:
    raw = os.environ.get(THREAD_ENV_VAR, "")
    if raw.strip():
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


@dataclass(frozen=True)
class ScanConfig:
    """Parameters of a growth or divergence scan."""

    n_list: tuple
    b: float
    mu: float
    t_grid: tuple
    engine: str = "closed_form"
    dt: float = 1e-3

    def __post_init__(self):
        if self.mu < 2:
            raise ValueError("Sobolev index mu must be at least 2")
        if any(n < 2 for n in self.n_list):
            raise ValueError("all mode indices must be at least 2")
        if self.engine not in ENGINES:
            raise ValueError(f"engine must be one of {ENGINES}")
        if not self.b * self.b < 1.0:
            raise ValueError("b^2 must be below 1")


@dataclass(frozen=True)
class ScanRow:
    """One (n, t) sample of a growth scan."""

    n: int
    t: float
    E_plus: float
    lower_bound: float
    init_norm: float
    fitted_rate: float
    theorem_rate: float
    engine: str


def initial_energy(n: int, mu: float) -> tuple:
    """Initial gradient-sector energy of the growing-mode data, two ways.

    reported_value is the closed formula 2 pi (n-1)^{2 mu} e^{-2 n^{1/4}} / (2n+1)
    as printed in the source analysis; quadrature_value integrates
    |A^mu e^{-n^{1/4}} zbar^n|^2 over the disk exactly, giving denominator
    2n+2.  The ratio (2n+2)/(2n+1) reflects a dropped polar Jacobian in the
    printed formula; both are returned so the discrepancy stays visible.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    amp = math.exp(-(n**0.25))
    reported = 2.0 * math.pi * (n - 1) ** (2 * mu) * amp * amp / (2 * n + 1)
    hg = HarmonicGradient({n + 1: amp / (n + 1)})  # the field amp * zbar^n
    weighted = a_power(mu, hg).to_field()
    quadrature = l2_norm(weighted) ** 2
    return reported, quadrature


def _mode_trajectory(n: int, cfg: ScanConfig) -> list:
    """(t, w, w_dot) samples for one mode index under the configured engine."""
    if cfg.engine == "closed_form":
        return [
            (t, mode_closed_form(n, cfg.b, t), mode_closed_form_velocity(n, cfg.b, t))
            for t in cfg.t_grid
        ]
    if cfg.engine == "rk4_direct":
        states = integrate_linearized(
            mode_initial_state(n, cfg.b), cfg.b, cfg.t_grid[-1], cfg.dt
        )
        out = []
        for t in cfg.t_grid:
            nearest = min(states, key=lambda s: abs(s.t - t))
            out.append((t, nearest.w, nearest.w_dot))
        return out
    # rk4_decomposed
    from .decomp import integrate_decomposed

    init_state = mode_initial_state(n, cfg.b)
    dstates = integrate_decomposed(
        decompose(init_state.w, init_state.w_dot, n), cfg.b, cfg.t_grid[-1], cfg.dt
    )
    out = []
    for t in cfg.t_grid:
        nearest = min(dstates, key=lambda s: abs(s.t - t))
        out.append((t, nearest.reassemble(), nearest.reassemble_velocity()))
    return out


def _scan_one(n: int, cfg: ScanConfig) -> list:
    b, mu = cfg.b, cfg.mu
    samples = _mode_trajectory(n, cfg)
    e_plus = []
    for t, w, wd in samples:
        st = decompose(w, wd, n)
        rep = energies(st, b, mu, sigma=mu + 1, nu=mu, t=t)
        e_plus.append(rep.E_plus)
    e0 = e_plus[0]
    theorem_rate = math.sqrt(1.0 - b * b) * math.sqrt(n)
    # log-slope over the final half of the grid; early transients are excluded
    ts = np.asarray([s[0] for s in samples])
    vals = np.asarray(e_plus)
    half = len(ts) // 2
    mask = vals[half:] > 0
    if mask.sum() >= 2:
        fitted = float(np.polyfit(ts[half:][mask], np.log(vals[half:][mask]), 1)[0])
    else:
        fitted = float("nan")
    init_norm = sobolev_norm(
        mu, HarmonicGradient({n + 1: math.exp(-(n**0.25)) / (n + 1)})
    )
    rows = []
    for (t, _, _), ep in zip(samples, e_plus):
        rows.append(
            ScanRow(
                n=n,
                t=t,
                E_plus=ep,
                lower_bound=e0 * math.exp(theorem_rate * t),
                init_norm=init_norm,
                fitted_rate=fitted,
                theorem_rate=theorem_rate,
                engine=cfg.engine,
            )
        )
    return rows


def growth_scan(cfg: ScanConfig) -> list:
    """Evolve the growing-mode data for each n and tabulate the energy growth."""
    with ThreadPoolExecutor(max_workers=_worker_count()) as pool:
        chunks = list(pool.map(lambda n: _scan_one(n, cfg), cfg.n_list))
    return [row for chunk in chunks for row in chunk]


@dataclass(frozen=True)
class DivergenceRow:
    """One mode index of the data-to-zero / solutions-to-infinity table."""

    n: int
    t_star: float
    init_norm: float
    lower_bound: float


@dataclass(frozen=True)
class DivergenceTable:
    rows: tuple
    bound_threshold_index: int
    init_norm_threshold_index: int

    def as_dicts(self) -> list:
        out = []
        for i, row in enumerate(self.rows):
            out.append(
                {
                    "n": row.n,
                    "t_star": row.t_star,
                    "init_norm": row.init_norm,
                    "lower_bound": row.lower_bound,
                    "bound_increasing_from_here": i >= self.bound_threshold_index,
                    "init_norm_decreasing_from_here": i >= self.init_norm_threshold_index,
                }
            )
        return out


def _monotone_threshold(values: list, increasing: bool) -> int:
    """Smallest index after which the sequence is strictly monotone to the end.

    Returns len(values)-1 if only the last element qualifies (trivially), or 0
    if the whole sequence is monotone.
    """
    idx = len(values) - 1
    for i in range(len(values) - 2, -1, -1):
        ok = values[i + 1] > values[i] if increasing else values[i + 1] < values[i]
        if ok:
            idx = i
        else:
            break
    return idx


def illposedness_table(cfg: ScanConfig, t_star: float) -> DivergenceTable:
    """Initial-data norms against the growth lower bound at a fixed time.

    The lower bound 2 pi (n-1)^{2 mu}/(2n+1) e^{sqrt(1-b^2) sqrt(n) t - 2 n^{1/4}}
    must increase strictly in n beyond the reported threshold; the initial-data
    norm trend is reported per row (it turns decreasing only once e^{-n^{1/4}}
    beats the polynomial factor, around n ~ (2 mu)^4... far out for mu >= 2).
    """
    if t_star < 0:
        raise ValueError("t_star must be nonnegative")
    b, mu = cfg.b, cfg.mu
    rows = []
    for n in cfg.n_list:
        amp = math.exp(-(n**0.25))
        bound = (
            2.0
            * math.pi
            * (n - 1) ** (2 * mu)
            / (2 * n + 1)
            * math.exp(math.sqrt(1.0 - b * b) * math.sqrt(n) * t_star - 2.0 * n**0.25)
        )
        init_norm = sobolev_norm(mu, HarmonicGradient({n + 1: amp / (n + 1)}))
        rows.append(DivergenceRow(n=n, t_star=t_star, init_norm=init_norm, lower_bound=bound))
    bounds = [r.lower_bound for r in rows]
    inits = [r.init_norm for r in rows]
    bound_idx = _monotone_threshold(bounds, increasing=True)
    init_idx = _monotone_threshold(inits, increasing=False)
    if t_star > 0:
        tail = bounds[bound_idx:]
        if any(b2 <= b1 for b1, b2 in zip(tail, tail[1:])):
            raise PropertyCheckError("lower bound not strictly increasing beyond threshold")
    return DivergenceTable(
        rows=tuple(rows),
        bound_threshold_index=bound_idx,
        init_norm_threshold_index=init_idx,
    )
