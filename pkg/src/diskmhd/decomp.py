"""Three-way splitting of perturbations and the spectral Sobolev energy calculus.

A field y splits L2-orthogonally as grad(f) + grad(g) + N: the gradient parts
come from the harmonic function matching the normal flux of the divergence-free
projection of y, split at mode threshold n; N is the remainder.  Harmonic
gradients carry a diagonal fractional calculus (factor (m-2)^s on the basis
element m zbar^{m-1}) from which the growth energies are built.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field as dc_field

from .field import (
    MonomialField,
    boundary_trace,
    divergence,
    grad,
    l2_inner,
    l2_norm,
)
from .linear import LinState, linearized_rhs
from .operators import dirichlet_inverse, neumann_harmonic

HG_SUPPORT_TOL = 1e-12


class HarmonicGradient:
    """Expansion over the harmonic-gradient basis {m zbar^{m-1}}, m >= 1.

    modes maps the basis index m to a complex amplitude c_m; the represented
    field is sum c_m m zbar^{m-1}.  Complex amplitudes span both real basis
    elements m zbar^{m-1} and i m zbar^{m-1}.
    """

    __slots__ = ("modes",)

    def __init__(self, modes: dict | None = None):
        object.__setattr__(
            self,
            "modes",
            {m: c for m, c in (modes or {}).items() if abs(c) > 1e-300},
        )
        for m in self.modes:
            if m < 1:
                raise ValueError("basis index must be >= 1")

    def __setattr__(self, name, value):
        raise AttributeError("HarmonicGradient is immutable")

    def to_field(self) -> MonomialField:
        return MonomialField({(0, m - 1): m * c for m, c in self.modes.items()})

    @classmethod
    def from_field(cls, v: MonomialField, tol: float = HG_SUPPORT_TOL) -> "HarmonicGradient":
        modes = {}
        scale = max(v.norm_inf(), 1.0)
        for (j, k), c in v.coeffs.items():
            if j != 0:
                if abs(c) > tol * scale:
                    raise ValueError(f"field has non-gradient monomial z^{j} zbar^{k}")
                continue
            modes[k + 1] = c / (k + 1)
        return cls(modes)

    def is_zero(self, tol: float = 1e-14) -> bool:
        return all(abs(c) <= tol for c in self.modes.values())

    def __add__(self, other: "HarmonicGradient") -> "HarmonicGradient":
        out = dict(self.modes)
        for m, c in other.modes.items():
            out[m] = out.get(m, 0.0) + c
        return HarmonicGradient(out)

    def scale(self, c: complex) -> "HarmonicGradient":
        return HarmonicGradient({m: c * v for m, v in self.modes.items()})


def a_power(s: float, hg: HarmonicGradient) -> HarmonicGradient:
    """Diagonal fractional power: basis element m zbar^{m-1} scales by (m-2)^s.

    The m=2 element is annihilated for s > 0 (zero factor); negative powers are
    undefined when it is present.  The m=1 element has factor (-1)^s, defined
    only for integer s.
    """
    out = {}
    for m, c in hg.modes.items():
        lam = m - 2
        if lam == 0:
            if s > 0:
                continue
            if s == 0:
                out[m] = c
                continue
            raise ValueError("negative power undefined: zero-eigenvalue mode present")
        if lam < 0 and s != int(s):
            raise ValueError(
                "fractional power undefined on the constant-gradient mode (m=1)"
            )
        out[m] = c * (float(lam) ** s if lam > 0 else float(lam) ** int(s))
    return HarmonicGradient(out)


def sobolev_norm(s: float, hg: HarmonicGradient) -> float:
    """Spectral Sobolev norm of a harmonic gradient: L2 norm of a_power(s, .).

    Computed mode-diagonally (basis elements are L2-orthogonal with squared
    norm pi m), so arbitrarily high modes cost nothing and skip the field
    degree cap.
    """
    weighted = a_power(s, hg)
    return math.sqrt(
        math.pi * sum(m * abs(c) ** 2 for m, c in weighted.modes.items())
    )


def sobolev_norm_field(sigma: float, v: MonomialField) -> float:
    """Derivative-sum Sobolev norm for general fields (integer order; half
    orders round up)."""
    order = math.ceil(sigma)
    total = 0.0
    level = [v]
    total += l2_inner(v, v).real
    for _ in range(order):
        nxt = []
        for f in level:
            nxt.append(f.partial(1))
            nxt.append(f.partial(2))
        level = nxt
        total += sum(l2_inner(f, f).real for f in level)
    return math.sqrt(max(total, 0.0))


@dataclass(frozen=True)
class DecompState:
    """Orthogonal split of a perturbation and its velocity at mode threshold n."""

    grad_f: HarmonicGradient
    grad_g: HarmonicGradient
    n_part: MonomialField
    grad_f_dot: HarmonicGradient
    grad_g_dot: HarmonicGradient
    n_part_dot: MonomialField
    n: int
    t: float = 0.0

    def reassemble(self) -> MonomialField:
        return self.grad_f.to_field() + self.grad_g.to_field() + self.n_part

    def reassemble_velocity(self) -> MonomialField:
        return (
            self.grad_f_dot.to_field() + self.grad_g_dot.to_field() + self.n_part_dot
        )


def _split_single(y: MonomialField, n: int) -> tuple:
    """One field -> (grad_f, grad_g, N)."""
    pot = dirichlet_inverse(divergence(y))
    div_free = y - grad(pot)
    # normal flux of the divergence-free part on the circle
    flux_field = (div_free * MonomialField.zbar() + div_free.conj() * MonomialField.z()).scale(0.5)
    flux = boundary_trace(flux_field)
    if abs(flux.coeff(0)) > 1e-10:
        raise ValueError(
            "net boundary outflow after divergence-free projection; "
            "upstream field is inconsistent"
        )
    h = neumann_harmonic(flux)
    grad_h = grad(h)
    hg_all = HarmonicGradient.from_field(grad_h)
    low = HarmonicGradient({m: c for m, c in hg_all.modes.items() if m < n})
    high = HarmonicGradient({m: c for m, c in hg_all.modes.items() if m >= n})
    n_part = y - grad_h
    return high, low, n_part


def decompose(y: MonomialField, y_dot: MonomialField, n: int) -> DecompState:
    """Split y (and its velocity) into grad f + grad g + N at threshold n.

    grad g collects harmonic-gradient modes of index below n, grad f the rest;
    N = y - grad h carries everything the harmonic flux match cannot see.
    """
    if n < 2:
        raise ValueError("threshold n must be at least 2")
    f_hi, g_lo, n_part = _split_single(y, n)
    fd_hi, gd_lo, nd_part = _split_single(y_dot, n)
    return DecompState(
        grad_f=f_hi,
        grad_g=g_lo,
        n_part=n_part,
        grad_f_dot=fd_hi,
        grad_g_dot=gd_lo,
        n_part_dot=nd_part,
        n=n,
    )


@dataclass(frozen=True)
class EnergyReport:
    """Growth energies and invariant-set flags at one time sample."""

    E_plus: float
    E_minus: float
    E: float
    E_plus_quarter: float
    F: float
    G: float
    invariant_flags: tuple
    n: int
    b: float
    mu: float
    t: float
    annihilated_mode_present: bool = dc_field(default=False)


def _pm_energy(state: DecompState, b: float, mu: float, sign: float) -> float:
    root = math.sqrt(1.0 - b * b)
    half = a_power(0.5, state.grad_f)
    combo = state.grad_f_dot + half.scale(sign * root)
    return sobolev_norm(mu, combo) ** 2


def energies(state: DecompState, b: float, mu: float, sigma: float, nu: float,
             t: float | None = None) -> EnergyReport:
    """Energies of the three parts: E+/- from grad f, F from N, G from grad g.

    E carries the spectral mu-norm, F the derivative-sum sigma-norm scaled by
    the threshold n, G the spectral nu-norm.  Flags evaluate the invariant-set
    inequalities with a small relative slack.
    """
    if not b * b < 1.0:
        raise ValueError("b^2 must be below 1")
    tval = state.t if t is None else t
    e_plus = _pm_energy(state, b, mu, +1.0)
    e_minus = _pm_energy(state, b, mu, -1.0)
    e_plus_quarter = _pm_energy(state, b, mu + 0.25, +1.0)
    f_val = (
        state.n * sobolev_norm_field(sigma, state.n_part) ** 2
        + sobolev_norm_field(sigma, state.n_part_dot) ** 2
    )
    g_val = (
        sobolev_norm(nu, state.grad_g_dot) ** 2
        + sobolev_norm(nu, a_power(0.5, state.grad_g)) ** 2
    )
    annihilated = 2 in state.grad_f.modes or 2 in state.grad_g.modes
    report = EnergyReport(
        E_plus=e_plus,
        E_minus=e_minus,
        E=e_plus + e_minus,
        E_plus_quarter=e_plus_quarter,
        F=f_val,
        G=g_val,
        invariant_flags=(),
        n=state.n,
        b=b,
        mu=mu,
        t=tval,
        annihilated_mode_present=annihilated,
    )
    flags = invariant_check(report)
    return EnergyReport(
        E_plus=report.E_plus,
        E_minus=report.E_minus,
        E=report.E,
        E_plus_quarter=report.E_plus_quarter,
        F=report.F,
        G=report.G,
        invariant_flags=flags,
        n=report.n,
        b=report.b,
        mu=report.mu,
        t=report.t,
        annihilated_mode_present=annihilated,
    )


def invariant_check(report: EnergyReport, eps_check: float = 1e-9) -> tuple:
    """The three invariant-set inequalities, with relative slack for float safety.

    (1) E+ >= E-;  (2) E+ >= sqrt(n) F  (F taken at index mu+1);
    (3) E+ at mu+1/4 >= 2 sqrt(1-b^2)/(2-b^2) n^{3/4} G  (G at index mu).
    """
    n, b = report.n, report.b

    def holds(lhs: float, rhs: float) -> bool:
        slack = eps_check * max(1.0, abs(lhs), abs(rhs))
        return lhs + slack >= rhs

    first = holds(report.E_plus, report.E_minus)
    second = holds(report.E_plus, math.sqrt(n) * report.F)
    coef = 2.0 * math.sqrt(1.0 - b * b) / (2.0 - b * b)
    third = holds(report.E_plus_quarter, coef * n**0.75 * report.G)
    return (first, second, third)


# -- decomposed integrator -----------------------------------------------------

FORCING_PLACEMENTS = ("n_equation", "f_g_equations", "split")


def _project_state(w: MonomialField, wd: MonomialField, n: int, t: float) -> DecompState:
    st = decompose(w, wd, n)
    return DecompState(
        grad_f=st.grad_f,
        grad_g=st.grad_g,
        n_part=st.n_part,
        grad_f_dot=st.grad_f_dot,
        grad_g_dot=st.grad_g_dot,
        n_part_dot=st.n_part_dot,
        n=n,
        t=t,
    )


def integrate_decomposed(init: DecompState, b: float, t_end: float, dt: float,
                         forcing_placement: str = "n_equation") -> list:
    """RK4 on the sector-projected system.

    The homogeneous acceleration is the assembled linearized operator projected
    onto the three sectors each step; the rotating drive is routed to the
    sector named by forcing_placement.  Routing it to the gradient sectors
    annihilates it (the drive is a pure N-direction field), which is why
    n_equation is the default; "split" decomposes the drive, landing in N.
    """
    if forcing_placement not in FORCING_PLACEMENTS:
        raise ValueError(f"forcing_placement must be one of {FORCING_PLACEMENTS}")
    if dt <= 0:
        raise ValueError("dt must be positive")
    n = init.n
    b2 = b * b

    def accel(w: MonomialField, wd: MonomialField, t: float) -> MonomialField:
        full = linearized_rhs(LinState(w=w, w_dot=wd, t=t), b)
        if forcing_placement == "n_equation":
            return full
        drive = MonomialField.monomial(1, 0, b2 * cmath.exp(2j * t))
        homog = full - drive
        ds = decompose(drive, MonomialField.zero(), n)
        if forcing_placement == "split":
            return homog + ds.reassemble()
        # f_g_equations: keep only the gradient-sector projection of the drive
        return homog + ds.grad_f.to_field() + ds.grad_g.to_field()

    w = init.reassemble()
    wd = init.reassemble_velocity()
    t = init.t
    out = [_project_state(w, wd, n, t)]
    n_steps = max(1, round((t_end - t) / dt)) if t_end > t else 0
    for step in range(n_steps):
        k1w, k1v = wd, accel(w, wd, t)
        k2w = wd + k1v.scale(dt / 2.0)
        k2v = accel(w + k1w.scale(dt / 2.0), k2w, t + dt / 2.0)
        k3w = wd + k2v.scale(dt / 2.0)
        k3v = accel(w + k2w.scale(dt / 2.0), k3w, t + dt / 2.0)
        k4w = wd + k3v.scale(dt)
        k4v = accel(w + k3w.scale(dt), k4w, t + dt)
        w = w + (k1w + k2w.scale(2.0) + k3w.scale(2.0) + k4w).scale(dt / 6.0)
        wd = wd + (k1v + k2v.scale(2.0) + k3v.scale(2.0) + k4v).scale(dt / 6.0)
        t = init.t + (step + 1) * dt
        out.append(_project_state(w, wd, n, t))
    return out


def orthogonality_defect(state: DecompState) -> float:
    """Largest pairwise L2 inner product among the three parts."""
    parts = (state.grad_f.to_field(), state.grad_g.to_field(), state.n_part)
    worst = 0.0
    for i in range(3):
        for j in range(i + 1, 3):
            worst = max(worst, abs(l2_inner(parts[i], parts[j])))
    return worst
