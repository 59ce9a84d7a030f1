"""Linearized evolution about the rotating column.

The second-order equation for the perturbation w of the flow map is assembled
from five pieces: the advection commutator acting on the constant pressure
source, the elliptic response to the linearized velocity source, two magnetic
pressure couplings with constant-coefficient kernels, and the rotating drive
term b^2 e^{it} eta.  Closed-form growing modes and a fixed-step RK4 integrator
cross-validate each other.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .field import MonomialField, compose_rotation, divergence, grad
from .operators import advect, dirichlet_inverse, harmonic_projection


class IntegrationError(RuntimeError):
    """Numerical failure (non-finite coefficients) during time integration."""

    def __init__(self, message: str, t: float):
        super().__init__(message)
        self.t = t


@dataclass(frozen=True)
class LinState:
    """Perturbation w of the flow map and its velocity at time t."""

    w: MonomialField
    w_dot: MonomialField
    t: float


@dataclass(frozen=True)
class ModeSolution:
    """Closed-form growing mode of index n at magnetic strength b.

    The zbar^n amplitude grows like sinh(B t) with B = sqrt((1-b^2)(n-1)); the
    z-direction part is the response to the rotating drive at the same rate.
    """

    n: int
    b: float
    B: float
    C1: complex
    C2: complex

    @classmethod
    def create(cls, n: int, b: float) -> "ModeSolution":
        _validate_mode(n, b)
        rate = math.sqrt((1.0 - b * b) * (n - 1))
        amp = math.exp(-(n**0.25))
        c1 = amp / (2.0 * rate)
        return cls(n=n, b=b, B=rate, C1=c1, C2=-c1)


def _validate_mode(n: int, b: float) -> None:
    if n < 2:
        raise ValueError("mode index n must be at least 2")
    if not b * b < 1.0:
        raise ValueError("magnetic strength must satisfy b^2 < 1")


def _mode_scalars(n: int, b: float) -> tuple:
    rate = math.sqrt((1.0 - b * b) * (n - 1))
    den = (1.0 - b * b) * (n - 1) + 4.0
    amp = math.exp(-(n**0.25))
    return rate, den, amp


def mode_closed_form(n: int, b: float, t: float) -> MonomialField:
    """The growing-mode perturbation w_n(t) with data w(0)=0, w_dot(0)=e^{-n^{1/4}} zbar^n."""
    _validate_mode(n, b)
    rate, den, amp = _mode_scalars(n, b)
    b2 = b * b
    zbar_coef = amp * math.sinh(rate * t) / rate
    z_coef = b2 * (math.cosh(rate * t) - cmath.exp(2j * t)) / den
    z_coef += 2j * b2 * math.sinh(rate * t) / (rate * den)
    return MonomialField({(0, n): zbar_coef, (1, 0): z_coef})


def mode_closed_form_velocity(n: int, b: float, t: float) -> MonomialField:
    _validate_mode(n, b)
    rate, den, amp = _mode_scalars(n, b)
    b2 = b * b
    zbar_coef = amp * math.cosh(rate * t)
    z_coef = b2 * (rate * math.sinh(rate * t) - 2j * cmath.exp(2j * t)) / den
    z_coef += 2j * b2 * math.cosh(rate * t) / den
    return MonomialField({(0, n): zbar_coef, (1, 0): z_coef})


def mode_closed_form_acceleration(n: int, b: float, t: float) -> MonomialField:
    _validate_mode(n, b)
    rate, den, amp = _mode_scalars(n, b)
    b2 = b * b
    zbar_coef = amp * rate * math.sinh(rate * t)
    z_coef = b2 * (rate * rate * math.cosh(rate * t) + 4.0 * cmath.exp(2j * t)) / den
    z_coef += 2j * b2 * rate * math.sinh(rate * t) / den
    return MonomialField({(0, n): zbar_coef, (1, 0): z_coef})


def mode_initial_state(n: int, b: float) -> LinState:
    return LinState(
        w=MonomialField.zero(),
        w_dot=MonomialField.zbar(n).scale(math.exp(-(n**0.25))),
        t=0.0,
    )


# -- assembled right-hand side -------------------------------------------------

_PRESSURE_POTENTIAL = dirichlet_inverse(MonomialField.const(-2.0))  # (1 - z zbar)/2


def _magnetic_kernels(b: float) -> list:
    """Rotation-frame kernels d_i(H0^k H0^l) for the quadratic magnetic coupling."""
    h = (
        MonomialField.x2().scale(-b),  # first component of ibz
        MonomialField.x1().scale(b),  # second component
    )
    kernels = []
    for i in (1, 2):
        row = []
        for k in (0, 1):
            row.append([(h[k] * h[m]).partial(i) for m in (0, 1)])
        kernels.append(row)
    return kernels


def _trace_rotated_jacobian(f: MonomialField, phase: complex) -> MonomialField:
    """The real field tr(R Df) = 2 Re(phase * dz f) for a rotation R of that phase."""
    half = f.dz().scale(phase)
    return half + half.conj()


def linearized_rhs(state: LinState, b: float) -> MonomialField:
    """Acceleration of the perturbation, assembled term by term.

    Pieces: (1) the advection commutator and harmonic-projection correction
    acting on the constant pressure source, weighted 1-b^2; (2) the elliptic
    response to the linearized velocity source; (3)+(4) the two magnetic
    couplings with constant kernels built from ibz; (5) the rotating drive
    b^2 e^{it} eta.
    """
    w, wd, t = state.w, state.w_dot, state.t
    b2 = b * b
    eit = cmath.exp(1j * t)
    u = compose_rotation(w, -t)

    def solve_rotated(source: MonomialField) -> MonomialField:
        # conjugated grad(Dirichlet inverse) applied to a rotation-frame source
        unrot = compose_rotation(source, -t)
        return compose_rotation(grad(dirichlet_inverse(unrot), check_real=False), t)

    # (1) commutator group on the constant source -2
    phi = _PRESSURE_POTENTIAL
    comm = advect(u, grad(phi)) - grad(
        dirichlet_inverse(advect(u, MonomialField.const(-2.0))), check_real=False
    )
    bdry = grad(harmonic_projection(advect(u, phi)), check_real=False)
    line1 = compose_rotation(comm - bdry, t).scale(1.0 - b2)

    # (2) elliptic response to the linearized velocity source
    s2 = compose_rotation(divergence(u), t).scale(2.0) + _trace_rotated_jacobian(
        wd, 1j * cmath.exp(-1j * t)
    ).scale(2.0)
    line2 = solve_rotated(s2)

    # (3) quadratic magnetic coupling against second derivatives of w
    line3 = MonomialField.zero()
    if b2 != 0.0 and w.max_degree >= 2:
        kernels = _magnetic_kernels(b)
        comps = (w.real_part(), w.imag_part())
        s3 = MonomialField.zero()
        for i in (0, 1):
            d1 = (comps[i].partial(1), comps[i].partial(2))
            for k in (0, 1):
                for m in (0, 1):
                    second = d1[k].partial(m + 1)
                    s3 = s3 + second * compose_rotation(kernels[i][k][m], t)
        line3 = -solve_rotated(s3)

    # (4) linear magnetic coupling: the kernel contraction reduces to -2 b^2 div w
    line4 = MonomialField.zero()
    if b2 != 0.0:
        s4 = divergence(w).scale(-2.0 * b2)
        line4 = -solve_rotated(s4).scale(eit)

    # (5) rotating drive
    line5 = MonomialField.monomial(1, 0, b2 * eit * eit)

    return line1 + line2 + line3 + line4 + line5


def linearized_rhs_terms(state: LinState, b: float) -> dict:
    """Individual assembly pieces, for diagnostics (same math as linearized_rhs)."""
    w, wd, t = state.w, state.w_dot, state.t
    full = linearized_rhs(state, b)
    zero_vel = LinState(w=w, w_dot=MonomialField.zero(), t=t)
    drive = MonomialField.monomial(1, 0, b * b * cmath.exp(2j * t))
    return {
        "total": full,
        "drive": drive,
        "homogeneous": full - drive,
        "velocity_only": linearized_rhs(zero_vel, b) - drive,
    }


# -- integrators ---------------------------------------------------------------


def _check_finite(f: MonomialField, t: float) -> None:
    for c in f.coeffs.values():
        if not (math.isfinite(c.real) and math.isfinite(c.imag)):
            raise IntegrationError(f"non-finite coefficient at t={t:.6g}", t)


def integrate_linearized(init: LinState, b: float, t_end: float, dt: float,
                         sample_every: int = 1) -> list:
    """Classical fixed-step RK4 on the second-order system (w, w_dot).

    Returns the sampled states, always including the initial and final one.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if t_end < init.t:
        raise ValueError("t_end must not precede the initial time")
    n_steps = max(1, round((t_end - init.t) / dt)) if t_end > init.t else 0
    states = [init]
    w, wd, t = init.w, init.w_dot, init.t

    def accel(wa: MonomialField, wda: MonomialField, ta: float) -> MonomialField:
        return linearized_rhs(LinState(w=wa, w_dot=wda, t=ta), b)

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
        _check_finite(w, t)
        _check_finite(wd, t)
        if (step + 1) % sample_every == 0 or step == n_steps - 1:
            states.append(LinState(w=w, w_dot=wd, t=t))
    return states


@dataclass(frozen=True)
class ModeSample:
    """One time sample of the per-mode amplitudes (zbar^n and z directions)."""

    t: float
    sigma: complex
    sigma_dot: complex
    zpart: complex
    zpart_dot: complex

    def reconstruct(self, n: int) -> MonomialField:
        return MonomialField({(0, n): self.sigma, (1, 0): self.zpart})

    def reconstruct_velocity(self, n: int) -> MonomialField:
        return MonomialField({(0, n): self.sigma_dot, (1, 0): self.zpart_dot})


def integrate_mode(n: int, b: float, t_end: float, dt: float) -> list:
    """RK4 on the per-mode scalar system.

    The zbar^n amplitude obeys sigma'' = B^2 sigma; the z amplitude feels the
    same multiplier plus the rotating drive b^2 e^{2it}.  Initial data matches
    the closed form: sigma(0)=0, sigma'(0)=e^{-n^{1/4}}.
    """
    _validate_mode(n, b)
    if dt <= 0:
        raise ValueError("dt must be positive")
    rate, _, amp = _mode_scalars(n, b)
    b2sq = rate * rate
    b2 = b * b

    def deriv(t: float, y: tuple) -> tuple:
        sigma, sdot, zp, zpdot = y
        return (sdot, b2sq * sigma, zpdot, b2sq * zp + b2 * cmath.exp(2j * t))

    y = (0.0 + 0.0j, amp + 0.0j, 0.0 + 0.0j, 0.0 + 0.0j)
    t = 0.0
    samples = [ModeSample(t, *y)]
    n_steps = max(1, round(t_end / dt)) if t_end > 0 else 0
    for step in range(n_steps):
        k1 = deriv(t, y)
        k2 = deriv(t + dt / 2, tuple(y[i] + dt / 2 * k1[i] for i in range(4)))
        k3 = deriv(t + dt / 2, tuple(y[i] + dt / 2 * k2[i] for i in range(4)))
        k4 = deriv(t + dt, tuple(y[i] + dt * k3[i] for i in range(4)))
        y = tuple(
            y[i] + dt / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]) for i in range(4)
        )
        t = (step + 1) * dt
        samples.append(ModeSample(t, *y))
    return samples


def closed_form_residual(n: int, b: float, t_samples: list) -> float:
    """Max gap between the closed-form acceleration and the assembled equation.

    A nonzero value localizes where the printed mode family and the assembled
    operator disagree; see the mode-dynamics notes in the README.
    """
    worst = 0.0
    for t in t_samples:
        state = LinState(
            w=mode_closed_form(n, b, t),
            w_dot=mode_closed_form_velocity(n, b, t),
            t=t,
        )
        gap = (mode_closed_form_acceleration(n, b, t) - linearized_rhs(state, b)).norm_inf()
        worst = max(worst, gap)
    return worst
