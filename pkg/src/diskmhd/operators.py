"""Exact elliptic solvers and operator algebra on the unit disk.

The Dirichlet inverse of the Laplacian, the harmonic (boundary-value)
projection, the Neumann harmonic solve, rotation-conjugated operators, and the
advection commutator identities verified by a finite-difference deformation
harness.  All solves are closed-form on monomials because every field in scope
is a polynomial.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

from .field import (
    BoundaryTrace,
    MonomialField,
    boundary_trace,
    compose,
    compose_rotation,
    grad,
    harmonic_from_trace,
    laplacian,
    rotation_map,
)

# Neumann data with nonzero mean flux is not solvable.
NEUMANN_COMPAT_TOL = 1e-10

# Deformation-derivative checks: central difference with one Richardson level.
# 1e-4 balances the 1/step roundoff amplification against (Richardson-removed)
# truncation for degree-8 inputs; smaller steps are noise-dominated.
FD_STEP = 1e-4


def dirichlet_inverse(g: MonomialField) -> MonomialField:
    """Solve Delta f = g on the disk with f = 0 on the boundary, exactly.

    Per monomial: Delta^{-1} z^j zbar^k = (z^{j+1} zbar^{k+1} - h_{jk}) / (4(j+1)(k+1))
    where h_{jk} is the harmonic monomial sharing the boundary trace.
    """
    out = MonomialField.zero()
    for (j, k), c in g.coeffs.items():
        m = j - k
        hkey = (m, 0) if m >= 0 else (0, -m)
        denom = 4.0 * (j + 1) * (k + 1)
        out = out + MonomialField(
            {(j + 1, k + 1): c / denom}
        ) - MonomialField({hkey: c / denom})
    return out


def harmonic_projection(f: MonomialField) -> MonomialField:
    """The harmonic field with the same boundary values: z^j zbar^k -> z^{j-k} or zbar^{k-j}."""
    out: dict = {}
    for (j, k), c in f.coeffs.items():
        key = (j - k, 0) if j >= k else (0, k - j)
        out[key] = out.get(key, 0.0) + c
    return MonomialField(out)


def neumann_harmonic(flux: BoundaryTrace) -> MonomialField:
    """Harmonic h with radial derivative matching the flux on the circle, h(0) = 0.

    On |z| = 1 the normal derivative of z^m is m e^{i m theta} and of zbar^m is
    m e^{-i m theta}, so each Fourier mode of the flux fixes one coefficient.
    """
    mean = flux.coeff(0)
    if abs(mean) > NEUMANN_COMPAT_TOL:
        raise ValueError(
            f"incompatible Neumann data: mean flux {abs(mean):.3e} exceeds "
            f"{NEUMANN_COMPAT_TOL:.0e}"
        )
    out: dict = {}
    for m, c in flux.fourier.items():
        if m == 0:
            continue
        key = (m, 0) if m > 0 else (0, -m)
        out[key] = out.get(key, 0.0) + c / abs(m)
    return MonomialField(out)


def advect(u: MonomialField, f: MonomialField) -> MonomialField:
    """Directional derivative u^1 d1 f + u^2 d2 f = u dz(f) + conj(u) dzbar(f).

    Works for scalar or vector f (componentwise in the complex encoding).
    """
    return u * f.dz() + u.conj() * f.dzbar()


@dataclass(frozen=True)
class ConjugatedOperator:
    """A base operator conjugated by the rotation of angle t.

    Applying it equals compose_rotation(t) o base o compose_rotation(-t).
    Base tags: gradient | laplacian | dirichlet_inverse | harmonic_projection
    | advection (with a direction field).
    """

    base_op: str
    angle: float
    direction: MonomialField | None = None

    def apply(self, f: MonomialField) -> MonomialField:
        g = compose_rotation(f, -self.angle)
        if self.base_op == "gradient":
            core = grad(g, check_real=False)
        elif self.base_op == "laplacian":
            core = laplacian(g)
        elif self.base_op == "dirichlet_inverse":
            core = dirichlet_inverse(g)
        elif self.base_op == "harmonic_projection":
            core = harmonic_projection(g)
        elif self.base_op == "advection":
            if self.direction is None:
                raise ValueError("advection requires a direction field")
            core = advect(self.direction, g)
        else:
            raise ValueError(f"unknown base operator {self.base_op!r}")
        return compose_rotation(core, self.angle)

    def __call__(self, f: MonomialField) -> MonomialField:
        return self.apply(f)


# -- symbolic commutator identities ------------------------------------------


def commutator_gradient(u: MonomialField, f: MonomialField) -> MonomialField:
    """[u.grad, grad] f  (complex-linear gradient, valid for complex scalars)."""
    return advect(u, grad(f, check_real=False)) - grad(advect(u, f), check_real=False)


def commutator_laplacian(u: MonomialField, f: MonomialField) -> MonomialField:
    """[u.grad, Delta] f."""
    return advect(u, laplacian(f)) - laplacian(advect(u, f))


def commutator_dirichlet_inverse(u: MonomialField, f: MonomialField) -> MonomialField:
    """([u.grad, Delta^{-1}] - H (u.grad) Delta^{-1}) f.

    The harmonic-projection term carries the moving-boundary part of the
    derivative of the conjugated inverse Laplacian.
    """
    pf = dirichlet_inverse(f)
    adv = advect(u, pf)
    return adv - dirichlet_inverse(advect(u, f)) - harmonic_projection(adv)


_SYMBOLIC = {
    1: commutator_gradient,
    2: commutator_laplacian,
    3: commutator_dirichlet_inverse,
}


def conjugated_commutator(identity_id: int, u: MonomialField, f: MonomialField, t: float) -> MonomialField:
    """Rotation-conjugated closed form of one commutator identity applied to f."""
    g = compose_rotation(f, -t)
    return compose_rotation(_SYMBOLIC[identity_id](u, g), t)


# -- finite-difference deformation harness -----------------------------------


def compose_displaced(g: MonomialField, delta: MonomialField,
                      max_order: int | None = None,
                      rel_tol: float = 1e-18) -> MonomialField:
    """Composition g(z + delta(z), conj) via the Wirtinger-Taylor sum.

    For polynomial g the sum over mixed derivatives is finite and the result
    exact; with max_order set, displacement powers beyond that total order are
    dropped (the remainder is O(delta^{max_order+1})).  Much better conditioned
    than generic polynomial powering when delta is a perturbation.
    """
    scale = max(g.norm_inf(), 1.0)
    deltabar = delta.conj()
    out = MonomialField.zero()
    # row[a] holds dz^a dzbar^b g / (a! b!) for the current b
    row = [g]
    while row[-1].coeffs:
        row.append(row[-1].dz().scale(1.0 / len(row)))
    pow_d = MonomialField.const(1.0)
    order_b = 0
    while True:
        a_cap = len(row) if max_order is None else min(len(row), max_order - order_b + 1)
        contrib = MonomialField.zero()
        pow_db = pow_d
        for a in range(a_cap):
            term = row[a]
            if term.coeffs:
                contrib = contrib + term * pow_db
            if a + 1 < a_cap:
                pow_db = pow_db * delta
        out = out + contrib
        order_b += 1
        if max_order is not None and order_b > max_order:
            break
        if contrib.norm_inf() < rel_tol * scale and order_b > 1:
            break
        nxt = [r.dzbar().scale(1.0 / order_b) for r in row]
        if not any(r.coeffs for r in nxt):
            break
        row = nxt
        pow_d = pow_d * deltabar
    return out


_FD_ORDER = 3  # displacement orders kept; Richardson extraction is exact on cubics


def _inverse_displacement(u: MonomialField, s: float, iters: int = 4) -> MonomialField:
    """delta with (Id + s u)^{-1} = Id + delta, by fixed point delta <- -s u(Id+delta)."""
    delta = u.scale(-s)
    for _ in range(iters):
        delta = compose_displaced(u, delta, max_order=_FD_ORDER - 1).scale(-s)
    return delta


def dirichlet_inverse_on_image(g: MonomialField, t: float, s: float,
                               u: MonomialField, iters: int = 8) -> MonomialField:
    """Solve Delta v = g on the image of the disk under (Id + s u) o rotation_t,
    with v = 0 on the image boundary.

    v = particular - harmonic correction; the zero-boundary condition in
    composed coordinates reads boundary_trace(v o zeta) = 0, and the correction
    iteration converges geometrically for maps near a rotation.
    """
    su = u.scale(s)
    part = dirichlet_inverse(g)
    corr = MonomialField.zero()
    for _ in range(iters):
        # v o zeta = (v o (Id + s u)) o R_t
        composed = compose_rotation(
            compose_displaced(part - corr, su, max_order=_FD_ORDER), t
        )
        resid = boundary_trace(composed)
        if resid.is_zero(1e-16 * max(part.norm_inf(), 1.0)):
            break
        # Undo the leading rotation phase so the update cancels resid at order one.
        corr = corr + harmonic_from_trace(resid.rotated(-t))
    return part - corr


def deformation_derivative(identity_id: int, u: MonomialField, f: MonomialField,
                           t: float, step: float = FD_STEP) -> MonomialField:
    """d/ds at s=0 of the conjugated operator family along the u-deformation.

    The family conjugates by zeta_s = (Id + s u) o rotation_t, so the Eulerian
    perturbation direction is u itself.  Identity 1: gradient, 2: Laplacian,
    3: Dirichlet inverse (moving domain).  Central differences at steps
    {step, 2*step} with one Richardson level.
    """
    f_rot = compose_rotation(f, -t)

    def family(s: float) -> MonomialField:
        # f o zeta^{-1} = (f o R_{-t}) o (Id + psi)
        psi = _inverse_displacement(u, s)
        f_e = compose_displaced(f_rot, psi, max_order=_FD_ORDER)
        if identity_id == 1:
            core = grad(f_e, check_real=False)
        elif identity_id == 2:
            core = laplacian(f_e)
        elif identity_id == 3:
            core = dirichlet_inverse_on_image(f_e, t, s, u)
        else:
            raise ValueError("identity_id must be 1, 2 or 3")
        # core o zeta = (core o (Id + s u)) o R_t
        return compose_rotation(
            compose_displaced(core, u.scale(s), max_order=_FD_ORDER), t
        )

    def central(h: float) -> MonomialField:
        return (family(h) - family(-h)).scale(1.0 / (2.0 * h))

    d1 = central(step)
    d2 = central(2.0 * step)
    return (d1.scale(4.0) - d2).scale(1.0 / 3.0)


def commutator_residual(identity_id: int, u: MonomialField, f: MonomialField,
                        t: float, step: float = FD_STEP) -> float:
    """Gap between the finite-difference deformation derivative and the closed
    commutator expression, at the rotation of angle t.

    Max coefficient of the difference, relative to the scale of the derivative
    itself (floored at one): the difference quotient amplifies float roundoff
    by 1/step, so only the scale-relative gap is meaningful for large inputs.
    """
    fd = deformation_derivative(identity_id, u, f, t, step=step)
    sym = conjugated_commutator(identity_id, u, f, t)
    scale = max(1.0, sym.norm_inf(), fd.norm_inf())
    return (fd - sym).norm_inf() / scale
