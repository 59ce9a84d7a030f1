"""Exact arithmetic and calculus on finite monomial expansions over the unit disk.

A field is a finite sum  sum_{j,k} c_{jk} z^j zbar^k  with complex coefficients,
stored sparsely.  Plane vector fields are identified with complex-valued fields
through (V1, V2) <-> V1 + i V2, so one representation serves scalars and vectors.
Wirtinger derivatives d/dz and d/dzbar make every differential operator here an
exact map between such expansions: no grids, no truncation error beyond float
roundoff.
"""

from __future__ import annotations

import cmath
import math

# Coefficients below this magnitude are float dust and are dropped after every
# arithmetic operation; all fields of interest are exact polynomials.
PRUNE_EPS = 1e-14

# Products grow total degree; fail loudly instead of silently exploding.
DEGREE_CAP = 256

# Tolerance for the conjugate-symmetry test deciding real-valuedness.
REAL_TOL = 1e-12


class DegreeCapError(ValueError):
    """Raised when an operation produces monomials beyond the degree cap."""


def _pruned(coeffs: dict) -> dict:
    return {jk: c for jk, c in coeffs.items() if abs(c) > PRUNE_EPS}


def _as_arrays(f: "MonomialField"):
    import numpy as np

    items = list(f.coeffs.items())
    j = np.fromiter((jk[0] for jk, _ in items), dtype=np.int64, count=len(items))
    k = np.fromiter((jk[1] for jk, _ in items), dtype=np.int64, count=len(items))
    c = np.fromiter((c for _, c in items), dtype=complex, count=len(items))
    return j, k, c


class MonomialField:
    """Sparse complex expansion sum c_{jk} z^j zbar^k on the unit disk.

    Immutable after construction; all operations return new instances.
    """

    __slots__ = ("coeffs", "max_degree")

    def __init__(self, coeffs: dict | None = None):
        cleaned = _pruned(coeffs or {})
        for (j, k) in cleaned:
            if j < 0 or k < 0:
                raise ValueError(f"negative exponent in monomial ({j},{k})")
        deg = max((j + k for j, k in cleaned), default=0)
        if deg > DEGREE_CAP:
            raise DegreeCapError(f"degree {deg} exceeds cap {DEGREE_CAP}")
        object.__setattr__(self, "coeffs", cleaned)
        object.__setattr__(self, "max_degree", deg)

    def __setattr__(self, name, value):
        raise AttributeError("MonomialField is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls) -> "MonomialField":
        return cls({})

    @classmethod
    def const(cls, c: complex) -> "MonomialField":
        return cls({(0, 0): complex(c)})

    @classmethod
    def monomial(cls, j: int, k: int, c: complex = 1.0) -> "MonomialField":
        return cls({(j, k): complex(c)})

    @classmethod
    def z(cls) -> "MonomialField":
        return cls({(1, 0): 1.0})

    @classmethod
    def zbar(cls, power: int = 1) -> "MonomialField":
        return cls({(0, power): 1.0})

    @classmethod
    def x1(cls) -> "MonomialField":
        return cls({(1, 0): 0.5, (0, 1): 0.5})

    @classmethod
    def x2(cls) -> "MonomialField":
        return cls({(1, 0): -0.5j, (0, 1): 0.5j})

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "MonomialField") -> "MonomialField":
        out = dict(self.coeffs)
        for jk, c in other.coeffs.items():
            out[jk] = out.get(jk, 0.0) + c
        return MonomialField(out)

    def __sub__(self, other: "MonomialField") -> "MonomialField":
        out = dict(self.coeffs)
        for jk, c in other.coeffs.items():
            out[jk] = out.get(jk, 0.0) - c
        return MonomialField(out)

    def __neg__(self) -> "MonomialField":
        return MonomialField({jk: -c for jk, c in self.coeffs.items()})

    def __mul__(self, other):
        if not isinstance(other, MonomialField):
            return self.scale(other)
        n_pairs = len(self.coeffs) * len(other.coeffs)
        if n_pairs > 512:
            return self._mul_grid(other)
        out: dict = {}
        for (j1, k1), c1 in self.coeffs.items():
            for (j2, k2), c2 in other.coeffs.items():
                jk = (j1 + j2, k1 + k2)
                out[jk] = out.get(jk, 0.0) + c1 * c2
        return MonomialField(out)

    def _mul_grid(self, other: "MonomialField") -> "MonomialField":
        # dense-grid accumulation; faster than dict loops for big products
        import numpy as np

        j1, k1, c1 = _as_arrays(self)
        j2, k2, c2 = _as_arrays(other)
        grid = np.zeros(
            (int(j1.max() + j2.max()) + 1, int(k1.max() + k2.max()) + 1),
            dtype=complex,
        )
        jj = (j1[:, None] + j2[None, :]).ravel()
        kk = (k1[:, None] + k2[None, :]).ravel()
        cc = (c1[:, None] * c2[None, :]).ravel()
        np.add.at(grid, (jj, kk), cc)
        nz = np.argwhere(np.abs(grid) > PRUNE_EPS)
        return MonomialField(
            {(int(j), int(k)): complex(grid[j, k]) for j, k in nz}
        )

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, c: complex) -> "MonomialField":
        c = complex(c)
        return MonomialField({jk: c * v for jk, v in self.coeffs.items()})

    def conj(self) -> "MonomialField":
        """Pointwise complex conjugate field: coefficients conjugate, (j,k) swaps."""
        return MonomialField({(k, j): v.conjugate() for (j, k), v in self.coeffs.items()})

    def real_part(self) -> "MonomialField":
        return (self + self.conj()).scale(0.5)

    def imag_part(self) -> "MonomialField":
        return (self - self.conj()).scale(-0.5j)

    # -- calculus ----------------------------------------------------------

    def dz(self) -> "MonomialField":
        """Wirtinger derivative d/dz = (d1 - i d2)/2."""
        return MonomialField(
            {(j - 1, k): j * c for (j, k), c in self.coeffs.items() if j > 0}
        )

    def dzbar(self) -> "MonomialField":
        """Wirtinger derivative d/dzbar = (d1 + i d2)/2."""
        return MonomialField(
            {(j, k - 1): k * c for (j, k), c in self.coeffs.items() if k > 0}
        )

    def partial(self, axis: int) -> "MonomialField":
        """Cartesian partial derivative, axis 1 or 2."""
        if axis == 1:
            return self.dz() + self.dzbar()
        if axis == 2:
            return (self.dz() - self.dzbar()).scale(1j)
        raise ValueError("axis must be 1 or 2")

    # -- queries -----------------------------------------------------------

    def norm_inf(self) -> float:
        """Largest coefficient magnitude."""
        return max((abs(c) for c in self.coeffs.values()), default=0.0)

    def is_zero(self, tol: float = PRUNE_EPS) -> bool:
        return self.norm_inf() <= tol

    def is_real(self, tol: float = REAL_TOL) -> bool:
        """Real-valuedness on the disk, i.e. conjugate symmetry c_{jk} = conj(c_{kj})."""
        return (self - self.conj()).norm_inf() <= tol

    def coeff(self, j: int, k: int) -> complex:
        return self.coeffs.get((j, k), 0.0)

    def __call__(self, z):
        """Evaluate at complex points (scalar or numpy array)."""
        total = 0.0 * z
        zc = z.conjugate() if not hasattr(z, "conj") else z.conj()
        for (j, k), c in self.coeffs.items():
            total = total + c * z**j * zc**k
        return total

    def __repr__(self) -> str:
        if not self.coeffs:
            return "MonomialField(0)"
        parts = [
            f"({c:.6g})*z^{j}*zb^{k}" for (j, k), c in sorted(self.coeffs.items())
        ]
        return "MonomialField(" + " + ".join(parts) + ")"

    # -- serialization -----------------------------------------------------

    def to_json_obj(self) -> list:
        """JSON form: array of {"j","k","re","im"} sorted by (j, k)."""
        return [
            {"j": j, "k": k, "re": c.real, "im": c.imag}
            for (j, k), c in sorted(self.coeffs.items())
        ]

    @classmethod
    def from_json_obj(cls, items: list) -> "MonomialField":
        return cls(
            {(int(d["j"]), int(d["k"])): complex(d["re"], d["im"]) for d in items}
        )


class BoundaryTrace:
    """Restriction of a field to the unit circle, as a Fourier series in e^{i m theta}."""

    __slots__ = ("fourier",)

    def __init__(self, fourier: dict | None = None):
        object.__setattr__(
            self, "fourier", {m: c for m, c in (fourier or {}).items() if abs(c) > PRUNE_EPS}
        )

    def __setattr__(self, name, value):
        raise AttributeError("BoundaryTrace is immutable")

    def coeff(self, m: int) -> complex:
        return self.fourier.get(m, 0.0)

    def norm_inf(self) -> float:
        return max((abs(c) for c in self.fourier.values()), default=0.0)

    def is_zero(self, tol: float = PRUNE_EPS) -> bool:
        return self.norm_inf() <= tol

    def __sub__(self, other: "BoundaryTrace") -> "BoundaryTrace":
        out = dict(self.fourier)
        for m, c in other.fourier.items():
            out[m] = out.get(m, 0.0) - c
        return BoundaryTrace(out)

    def rotated(self, t: float) -> "BoundaryTrace":
        """Trace of the same field precomposed with rotation by angle t."""
        return BoundaryTrace(
            {m: c * cmath.exp(1j * m * t) for m, c in self.fourier.items()}
        )

    def __repr__(self) -> str:
        return f"BoundaryTrace({self.fourier!r})"


# -- module-level operations ------------------------------------------------


def grad(phi: MonomialField, check_real: bool = True) -> MonomialField:
    """Gradient of a real scalar as the complex field d1(phi) + i d2(phi) = 2 dzbar(phi)."""
    if check_real and not phi.is_real():
        raise ValueError("grad expects a real-valued scalar field")
    return phi.dzbar().scale(2.0)


def divergence(v: MonomialField) -> MonomialField:
    """div(V1, V2) for V = V1 + i V2, i.e. the real-part field of 2 dz(V)."""
    return v.dz().scale(2.0).real_part()


def laplacian(f: MonomialField) -> MonomialField:
    """Delta = 4 dz dzbar, exact on monomials: z^j zbar^k -> 4jk z^{j-1} zbar^{k-1}."""
    return MonomialField(
        {
            (j - 1, k - 1): 4.0 * j * k * c
            for (j, k), c in f.coeffs.items()
            if j > 0 and k > 0
        }
    )


def jacobian(v: MonomialField) -> tuple:
    """Real 2x2 Jacobian of the vector field V = V1 + i V2; entry [i][j] is dV^i/dx^j."""
    v1, v2 = v.real_part(), v.imag_part()
    return (
        (v1.partial(1), v1.partial(2)),
        (v2.partial(1), v2.partial(2)),
    )


def trace_of_square(v: MonomialField) -> MonomialField:
    """tr((DV)^2) = sum_ij dV^i/dx^j * dV^j/dx^i, a real scalar field."""
    d = jacobian(v)
    out = MonomialField.zero()
    for i in range(2):
        for j in range(2):
            out = out + d[i][j] * d[j][i]
    return out


def l2_inner(f: MonomialField, g: MonomialField) -> complex:
    """Disk inner product integral of f * conj(g).

    Monomial pairs couple only when their angular frequencies j-k agree; each
    coupled pair contributes pi / (m+1) with m the common half total degree.
    """
    by_freq: dict = {}
    for (j, k), c in g.coeffs.items():
        by_freq.setdefault(j - k, []).append((j, k, c))
    total = 0.0 + 0.0j
    for (j, k), c in f.coeffs.items():
        for (j2, k2, c2) in by_freq.get(j - k, ()):
            m = j + k2  # equals k + j2 when frequencies match
            total += c * c2.conjugate() * math.pi / (m + 1)
    return total


def l2_norm(f: MonomialField) -> float:
    return math.sqrt(max(l2_inner(f, f).real, 0.0))


def boundary_trace(f: MonomialField) -> BoundaryTrace:
    """Restrict to |z| = 1: monomial z^j zbar^k contributes to frequency j - k."""
    out: dict = {}
    for (j, k), c in f.coeffs.items():
        m = j - k
        out[m] = out.get(m, 0.0) + c
    return BoundaryTrace(out)


def harmonic_from_trace(tr: BoundaryTrace) -> MonomialField:
    """The harmonic field whose boundary trace is the given Fourier series."""
    out: dict = {}
    for m, c in tr.fourier.items():
        key = (m, 0) if m >= 0 else (0, -m)
        out[key] = out.get(key, 0.0) + c
    return MonomialField(out)


def compose_rotation(f: MonomialField, t: float) -> MonomialField:
    """Pullback by the rotation z -> e^{it} z:  z^j zbar^k picks up e^{i(j-k)t}."""
    return MonomialField(
        {(j, k): c * cmath.exp(1j * (j - k) * t) for (j, k), c in f.coeffs.items()}
    )


def compose(f: MonomialField, phi: MonomialField) -> MonomialField:
    """Composition f(phi(z), conj(phi(z))) for a polynomial map phi.

    Exact polynomial substitution; degrees multiply, so keep inputs modest.
    """
    max_j = max((j for j, _ in f.coeffs), default=0)
    max_k = max((k for _, k in f.coeffs), default=0)
    phibar = phi.conj()
    pow_p = [MonomialField.const(1.0)]
    for _ in range(max_j):
        pow_p.append(pow_p[-1] * phi)
    pow_q = [MonomialField.const(1.0)]
    for _ in range(max_k):
        pow_q.append(pow_q[-1] * phibar)
    out = MonomialField.zero()
    for (j, k), c in f.coeffs.items():
        out = out + (pow_p[j] * pow_q[k]).scale(c)
    return out


def rotation_map(t: float) -> MonomialField:
    """The map z -> e^{it} z as a field."""
    return MonomialField({(1, 0): cmath.exp(1j * t)})
