"""Second-order jets along curves s -> p exp(sX) and the operators they induce.

The curve jet uses the exact order-2 expansion p (I + sX + s^2 X^2 / 2); the
truncation introduces no error in the first or second derivative at s = 0, so
the only noise in kappa / laplacian values is rounding.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import LieAlgebra, orthonormal_basis
from .errors import DomainError
from .geometry import ConnectionTable, koszul
from .groups import MatrixRealization, exp_matrix


@dataclass(frozen=True)
class Jet2:
    """Value and first two derivatives of a scalar along a curve at s = 0."""

    v: complex
    d1: complex
    d2: complex

    def _coerce(self, other) -> "Jet2":
        if isinstance(other, Jet2):
            return other
        return Jet2(other, 0.0, 0.0)

    def __add__(self, other):
        o = self._coerce(other)
        return Jet2(self.v + o.v, self.d1 + o.d1, self.d2 + o.d2)

    __radd__ = __add__

    def __neg__(self):
        return Jet2(-self.v, -self.d1, -self.d2)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        return Jet2(self.v * o.v,
                    self.d1 * o.v + self.v * o.d1,
                    self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o.v == 0:
            raise ZeroDivisionError("division by a jet with zero value")
        w = self.v / o.v
        w1 = (self.d1 - w * o.d1) / o.v
        w2 = (self.d2 - 2.0 * w1 * o.d1 - w * o.d2) / o.v
        return Jet2(w, w1, w2)

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("jet powers must be non-negative integers")
        out = Jet2(1.0, 0.0, 0.0)
        base = self
        e = exponent
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def log(self):
        if isinstance(self.v, complex) or self.v > 0:
            lv = cmath.log(self.v) if isinstance(self.v, complex) else math.log(self.v)
        else:
            raise DomainError(f"log of non-positive value {self.v}")
        u1 = self.d1 / self.v
        return Jet2(lv, u1, self.d2 / self.v - u1 * u1)

    def exp(self):
        ev = cmath.exp(self.v) if isinstance(self.v, complex) else math.exp(self.v)
        return Jet2(ev, ev * self.d1, ev * (self.d2 + self.d1 * self.d1))


@dataclass(frozen=True)
class CurveJet:
    """Entrywise 2-jet of s -> p exp(sM): value p, velocity pM, acceleration pM^2."""

    value: np.ndarray
    vel: np.ndarray
    acc: np.ndarray

    @classmethod
    def from_direction(cls, point: np.ndarray, direction_matrix: np.ndarray) -> "CurveJet":
        pm = point @ direction_matrix
        return cls(point, pm, pm @ direction_matrix)

    def entry(self, i: int, j: int) -> Jet2:
        return Jet2(float(self.value[i, j]), float(self.vel[i, j]), float(self.acc[i, j]))


# ---------------------------------------------------------------------------
# scalar fields
# ---------------------------------------------------------------------------

class ScalarField:
    """A real- or complex-valued function on a matrix group."""

    is_complex = False

    def value(self, point: np.ndarray):
        raise NotImplementedError

    def eval_jet(self, curve: CurveJet) -> Jet2:
        raise NotImplementedError


@dataclass(frozen=True)
class MatrixEntry(ScalarField):
    """x -> x[i, j] (zero-based)."""

    i: int
    j: int

    def value(self, point):
        return float(point[self.i, self.j])

    def eval_jet(self, curve):
        return curve.entry(self.i, self.j)

    def __repr__(self):
        return f"entry[{self.i},{self.j}]"


@dataclass(frozen=True)
class LogDiag(ScalarField):
    """x -> log x[i, i]; only defined where the diagonal entry is positive."""

    i: int

    def value(self, point):
        v = float(point[self.i, self.i])
        if v <= 0:
            raise DomainError(f"log_diag({self.i}): entry {v} is not positive")
        return math.log(v)

    def eval_jet(self, curve):
        return curve.entry(self.i, self.i).log()

    def __repr__(self):
        return f"log_diag[{self.i}]"


@dataclass(frozen=True)
class Constant(ScalarField):
    c: complex

    @property
    def is_complex(self):
        return isinstance(self.c, complex)

    def value(self, point):
        return self.c

    def eval_jet(self, curve):
        return Jet2(self.c, 0.0, 0.0)

    def __repr__(self):
        return f"const[{self.c}]"


@dataclass(frozen=True)
class LinearCombo(ScalarField):
    """sum_k coeffs[k] * fields[k]; complex coefficients give a complex field."""

    coeffs: tuple
    fields: tuple

    @property
    def is_complex(self):
        return any(isinstance(c, complex) for c in self.coeffs) or any(
            f.is_complex for f in self.fields)

    def value(self, point):
        return sum(c * f.value(point) for c, f in zip(self.coeffs, self.fields))

    def eval_jet(self, curve):
        out = Jet2(0.0, 0.0, 0.0)
        for c, f in zip(self.coeffs, self.fields):
            out = out + c * f.eval_jet(curve)
        return out

    def __repr__(self):
        terms = " + ".join(f"({c})*{f!r}" for c, f in zip(self.coeffs, self.fields))
        return f"combo[{terms}]"


@dataclass(frozen=True)
class Polynomial:
    """Polynomial in several complex variables: {exponent tuple: coefficient}."""

    terms: tuple  # of (exponents tuple, complex coefficient)

    @classmethod
    def from_dict(cls, d: dict) -> "Polynomial":
        return cls(tuple(sorted(d.items())))

    @property
    def n_vars(self) -> int:
        return max((len(e) for e, _ in self.terms), default=0)

    def __call__(self, args):
        total = None
        for exponents, coeff in self.terms:
            term = coeff
            for arg, e in zip(args, exponents):
                if e:
                    term = term * arg ** e
            total = term if total is None else total + term
        return total if total is not None else 0.0


@dataclass(frozen=True)
class HolomorphicImage(ScalarField):
    """F(phi_1, ..., phi_n) for a polynomial F and complex sub-fields phi_k."""

    poly: Polynomial
    fields: tuple

    is_complex = True

    def value(self, point):
        return self.poly([complex(f.value(point)) for f in self.fields])

    def eval_jet(self, curve):
        jets = [f.eval_jet(curve) for f in self.fields]
        out = self.poly(jets)
        if not isinstance(out, Jet2):
            out = Jet2(out, 0.0, 0.0)
        return out

    def __repr__(self):
        return f"poly_image[{len(self.poly.terms)} terms of {len(self.fields)} fields]"


def matrix_entry(i: int, j: int) -> MatrixEntry:
    return MatrixEntry(i, j)


def log_diag(i: int) -> LogDiag:
    return LogDiag(i)


def linear_combination(coeffs, fields) -> LinearCombo:
    coeffs = tuple(complex(c) if isinstance(c, complex) else float(c) for c in coeffs)
    return LinearCombo(coeffs, tuple(fields))


def pairing(v, fields) -> LinearCombo:
    """<Phi(x), v> for the standard symmetric bilinear pairing on C^n."""
    return LinearCombo(tuple(complex(c) for c in v), tuple(fields))


def holomorphic_post(poly: Polynomial | dict, fields) -> HolomorphicImage:
    """Post-compose a family of complex fields with a holomorphic polynomial."""
    if isinstance(poly, dict):
        poly = Polynomial.from_dict(poly)
    return HolomorphicImage(poly, tuple(fields))


def identity_polynomial(k: int, n_vars: int) -> Polynomial:
    e = [0] * n_vars
    e[k] = 1
    return Polynomial.from_dict({tuple(e): 1.0})


def random_polynomial(n_vars: int, rng: np.random.Generator, max_degree: int = 3) -> Polynomial:
    """All monomials of total degree <= max_degree, coefficients uniform in the unit disk."""
    exponents = [()]
    def extend(prefix, remaining, budget):
        if remaining == 0:
            return [tuple(prefix)]
        out = []
        for e in range(budget + 1):
            out.extend(extend(prefix + [e], remaining - 1, budget - e))
        return out
    monomials = extend([], n_vars, max_degree)
    terms = {}
    for mono in sorted(monomials):
        r = math.sqrt(rng.uniform())
        theta = rng.uniform(0.0, 2.0 * math.pi)
        terms[mono] = complex(r * math.cos(theta), r * math.sin(theta))
    return Polynomial.from_dict(terms)


# ---------------------------------------------------------------------------
# frames and differential operators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Frame:
    """Orthonormal left-invariant frame on a matrix group, with connection data.

    ``tension`` is sum_a nabla_{X_a} X_a in algebra coordinates; the laplacian
    of a field is sum_a X_a^2(phi) minus the derivative along this vector.
    """

    algebra: LieAlgebra
    realization: MatrixRealization
    onb: np.ndarray
    mats: tuple
    connection: ConnectionTable
    tension: np.ndarray
    tension_mat: np.ndarray

    @classmethod
    def build(cls, algebra: LieAlgebra, realization: MatrixRealization,
              onb=None) -> "Frame":
        if onb is None:
            onb = orthonormal_basis(algebra)
        onb = np.asarray(onb, dtype=float)
        table = koszul(algebra, onb)
        mats = tuple(realization.matrix_of(v) for v in onb)
        tension_frame = np.einsum("aac->c", table.gamma)
        tension = tension_frame @ onb
        return cls(algebra, realization, onb, mats, table, tension,
                   realization.matrix_of(tension))


def derivs(field: ScalarField, point: np.ndarray, direction,
           realization: MatrixRealization) -> tuple:
    """(X(phi)(p), X^2(phi)(p)) along the algebra vector ``direction``."""
    mat = realization.matrix_of(direction)
    jet = field.eval_jet(CurveJet.from_direction(np.asarray(point, float), mat))
    return jet.d1, jet.d2


def fd_check(field: ScalarField, point: np.ndarray, direction,
             realization: MatrixRealization, h: float = 1e-4) -> tuple:
    """Central finite differences of s -> phi(p exp(sX)); the independent oracle."""
    if h <= 0:
        raise ValueError("h must be positive")
    mat = realization.matrix_of(direction)
    point = np.asarray(point, float)
    f_plus = field.value(point @ exp_matrix(mat, h))
    f_zero = field.value(point)
    f_minus = field.value(point @ exp_matrix(mat, -h))
    return (f_plus - f_minus) / (2.0 * h), (f_plus - 2.0 * f_zero + f_minus) / (h * h)


def _direction_jets(fields, point, frame: Frame):
    """first/second derivatives of each field along each frame direction."""
    n_dir = len(frame.mats)
    d1 = np.zeros((n_dir, len(fields)), dtype=complex)
    d2 = np.zeros((n_dir, len(fields)), dtype=complex)
    point = np.asarray(point, float)
    for a, mat in enumerate(frame.mats):
        curve = CurveJet.from_direction(point, mat)
        for k, f in enumerate(fields):
            jet = f.eval_jet(curve)
            d1[a, k] = jet.d1
            d2[a, k] = jet.d2
    return d1, d2


def kappa(phi: ScalarField, psi: ScalarField, point, frame: Frame):
    """kappa(phi, psi) = sum over the frame of X(phi) X(psi), complex bilinear."""
    d1, _ = _direction_jets((phi, psi), point, frame)
    out = complex(np.sum(d1[:, 0] * d1[:, 1]))
    return out if (phi.is_complex or psi.is_complex) else out.real


def laplacian(phi: ScalarField, point, frame: Frame):
    """tau(phi) = sum_a X_a^2(phi) - (sum_a nabla_{X_a} X_a)(phi)."""
    _, d2 = _direction_jets((phi,), point, frame)
    total = complex(np.sum(d2[:, 0]))
    drift = phi.eval_jet(CurveJet.from_direction(np.asarray(point, float), frame.tension_mat)).d1
    out = total - drift
    return out if phi.is_complex else out.real


def kappa_matrix(fields, point, frame: Frame) -> np.ndarray:
    d1, _ = _direction_jets(tuple(fields), point, frame)
    return d1.T @ d1


def laplacian_values(fields, point, frame: Frame) -> np.ndarray:
    _, d2 = _direction_jets(tuple(fields), point, frame)
    drift_curve = CurveJet.from_direction(np.asarray(point, float), frame.tension_mat)
    drift = np.array([f.eval_jet(drift_curve).d1 for f in fields], dtype=complex)
    return d2.sum(axis=0) - drift


@dataclass
class FamilyReport:
    """Worst-case residuals of the orthogonal-harmonic-family conditions."""

    n_fields: int
    n_points: int
    tol: float
    tau_max: np.ndarray     # per field
    kappa_max: np.ndarray   # per ordered pair (k, l), k <= l, upper triangle
    warnings: list = field(default_factory=list)

    @property
    def worst(self) -> float:
        worst = 0.0
        if self.tau_max.size:
            worst = max(worst, float(self.tau_max.max()))
        if self.kappa_max.size:
            worst = max(worst, float(np.triu(self.kappa_max).max()))
        return worst

    @property
    def passed(self) -> bool:
        return self.worst < self.tol


def verify_family(fields, points, frame: Frame, tol: float = 1e-8) -> FamilyReport:
    """Check tau(phi) = 0 and kappa(phi, psi) = 0 for all pairs, including phi = psi.

    kappa(phi, phi) = 0 for a complex field is exactly horizontal weak
    conformality, so a passing family is a family of harmonic morphisms.
    """
    fields = tuple(fields)
    if not fields:
        raise ValueError("verify_family needs at least one field")
    n = len(fields)
    tau_max = np.zeros(n)
    kap_max = np.zeros((n, n))
    points = list(points)
    warnings = []
    if not points:
        warnings.append("no sample points supplied; the check is vacuous")
    for p in points:
        kap = np.abs(kappa_matrix(fields, p, frame))
        kap_max = np.maximum(kap_max, kap)
        tau = np.abs(laplacian_values(fields, p, frame))
        tau_max = np.maximum(tau_max, tau)
    return FamilyReport(n, len(points), tol, tau_max, kap_max, warnings)
