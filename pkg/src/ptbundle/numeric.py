"""Numeric kernel: Laurent polynomials, determinants, deflation, nullspaces.

Scalars are python ``complex``; matrices are numpy arrays.  Polynomial
determinants are computed by evaluation-interpolation: the matrix is
evaluated at sample points on a circle (default radius 1.13, chosen off the
unit circle where group-element spectra like to sit), each sample's
determinant comes from a partial-pivot LU, and the coefficients are read off
with an inverse DFT.  Every interpolated polynomial is validated at fresh
sample points before it is returned.

The LU/DFT stage runs in 80-bit extended precision when the platform
provides it (x86 long double), which keeps the determinant stage's rounding
error far below the error inherited from the input matrices.  All public
tolerances are relative: to the largest sample magnitude for determinants,
to the current max coefficient for deflation, to the largest singular value
for nullspaces.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

# ---------------------------------------------------------------------------
# extended precision setup
# ---------------------------------------------------------------------------

_HAS_EXTENDED = np.finfo(np.longdouble).eps < 1e-17
_REAL_DT = np.longdouble if _HAS_EXTENDED else np.float64
_CPLX_DT = np.clongdouble if _HAS_EXTENDED else np.complex128
_PI = _REAL_DT("3.14159265358979323846264338327950288419716939937510") if _HAS_EXTENDED else np.float64(np.pi)


@dataclass(frozen=True)
class Tolerances:
    """Relative tolerances used throughout the pipeline (CLI-overridable)."""

    det: float = 1e-8    # determinant interpolation validation
    root: float = 1e-6   # root-multiplicity deflation
    null: float = 1e-9   # nullspace singular-value cutoff


def matrix_det(a: np.ndarray):
    """Determinant via partial-pivot LU; preserves the input dtype.

    numpy's det downcasts extended-precision inputs, so sampling code that
    wants clongdouble accuracy must come through here.
    """
    return _lu_det(a)


def linear_solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve a x = b by Gaussian elimination with partial pivoting.

    Unlike numpy.linalg.solve this keeps longdouble/clongdouble inputs in
    their own precision.  b may be a vector or a matrix of right-hand
    sides.  Raises ArithmeticError on an exactly zero pivot.
    """
    a = np.array(a, copy=True)
    vector = np.ndim(b) == 1
    rhs = np.array(b, copy=True, dtype=np.promote_types(a.dtype, np.asarray(b).dtype))
    if vector:
        rhs = rhs.reshape(-1, 1)
    a = a.astype(rhs.dtype, copy=False)
    n = a.shape[0]
    for k in range(n):
        p = int(np.argmax(np.abs(a[k:, k]))) + k
        if a[p, k] == 0:
            raise ArithmeticError("singular matrix in linear_solve")
        if p != k:
            a[[k, p]] = a[[p, k]]
            rhs[[k, p]] = rhs[[p, k]]
        factors = a[k + 1:, k] / a[k, k]
        a[k + 1:, k:] -= factors[:, None] * a[k, k:]
        rhs[k + 1:] -= factors[:, None] * rhs[k]
    for k in range(n - 1, -1, -1):
        rhs[k] = (rhs[k] - a[k, k + 1:] @ rhs[k + 1:]) / a[k, k]
    return rhs[:, 0] if vector else rhs


def matrix_inverse(a: np.ndarray) -> np.ndarray:
    """Inverse via linear_solve; preserves extended-precision dtypes."""
    a = np.asarray(a)
    return linear_solve(a, np.eye(a.shape[0], dtype=a.dtype))


def _lu_det(a: np.ndarray):
    """Determinant via partial-pivot LU; preserves the input dtype."""
    a = np.array(a, copy=True)
    n = a.shape[0]
    if n == 0:
        return a.dtype.type(1)
    det = a.dtype.type(1)
    for k in range(n - 1):
        col = np.abs(a[k:, k])
        p = int(np.argmax(col)) + k
        if a[p, k] == 0:
            return a.dtype.type(0)
        if p != k:
            a[[k, p], k:] = a[[p, k], k:]
            det = -det
        piv = a[k, k]
        det = det * piv
        factors = a[k + 1:, k:k + 1] / piv
        a[k + 1:, k + 1:] = a[k + 1:, k + 1:] - factors * a[k, k + 1:]
    return det * a[n - 1, n - 1]


def _circle_points(count: int, radius: float, phase: float = 0.0):
    """Sample points radius * exp(i(2 pi j / count + phase)) in extended precision."""
    r = _REAL_DT(radius)
    out = []
    for j in range(count):
        theta = 2 * _PI * _REAL_DT(j) / _REAL_DT(count) + _REAL_DT(phase)
        out.append(r * (np.cos(theta) + 1j * np.sin(theta)))
    return out


# ---------------------------------------------------------------------------
# Laurent polynomials
# ---------------------------------------------------------------------------


class LaurentPoly:
    """Laurent polynomial sum c_e * x^e stored as {exponent: complex coeff}.

    Exact zeros are never stored; near-zeros are only dropped by an explicit
    cleaned() call so that tolerance decisions stay visible at call sites.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Optional[dict[int, complex]] = None):
        clean = {}
        if coeffs:
            for e, c in coeffs.items():
                c = complex(c)
                if c != 0:
                    clean[int(e)] = c
        object.__setattr__(self, "coeffs", clean)

    def __setattr__(self, name, value):
        raise AttributeError("LaurentPoly is immutable")

    # -- constructors --------------------------------------------------

    @classmethod
    def zero(cls) -> "LaurentPoly":
        return cls()

    @classmethod
    def one(cls) -> "LaurentPoly":
        return cls({0: 1.0})

    @classmethod
    def term(cls, coeff: complex, exp: int = 0) -> "LaurentPoly":
        return cls({exp: coeff})

    @classmethod
    def variable(cls) -> "LaurentPoly":
        return cls({1: 1.0})

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[complex], min_exp: int = 0) -> "LaurentPoly":
        return cls({min_exp + i: c for i, c in enumerate(coeffs)})

    # -- inspection ----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def min_exp(self) -> int:
        return min(self.coeffs) if self.coeffs else 0

    @property
    def max_exp(self) -> int:
        return max(self.coeffs) if self.coeffs else 0

    @property
    def span(self) -> int:
        return self.max_exp - self.min_exp if self.coeffs else 0

    def coeff(self, e: int) -> complex:
        return self.coeffs.get(e, 0j)

    def max_abs(self) -> float:
        return max((abs(c) for c in self.coeffs.values()), default=0.0)

    def dense(self) -> tuple[int, list[complex]]:
        """(min_exp, coefficient list from min_exp to max_exp inclusive)."""
        if not self.coeffs:
            return 0, [0j]
        lo, hi = self.min_exp, self.max_exp
        out = [0j] * (hi - lo + 1)
        for e, c in self.coeffs.items():
            out[e - lo] = c
        return lo, out

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, 0j) + c
        return LaurentPoly(out)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other) -> "LaurentPoly":
        if isinstance(other, (int, float, complex)):
            return LaurentPoly({e: c * other for e, c in self.coeffs.items()})
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        out: dict[int, complex] = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = e1 + e2
                out[e] = out.get(e, 0j) + c1 * c2
        return LaurentPoly(out)

    __rmul__ = __mul__

    def shifted(self, k: int) -> "LaurentPoly":
        """Multiply by x^k."""
        return LaurentPoly({e + k: c for e, c in self.coeffs.items()})

    def evaluate(self, z):
        """Horner-free evaluation; z may be complex or a numpy scalar."""
        total = z * 0
        for e, c in self.coeffs.items():
            total = total + (z ** e) * c
        return total

    def reciprocal(self) -> "LaurentPoly":
        """x^(max_exp+min_exp) * p(1/x): same coefficient multiset reversed."""
        s = self.max_exp + self.min_exp
        return LaurentPoly({s - e: c for e, c in self.coeffs.items()})

    def cleaned(self, rel_tol: float = 1e-12) -> "LaurentPoly":
        m = self.max_abs()
        if m == 0.0:
            return LaurentPoly()
        return LaurentPoly({e: c for e, c in self.coeffs.items() if abs(c) > rel_tol * m})

    def realified(self, rel_tol: float = 1e-6) -> "LaurentPoly":
        """Drop imaginary parts when they are relatively tiny; else unchanged."""
        m = self.max_abs()
        if m == 0.0:
            return self
        if all(abs(c.imag) <= rel_tol * m for c in self.coeffs.values()):
            return LaurentPoly({e: complex(c.real, 0.0) for e, c in self.coeffs.items()})
        return self

    def __eq__(self, other) -> bool:
        return isinstance(other, LaurentPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __repr__(self) -> str:
        if not self.coeffs:
            return "LaurentPoly(0)"
        bits = []
        for e in sorted(self.coeffs):
            bits.append("(%r)*x^%d" % (self.coeffs[e], e))
        return "LaurentPoly(%s)" % " + ".join(bits)


def laurent_allclose(p: LaurentPoly, q: LaurentPoly, tol: float = 1e-9) -> bool:
    """Coefficientwise comparison, relative to the larger max coefficient."""
    scale = max(p.max_abs(), q.max_abs(), 1.0)
    exps = set(p.coeffs) | set(q.coeffs)
    return all(abs(p.coeff(e) - q.coeff(e)) <= tol * scale for e in exps)


def normalize_unit(p: LaurentPoly, lead_tol: float = 1e-6) -> LaurentPoly:
    """Shift min exponent to 0; scale leading coefficient to +1 when |lead| ~ 1."""
    if p.is_zero():
        return p
    q = p.shifted(-p.min_exp)
    lead = q.coeff(q.max_exp)
    if abs(abs(lead) - 1.0) <= lead_tol:
        q = q * (1.0 / lead)
    return q


def monic_normalize(p: LaurentPoly) -> LaurentPoly:
    """Shift min exponent to 0 and divide by the leading coefficient."""
    if p.is_zero():
        return p
    q = p.shifted(-p.min_exp)
    return q * (1.0 / q.coeff(q.max_exp))


def equal_up_to_unit(p: LaurentPoly, q: LaurentPoly, tol: float = 1e-8,
                     allow_reciprocal: bool = False) -> bool:
    """Whether p = c x^k q for a scalar c (optionally also allowing reversal)."""
    if p.is_zero() or q.is_zero():
        return p.is_zero() and q.is_zero()
    pm, qm = monic_normalize(p), monic_normalize(q)
    if pm.span != qm.span:
        return False
    if laurent_allclose(pm, qm, tol):
        return True
    return allow_reciprocal and laurent_allclose(pm, monic_normalize(qm.reciprocal()), tol)


# ---------------------------------------------------------------------------
# polynomial matrices
# ---------------------------------------------------------------------------


class PolyMatrix:
    """Matrix with LaurentPoly entries (rows of rows)."""

    __slots__ = ("entries", "shape")

    def __init__(self, entries: Sequence[Sequence[LaurentPoly]]):
        rows = [list(r) for r in entries]
        if rows:
            width = len(rows[0])
            if any(len(r) != width for r in rows):
                raise ValueError("ragged PolyMatrix")
        else:
            width = 0
        object.__setattr__(self, "entries", rows)
        object.__setattr__(self, "shape", (len(rows), width))

    def __setattr__(self, name, value):
        raise AttributeError("PolyMatrix is immutable")

    @classmethod
    def from_constant(cls, m: np.ndarray) -> "PolyMatrix":
        return cls([[LaurentPoly.term(complex(m[i, j])) for j in range(m.shape[1])]
                    for i in range(m.shape[0])])

    @classmethod
    def from_blocks(cls, blocks: Sequence[Sequence["PolyMatrix"]]) -> "PolyMatrix":
        rows: list[list[LaurentPoly]] = []
        for block_row in blocks:
            height = block_row[0].shape[0]
            if any(b.shape[0] != height for b in block_row):
                raise ValueError("block row heights disagree")
            for i in range(height):
                row: list[LaurentPoly] = []
                for b in block_row:
                    row.extend(b.entries[i])
                rows.append(row)
        return cls(rows)

    def drop_columns(self, cols: set[int]) -> "PolyMatrix":
        return PolyMatrix([[e for j, e in enumerate(row) if j not in cols]
                           for row in self.entries])

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return PolyMatrix([[a + b for a, b in zip(r1, r2)]
                           for r1, r2 in zip(self.entries, other.entries)])

    def __sub__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return PolyMatrix([[a - b for a, b in zip(r1, r2)]
                           for r1, r2 in zip(self.entries, other.entries)])

    def scaled(self, c) -> "PolyMatrix":
        return PolyMatrix([[e * c for e in row] for row in self.entries])

    def evaluate(self, z) -> np.ndarray:
        vals = [[e.evaluate(z) for e in row] for row in self.entries]
        if not vals:
            return np.zeros((0, 0), dtype=complex)
        return np.array(vals)

    def exponent_window(self) -> Optional[tuple[int, int]]:
        """Row-wise window [lo, hi] containing every determinant exponent.

        lo sums each row's smallest valuation over nonzero entries, hi sums
        the largest degree; a row of zeros makes the determinant zero and
        returns None.
        """
        lo = hi = 0
        for row in self.entries:
            vals = [e for e in row if not e.is_zero()]
            if not vals:
                return None
            lo += min(e.min_exp for e in vals)
            hi += max(e.max_exp for e in vals)
        return lo, hi


def det_polymatrix(m: PolyMatrix, degree_bound: Optional[int] = None,
                   tol: float = 1e-8, radius: float = 1.13) -> LaurentPoly:
    """Determinant of a square PolyMatrix by evaluation-interpolation.

    Samples span+1 points on the radius circle (span from the row-wise
    exponent window, widened to degree_bound if the caller supplies a larger
    promise), interpolates with an inverse DFT, and validates the result at
    two fresh points; tol is relative to the largest sample magnitude.
    """
    rows, cols = m.shape
    if rows != cols:
        raise ValueError("determinant of non-square PolyMatrix")
    if rows == 0:
        return LaurentPoly.one()
    window = m.exponent_window()
    if window is None:
        return LaurentPoly.zero()
    lo, hi = window
    span = hi - lo
    if degree_bound is not None:
        span = max(span, int(degree_bound))
    count = span + 1
    points = _circle_points(count, radius)
    dets = [_lu_det(m.evaluate(z)) for z in points]
    poly = _interpolate(points, dets, lo, radius)
    _validate_interpolation(poly, dets, lambda z: _lu_det(m.evaluate(z)),
                            count, radius, tol)
    return poly


def _interpolate(points, values, lo: int, radius: float) -> LaurentPoly:
    """Recover sum_{k} c_{lo+k} x^{lo+k} from values on the sample circle."""
    count = len(points)
    r = _REAL_DT(radius)
    coeffs: dict[int, complex] = {}
    raw = []
    for k in range(count):
        acc = _CPLX_DT(0)
        for j, f in enumerate(values):
            theta = -2 * _PI * _REAL_DT(j * k % count) / _REAL_DT(count)
            w = np.cos(theta) + 1j * np.sin(theta)
            # divide out z_j^lo so the remaining function is an ordinary poly
            zlo = points[j] ** lo
            acc = acc + (f / zlo) * w
        raw.append(acc / _CPLX_DT(count))
    scale = max((abs(complex(c)) for c in raw), default=0.0)
    floor = 1e-12 * scale
    for k, c in enumerate(raw):
        val = complex(c / (r ** k))
        if abs(complex(c)) > floor:
            coeffs[lo + k] = val
    return LaurentPoly(coeffs)


def _validate_interpolation(poly: LaurentPoly, sample_dets, evaluator,
                            count: int, radius: float, tol: float):
    scale = max([abs(complex(d)) for d in sample_dets] + [1.0])
    for phase in (0.37 * 2 * np.pi / count, 0.71 * 2 * np.pi / count):
        z = _circle_points(1, radius, phase)[0]
        reference = evaluator(z)
        residual = abs(complex(poly.evaluate(z) - reference))
        if residual > tol * max(scale, abs(complex(reference))):
            raise ArithmeticError(
                "interpolated determinant failed validation: residual %.3e vs scale %.3e"
                % (residual, scale))


def poly_div_exact(num: LaurentPoly, den: LaurentPoly, tol: float = 1e-8) -> LaurentPoly:
    """Exact Laurent division; raises ArithmeticError when the remainder is large.

    Result has minimum exponent 0 (unit-normalized shift); tol is relative
    to the numerator's max coefficient.
    """
    if den.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    if num.is_zero():
        return LaurentPoly.zero()
    _, ncoeffs = num.dense()
    _, dcoeffs = den.dense()
    if len(ncoeffs) < len(dcoeffs):
        raise ArithmeticError("numerator degree below denominator degree")
    scale = num.max_abs()
    quot = [0j] * (len(ncoeffs) - len(dcoeffs) + 1)
    rem = list(ncoeffs)
    dlead = dcoeffs[-1]
    for k in range(len(quot) - 1, -1, -1):
        q = rem[k + len(dcoeffs) - 1] / dlead
        quot[k] = q
        if q != 0:
            for i, dc in enumerate(dcoeffs):
                rem[k + i] -= q * dc
    worst = max(abs(c) for c in rem)
    if worst > tol * scale:
        raise ArithmeticError(
            "polynomial division not exact: remainder %.3e vs numerator scale %.3e"
            % (worst, scale))
    return LaurentPoly.from_coeffs(quot, 0).cleaned(1e-14)


def char_poly(m: np.ndarray, tol: float = 1e-8, radius: float = 1.13) -> LaurentPoly:
    """det(m - t I) by sample-and-interpolate; leading coefficient snapped to (-1)^n.

    Same computation as det_polymatrix on the pencil m - t I, specialized so
    the samples are plain shifted copies of m.
    """
    n = m.shape[0]
    if n == 0:
        return LaurentPoly.one()
    base = np.array(m, dtype=_CPLX_DT)
    count = n + 1
    points = _circle_points(count, radius)

    def sample(z):
        return _lu_det(base - z * np.eye(n, dtype=_CPLX_DT))

    dets = [sample(z) for z in points]
    poly = _interpolate(points, dets, 0, radius)
    _validate_interpolation(poly, dets, sample, count, radius, tol)
    lead = (-1.0) ** n
    coeffs = dict(poly.coeffs)
    coeffs[n] = complex(lead, 0.0)
    poly = LaurentPoly(coeffs)
    if np.isrealobj(m):
        poly = poly.realified(1e-6)
    return poly


def quotient_interpolate(numerator_at: Callable, denominator_at: Callable,
                         quotient_degree: int, tol: float = 1e-8,
                         radius: float = 2.0) -> LaurentPoly:
    """Interpolate q(x) = numerator(x)/denominator(x) known to be polynomial.

    Both callables receive an extended-precision sample point and return the
    determinant value there.  Used where the denominator's roots cluster at
    x = 1 (unipotent meridian images) and coefficientwise long division
    would amplify noise combinatorially; the radius keeps every sample at
    distance >= radius-1 from that cluster.  Validated at two fresh points.
    """
    count = quotient_degree + 1
    points = _circle_points(count, radius)
    values = []
    for z in points:
        den = denominator_at(z)
        if den == 0 or not np.isfinite(complex(den)):
            raise ArithmeticError("denominator vanished at a sample point")
        values.append(numerator_at(z) / den)
    poly = _interpolate(points, values, 0, radius)

    def ref(z):
        return numerator_at(z) / denominator_at(z)

    _validate_interpolation(poly, values, ref, count, radius, tol)
    return poly


def root_multiplicity(p: LaurentPoly, z0: complex, tol: float = 1e-6) -> tuple[int, LaurentPoly]:
    """Multiplicity of z0 as a root, with the deflated polynomial.

    Synthetic division by (x - z0) repeats while the remainder stays within
    tol relative to the current coefficient scale; on exit the deflated
    value at z0 exceeds that threshold.
    """
    if p.is_zero():
        return 0, p
    _, coeffs = p.dense()
    count = 0
    while len(coeffs) > 1:
        scale = max(abs(c) for c in coeffs)
        if scale == 0.0:
            break
        quot = [0j] * (len(coeffs) - 1)
        acc = 0j
        for i in range(len(coeffs) - 1, 0, -1):
            acc = coeffs[i] + acc * z0
            quot[i - 1] = acc
        rem = coeffs[0] + acc * z0
        if abs(rem) <= tol * scale:
            coeffs = quot
            count += 1
        else:
            break
    return count, LaurentPoly.from_coeffs(coeffs, 0)


def nullspace(m: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Orthonormal kernel basis (columns); tol is relative to sigma_max.

    Extended-precision inputs are cast down to double first (LAPACK has no
    longdouble kernels); callers keep precision by multiplying the basis
    back into their own extended matrices.
    """
    m = np.atleast_2d(np.asarray(m))
    if m.dtype == np.clongdouble:
        m = m.astype(np.complex128)
    elif m.dtype == np.longdouble:
        m = m.astype(np.float64)
    n = m.shape[1]
    if m.size == 0:
        return np.eye(n)
    _, s, vh = np.linalg.svd(m, full_matrices=True)
    smax = s[0] if s.size else 0.0
    if smax == 0.0:
        return np.eye(n, dtype=vh.dtype)
    rank = int(np.sum(s > tol * smax))
    return vh[rank:].conj().T


def newton_multistart(fun: Callable, jac: Callable, dim: int, starts: int = 64,
                      seed: int = 0, sampler: Optional[Callable] = None,
                      residual_tol: float = 1e-10, dedup_tol: float = 1e-6,
                      max_iter: int = 80) -> list[np.ndarray]:
    """Solve fun(z) = 0 (C^dim -> C^dim) by Newton from seeded random starts.

    Deterministic for a fixed seed.  Roots are kept when the final residual
    infinity-norm is <= residual_tol, deduplicated at distance dedup_tol,
    and returned sorted lexicographically by (Re, Im) of the coordinates.
    """
    rng = np.random.default_rng(seed)
    found: list[np.ndarray] = []
    for _ in range(starts):
        if sampler is not None:
            z = np.asarray(sampler(rng), dtype=complex)
        else:
            z = (rng.standard_normal(dim) + 1j * rng.standard_normal(dim)) * 1.5
        converged = False
        for _ in range(max_iter):
            fv = np.asarray(fun(z), dtype=complex)
            if not np.all(np.isfinite(fv)):
                break
            if np.max(np.abs(fv)) < 1e-14:
                converged = True
                break
            try:
                step = np.linalg.solve(np.asarray(jac(z), dtype=complex), -fv)
            except np.linalg.LinAlgError:
                break
            if not np.all(np.isfinite(step)):
                break
            z = z + step
            if np.max(np.abs(step)) < 1e-15 * max(1.0, float(np.max(np.abs(z)))):
                converged = True
                break
        if not converged:
            continue
        # a couple of polish iterations squeeze the residual to machine level
        for _ in range(3):
            fv = np.asarray(fun(z), dtype=complex)
            try:
                z = z + np.linalg.solve(np.asarray(jac(z), dtype=complex), -fv)
            except np.linalg.LinAlgError:
                break
        if np.max(np.abs(np.asarray(fun(z), dtype=complex))) > residual_tol:
            continue
        if any(np.max(np.abs(z - w)) <= dedup_tol for w in found):
            continue
        found.append(z)
    def sort_key(v):
        return tuple(x for c in v for x in (c.real, c.imag))
    return sorted(found, key=sort_key)


def integer_round(p: LaurentPoly, tol: float = 1e-6) -> Optional[list[int]]:
    """Integer coefficient list (from the min exponent) or None past tolerance."""
    _, coeffs = p.dense()
    out = []
    for c in coeffs:
        k = round(c.real)
        if abs(c.real - k) > tol or abs(c.imag) > tol:
            return None
        out.append(int(k))
    return out
