"""
Min-max objectives with exact evaluation, gradient and Hessian.

An objective f(x, y) has a min-block x of dimension n and a max-block y of
dimension m. Bodies are sparse polynomials over the n + m variables ordered
x1..xn, y1..ym (or sums of products of sparse polynomials), so every
derivative is exact up to floating-point rounding of coefficient arithmetic.

All evaluation goes through batched "term plans": a set of monomials and a
weight matrix mapping monomial values to outputs. The same machinery serves
values, gradients and Hessians for one point or for thousands of points.
"""

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from project.src.utils.error_utils import MinMaxInputError
from project.src.utils.validation_utils import (
    require_count,
    require_finite,
    require_length,
    validate_box,
)


LIPSCHITZ_SAFETY_FACTOR = 1.1
SYMMETRY_TOL = 1e-12


# --- Points and Hessian blocks ---

@dataclass(frozen=True, eq=False)
class PointXY:
    """A point (x, y) with x in R^n (min-block) and y in R^m (max-block)."""
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = require_finite("x", np.atleast_1d(np.asarray(self.x, dtype=float))).copy()
        y = require_finite("y", np.atleast_1d(np.asarray(self.y, dtype=float))).copy()
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @classmethod
    def from_vector(cls, z: Sequence[float], n: int) -> "PointXY":
        z = np.asarray(z, dtype=float)
        return cls(z[:n], z[n:])

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.x, self.y])

    def as_tuple(self) -> Tuple[float, ...]:
        return tuple(float(v) for v in self.vector)

    def __repr__(self) -> str:
        return f"PointXY(x={self.x.tolist()}, y={self.y.tolist()})"


@dataclass(frozen=True, eq=False)
class HessianBlocks:
    """The four blocks of the Hessian of f at a point."""
    xx: np.ndarray
    xy: np.ndarray
    yx: np.ndarray
    yy: np.ndarray

    @classmethod
    def from_full(cls, hess: np.ndarray, n: int) -> "HessianBlocks":
        return cls(
            xx=hess[:n, :n].copy(),
            xy=hess[:n, n:].copy(),
            yx=hess[n:, :n].copy(),
            yy=hess[n:, n:].copy(),
        )

    def full(self) -> np.ndarray:
        return np.block([[self.xx, self.xy], [self.yx, self.yy]])

    def is_symmetric(self, tol: float = SYMMETRY_TOL) -> bool:
        scale = max(1.0, float(np.max(np.abs(self.full()))))
        return (
            np.allclose(self.xx, self.xx.T, rtol=0.0, atol=tol * scale)
            and np.allclose(self.yy, self.yy.T, rtol=0.0, atol=tol * scale)
            and np.allclose(self.yx, self.xy.T, rtol=0.0, atol=tol * scale)
        )


@dataclass(frozen=True, eq=False)
class Box:
    """Axis-aligned box [lower_i, upper_i] in R^(n+m)."""
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.atleast_1d(np.asarray(self.lower, dtype=float))
        upper = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if not validate_box(lower, upper):
            raise MinMaxInputError(
                f"Degenerate or invalid box: lower={lower.tolist()}, upper={upper.tolist()} "
                "(need finite bounds with upper > lower on every axis)"
            )
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def cube(cls, low: float, high: float, dim: int) -> "Box":
        return cls(np.full(dim, float(low)), np.full(dim, float(high)))

    @classmethod
    def from_bounds(cls, bounds: Optional[Sequence[Sequence[float]]], dim: int, default: Tuple[float, float] = (-5.0, 5.0)) -> "Box":
        """
        Builds a box from CLI-style bounds.

        Args:
            bounds: None (use default on every axis), one (lo, hi) pair applied
                to every axis, or exactly dim pairs, one per axis
            dim: box dimension
        """
        if not bounds:
            return cls.cube(default[0], default[1], dim)
        pairs = [tuple(b) for b in bounds]
        if any(len(b) != 2 for b in pairs):
            raise MinMaxInputError(f"box bounds must be (lo, hi) pairs, got {bounds!r}")
        if len(pairs) == 1:
            return cls.cube(pairs[0][0], pairs[0][1], dim)
        if len(pairs) != dim:
            raise MinMaxInputError(f"got {len(pairs)} box bounds, expected 1 or {dim}")
        return cls(np.array([p[0] for p in pairs], dtype=float), np.array([p[1] for p in pairs], dtype=float))

    @property
    def dim(self) -> int:
        return int(self.lower.shape[0])

    def contains(self, z: np.ndarray, tol: float = 0.0) -> bool:
        return bool(np.all(z >= self.lower - tol) and np.all(z <= self.upper + tol))

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        return rng.uniform(self.lower, self.upper, size=(count, self.dim))

    def to_dict(self) -> Dict:
        return {"lower": self.lower.tolist(), "upper": self.upper.tolist()}


# --- Batched term plans ---

def _power_table(points: np.ndarray, max_degree: int) -> np.ndarray:
    """powers[b, v, k] = points[b, v] ** k for k = 0..max_degree."""
    batch, nvars = points.shape
    powers = np.empty((batch, nvars, max_degree + 1))
    powers[:, :, 0] = 1.0
    for k in range(1, max_degree + 1):
        powers[:, :, k] = powers[:, :, k - 1] * points
    return powers


class _TermPlan:
    """
    Monomials plus a weight matrix: outputs = monomial_values @ weights.

    Each monomial is stored as at most `width` (variable, power) factors,
    so evaluation costs `width` gathers regardless of the variable count.
    """

    def __init__(self, rows: Dict[Tuple[int, ...], np.ndarray], nvars: int, outputs: int):
        self.outputs = outputs
        keys = sorted(rows)
        self.size = len(keys)
        if not keys:
            self.var_idx = np.zeros((0, 1), dtype=np.intp)
            self.pow_idx = np.zeros((0, 1), dtype=np.intp)
            self.weights = np.zeros((0, outputs))
            self.max_degree = 0
            return

        exps = np.array(keys, dtype=np.intp).reshape(len(keys), nvars)
        width = max(1, int(np.max(np.count_nonzero(exps, axis=1))))
        self.var_idx = np.zeros((len(keys), width), dtype=np.intp)
        self.pow_idx = np.zeros((len(keys), width), dtype=np.intp)
        for k, e in enumerate(exps):
            nz = np.nonzero(e)[0]
            self.var_idx[k, :nz.size] = nz
            self.pow_idx[k, :nz.size] = e[nz]
        self.weights = np.array([rows[k] for k in keys], dtype=float)
        self.max_degree = int(np.max(exps))

    def evaluate(self, powers: np.ndarray) -> np.ndarray:
        batch = powers.shape[0]
        if self.size == 0:
            return np.zeros((batch, self.outputs))
        mono = powers[:, self.var_idx[:, 0], self.pow_idx[:, 0]]
        for f in range(1, self.var_idx.shape[1]):
            mono = mono * powers[:, self.var_idx[:, f], self.pow_idx[:, f]]
        return mono @ self.weights


def _accumulate(rows: Dict, exponent: Tuple[int, ...], output: int, coeff: float, outputs: int) -> None:
    if exponent not in rows:
        rows[exponent] = np.zeros(outputs)
    rows[exponent][output] += coeff


# --- Sparse polynomials ---

class SparsePolynomial:
    """
    Sparse multivariate polynomial sum_k c_k * prod_v z_v ** e_kv.

    Instances are immutable and always canonical: no repeated exponent
    vectors, no zero coefficients, terms sorted by exponent vector.
    """

    def __init__(self, nvars: int, terms: Iterable[Tuple[float, Sequence[int]]] = ()):
        self.nvars = require_count("nvars", nvars)
        merged: Dict[Tuple[int, ...], float] = {}
        for index, (coeff, exponents) in enumerate(terms):
            exponent = self._check_exponent(index, exponents)
            coeff = float(coeff)
            if not math.isfinite(coeff):
                raise MinMaxInputError(f"term {index}: coefficient must be finite, got {coeff}")
            merged[exponent] = merged.get(exponent, 0.0) + coeff
        self._terms: Tuple[Tuple[float, Tuple[int, ...]], ...] = tuple(
            (c, e) for e, c in sorted(merged.items()) if c != 0.0
        )

    def _check_exponent(self, index: int, exponents: Sequence[int]) -> Tuple[int, ...]:
        exponent = tuple(exponents)
        if len(exponent) != self.nvars:
            raise MinMaxInputError(
                f"term {index}: exponent vector has length {len(exponent)}, expected {self.nvars}"
            )
        try:
            valid = all(not isinstance(e, bool) and int(e) == e and e >= 0 for e in exponent)
        except (TypeError, ValueError, OverflowError):
            valid = False
        if not valid:
            raise MinMaxInputError(
                f"term {index}: exponents must be non-negative integers, got {list(exponents)}"
            )
        return tuple(int(e) for e in exponent)

    # construction helpers

    @classmethod
    def constant(cls, nvars: int, value: float) -> "SparsePolynomial":
        return cls(nvars, [(value, (0,) * nvars)])

    @classmethod
    def variable(cls, nvars: int, index: int, power: int = 1) -> "SparsePolynomial":
        exponent = [0] * nvars
        exponent[index] = power
        return cls(nvars, [(1.0, exponent)])

    @property
    def terms(self) -> Tuple[Tuple[float, Tuple[int, ...]], ...]:
        return self._terms

    @property
    def degree(self) -> int:
        return max((sum(e) for _, e in self._terms), default=0)

    def canonicalize(self) -> "SparsePolynomial":
        return SparsePolynomial(self.nvars, self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other) -> bool:
        return isinstance(other, SparsePolynomial) and self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.nvars, self._terms))

    def __repr__(self) -> str:
        return f"SparsePolynomial(nvars={self.nvars}, terms={len(self._terms)}, degree={self.degree})"

    # arithmetic

    def _coerce(self, other) -> "SparsePolynomial":
        if isinstance(other, SparsePolynomial):
            if other.nvars != self.nvars:
                raise MinMaxInputError(f"cannot combine polynomials in {self.nvars} and {other.nvars} variables")
            return other
        return SparsePolynomial.constant(self.nvars, float(other))

    def __add__(self, other) -> "SparsePolynomial":
        other = self._coerce(other)
        return SparsePolynomial(self.nvars, self._terms + other._terms)

    __radd__ = __add__

    def __neg__(self) -> "SparsePolynomial":
        return self.scale(-1.0)

    def __sub__(self, other) -> "SparsePolynomial":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "SparsePolynomial":
        return self._coerce(other) - self

    def __mul__(self, other) -> "SparsePolynomial":
        if not isinstance(other, SparsePolynomial):
            return self.scale(float(other))
        other = self._coerce(other)
        products = [
            (c1 * c2, tuple(a + b for a, b in zip(e1, e2)))
            for c1, e1 in self._terms
            for c2, e2 in other._terms
        ]
        return SparsePolynomial(self.nvars, products)

    __rmul__ = __mul__

    def __pow__(self, power: int) -> "SparsePolynomial":
        result = SparsePolynomial.constant(self.nvars, 1.0)
        for _ in range(require_count("power", power, minimum=0)):
            result = result * self
        return result

    def scale(self, factor: float) -> "SparsePolynomial":
        return SparsePolynomial(self.nvars, [(c * factor, e) for c, e in self._terms])

    def shift(self, offsets: Sequence[float]) -> "SparsePolynomial":
        """Substitutes z_v -> z_v + offsets[v] and re-expands."""
        offsets = np.asarray(offsets, dtype=float)
        require_length("offsets", offsets, self.nvars)
        result = SparsePolynomial(self.nvars)
        for coeff, exponent in self._terms:
            term = SparsePolynomial.constant(self.nvars, coeff)
            for v, e in enumerate(exponent):
                if e == 0:
                    continue
                factor = SparsePolynomial(
                    self.nvars,
                    [
                        (math.comb(e, j) * offsets[v] ** (e - j), [j if u == v else 0 for u in range(self.nvars)])
                        for j in range(e + 1)
                    ],
                )
                term = term * factor
            result = result + term
        return result

    def derivative(self, var: int) -> "SparsePolynomial":
        derived = []
        for coeff, exponent in self._terms:
            e = exponent[var]
            if e == 0:
                continue
            lowered = list(exponent)
            lowered[var] = e - 1
            derived.append((coeff * e, lowered))
        return SparsePolynomial(self.nvars, derived)

    # batched evaluation

    @cached_property
    def _value_plan(self) -> _TermPlan:
        rows: Dict = {}
        for coeff, exponent in self._terms:
            _accumulate(rows, exponent, 0, coeff, 1)
        return _TermPlan(rows, self.nvars, 1)

    @cached_property
    def _gradient_plan(self) -> _TermPlan:
        rows: Dict = {}
        for coeff, exponent in self._terms:
            for v, e in enumerate(exponent):
                if e == 0:
                    continue
                lowered = list(exponent)
                lowered[v] -= 1
                _accumulate(rows, tuple(lowered), v, coeff * e, self.nvars)
        return _TermPlan(rows, self.nvars, self.nvars)

    @cached_property
    def _upper_pairs(self) -> List[Tuple[int, int]]:
        return [(i, j) for i in range(self.nvars) for j in range(i, self.nvars)]

    @cached_property
    def _hessian_plan(self) -> _TermPlan:
        pairs = self._upper_pairs
        rows: Dict = {}
        for coeff, exponent in self._terms:
            for out, (i, j) in enumerate(pairs):
                lowered = list(exponent)
                if i == j:
                    e = exponent[i]
                    if e < 2:
                        continue
                    lowered[i] -= 2
                    weight = coeff * e * (e - 1)
                else:
                    if exponent[i] == 0 or exponent[j] == 0:
                        continue
                    lowered[i] -= 1
                    lowered[j] -= 1
                    weight = coeff * exponent[i] * exponent[j]
                _accumulate(rows, tuple(lowered), out, weight, len(pairs))
        return _TermPlan(rows, self.nvars, len(pairs))

    @property
    def max_power(self) -> int:
        return max((max(e) for _, e in self._terms), default=0)

    def powers(self, points: np.ndarray) -> np.ndarray:
        return _power_table(points, self.max_power)

    def values(self, points: np.ndarray, powers: Optional[np.ndarray] = None) -> np.ndarray:
        powers = self.powers(points) if powers is None else powers
        return self._value_plan.evaluate(powers)[:, 0]

    def gradients(self, points: np.ndarray, powers: Optional[np.ndarray] = None) -> np.ndarray:
        powers = self.powers(points) if powers is None else powers
        return self._gradient_plan.evaluate(powers)

    def hessians(self, points: np.ndarray, powers: Optional[np.ndarray] = None) -> np.ndarray:
        powers = self.powers(points) if powers is None else powers
        upper = self._hessian_plan.evaluate(powers)
        batch = points.shape[0]
        hess = np.empty((batch, self.nvars, self.nvars))
        for out, (i, j) in enumerate(self._upper_pairs):
            hess[:, i, j] = upper[:, out]
            hess[:, j, i] = upper[:, out]
        return hess

    def expand(self) -> "SparsePolynomial":
        return self


class ProductSumBody:
    """
    Structured body sum_k P_k * Q_k with exact product-rule derivatives.

    Used for large fixtures whose expanded form would have thousands of
    terms; expand() returns the equivalent SparsePolynomial.
    """

    def __init__(self, pairs: Sequence[Tuple[SparsePolynomial, SparsePolynomial]]):
        if not pairs:
            raise MinMaxInputError("ProductSumBody needs at least one (P, Q) pair")
        self.nvars = pairs[0][0].nvars
        for p, q in pairs:
            if p.nvars != self.nvars or q.nvars != self.nvars:
                raise MinMaxInputError("all factors of a ProductSumBody must share the variable count")
        self.pairs = tuple(pairs)

    @property
    def degree(self) -> int:
        return max(p.degree + q.degree for p, q in self.pairs)

    def values(self, points: np.ndarray) -> np.ndarray:
        total = np.zeros(points.shape[0])
        for p, q in self.pairs:
            total += p.values(points) * q.values(points)
        return total

    def gradients(self, points: np.ndarray) -> np.ndarray:
        total = np.zeros(points.shape)
        for p, q in self.pairs:
            pp, qp = p.powers(points), q.powers(points)
            total += p.gradients(points, pp) * q.values(points, qp)[:, None]
            total += q.gradients(points, qp) * p.values(points, pp)[:, None]
        return total

    def hessians(self, points: np.ndarray) -> np.ndarray:
        batch, nvars = points.shape
        total = np.zeros((batch, nvars, nvars))
        for p, q in self.pairs:
            pp, qp = p.powers(points), q.powers(points)
            pv, qv = p.values(points, pp), q.values(points, qp)
            pg, qg = p.gradients(points, pp), q.gradients(points, qp)
            cross = pg[:, :, None] * qg[:, None, :]
            total += p.hessians(points, pp) * qv[:, None, None]
            total += q.hessians(points, qp) * pv[:, None, None]
            total += cross + np.transpose(cross, (0, 2, 1))
        return total

    def expand(self) -> SparsePolynomial:
        result = SparsePolynomial(self.nvars)
        for p, q in self.pairs:
            result = result + p * q
        return result


Body = Union[SparsePolynomial, ProductSumBody]


# --- Min-max objectives ---

@dataclass(frozen=True, eq=False)
class MinMaxFunction:
    """
    Objective f(x, y) minimized over x (n variables), maximized over y (m variables).
    """
    n: int
    m: int
    body: Body
    label: str = ""
    builtin: Optional[str] = field(default=None)

    def __post_init__(self):
        require_count("n", self.n)
        require_count("m", self.m)
        if self.body.nvars != self.n + self.m:
            raise MinMaxInputError(
                f"body has {self.body.nvars} variables, expected n + m = {self.n + self.m}"
            )

    @property
    def dim(self) -> int:
        return self.n + self.m

    def _vector(self, p: Union[PointXY, Sequence[float], np.ndarray]) -> np.ndarray:
        if isinstance(p, PointXY):
            if p.x.shape[0] != self.n or p.y.shape[0] != self.m:
                raise MinMaxInputError(
                    f"point has dimensions ({p.x.shape[0]}, {p.y.shape[0]}), expected ({self.n}, {self.m})"
                )
            return p.vector
        z = require_finite("point", np.atleast_1d(np.asarray(p, dtype=float)))
        return require_length("point", z, self.dim)

    def _batch(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        if points.ndim != 2 or points.shape[1] != self.dim:
            raise MinMaxInputError(f"batch must have shape (B, {self.dim}), got {points.shape}")
        return points

    def point(self, z: Sequence[float]) -> PointXY:
        return PointXY.from_vector(self._vector(z), self.n)

    # single-point operations

    def evaluate(self, p) -> float:
        return float(self.body.values(self._vector(p)[None, :])[0])

    def gradient(self, p) -> Tuple[np.ndarray, np.ndarray]:
        g = self.full_gradient(p)
        return g[:self.n], g[self.n:]

    def full_gradient(self, p) -> np.ndarray:
        return self.body.gradients(self._vector(p)[None, :])[0]

    def hessian(self, p) -> HessianBlocks:
        return HessianBlocks.from_full(self.full_hessian(p), self.n)

    def full_hessian(self, p) -> np.ndarray:
        return self.body.hessians(self._vector(p)[None, :])[0]

    # batched operations

    def values(self, points: np.ndarray) -> np.ndarray:
        return self.body.values(self._batch(points))

    def gradients(self, points: np.ndarray) -> np.ndarray:
        return self.body.gradients(self._batch(points))

    def hessians(self, points: np.ndarray) -> np.ndarray:
        return self.body.hessians(self._batch(points))

    # structure

    def expand(self) -> SparsePolynomial:
        return self.body.expand()

    @cached_property
    def is_bilinear(self) -> bool:
        """True when f is exactly x^T A y (every term is one x-variable times one y-variable)."""
        poly = self.expand()
        if len(poly) == 0:
            return False
        for _, exponent in poly.terms:
            ex, ey = exponent[:self.n], exponent[self.n:]
            if sum(ex) != 1 or sum(ey) != 1:
                return False
        return True

    def display_name(self) -> str:
        return self.label or self.builtin or f"polynomial(n={self.n}, m={self.m})"


def lipschitz_estimate(f: MinMaxFunction, box: Box, samples: int, seed: int) -> float:
    """
    Sampled estimate of L = sup ||hess f||_2 over a box, times the 1.1 safety factor.

    This is not a certified bound; callers may always pass alpha directly.
    """
    samples = require_count("samples", samples)
    if box.dim != f.dim:
        raise MinMaxInputError(f"box has dimension {box.dim}, expected {f.dim}")
    rng = np.random.default_rng(seed)
    points = box.sample(rng, samples)
    hessians = f.hessians(points)
    # symmetric matrices: spectral norm = largest |eigenvalue|
    norms = np.max(np.abs(np.linalg.eigvalsh(hessians)), axis=1)
    return LIPSCHITZ_SAFETY_FACTOR * float(np.max(norms))


# --- Function file format ---

def function_to_dict(f: MinMaxFunction) -> Dict:
    poly = f.expand()
    return {
        "n": f.n,
        "m": f.m,
        "label": f.display_name(),
        "terms": [{"c": c, "e": list(e)} for c, e in poly.terms],
    }


def function_from_dict(raw: Dict) -> MinMaxFunction:
    """
    Builds a function from the JSON file layout.

    Raises:
        MinMaxInputError: naming the offending field or term index
    """
    if not isinstance(raw, dict):
        raise MinMaxInputError("function file must contain a JSON object")
    for key in ("n", "m", "terms"):
        if key not in raw:
            raise MinMaxInputError(f"function file is missing required key '{key}'")
    n, m = raw["n"], raw["m"]
    if not isinstance(n, int) or not isinstance(m, int) or n < 1 or m < 1:
        raise MinMaxInputError(f"'n' and 'm' must be integers >= 1, got n={n!r}, m={m!r}")
    if not isinstance(raw["terms"], list):
        raise MinMaxInputError("'terms' must be a list")

    terms = []
    for index, term in enumerate(raw["terms"]):
        if not isinstance(term, dict) or "c" not in term or "e" not in term:
            raise MinMaxInputError(f"term {index}: must be an object with keys 'c' and 'e', got {term!r}")
        coeff, exponents = term["c"], term["e"]
        if isinstance(coeff, bool) or not isinstance(coeff, (int, float)):
            raise MinMaxInputError(f"term {index}: coefficient must be a number, got {coeff!r}")
        if not isinstance(exponents, list):
            raise MinMaxInputError(f"term {index}: 'e' must be a list of integers, got {exponents!r}")
        terms.append((coeff, exponents))

    body = SparsePolynomial(n + m, terms)
    label = raw.get("label") or ""
    return MinMaxFunction(n=n, m=m, body=body, label=str(label))


def load_function_file(file_path: str) -> MinMaxFunction:
    """
    Loads a function JSON file.

    Raises:
        MinMaxInputError: if the file is missing, not JSON, or malformed
    """
    try:
        with open(file_path, "r", encoding="utf-8") as f:
            raw = json.load(f)
    except FileNotFoundError:
        raise MinMaxInputError(f"function file not found: {file_path}")
    except json.JSONDecodeError as e:
        raise MinMaxInputError(f"function file is not valid JSON: {file_path} ({e})")
    return function_from_dict(raw)
