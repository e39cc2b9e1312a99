"""
Catalog of named example objectives.

  xy           f = x*y                                    (local min-max, GDA-unstable)
  f1           f = -x^2/8 - y^2/2 + 0.6*x*y                (GDA-stable, not local min-max)
  f2           f = x^2/2 + y^2/2 + 4*x*y                   (OGDA-stable, GDA-unstable)
  w            f = sum_i (x_i^2 - y_i^2), 5 + 5 variables (strongly local min-max at 0)
  composite2d  f = f1(x-1,y-1)x^2y^2 + f2(x,y)(x-1)^2(y-1)^2
  planted10d   f = p(x,y) * sum_i (x_i^3 + y_i^3) + w(x,y), p random of degree 3
  bilinear     f = x^T A y

composite2d places f2 at the origin and a copy of f1 at (1, 1). x^2y^2 vanishes
to second order on both axes and (x-1)^2(y-1)^2 on the lines x = 1 and y = 1,
so all four corners of the unit square are critical points with value 0. A
fifth critical point sits near (0.3302, 0.3358) with f close to 0.1096.
"""

import itertools
from typing import Callable, Dict, Optional, Sequence

import numpy as np

from project.src.function_model import MinMaxFunction, ProductSumBody, SparsePolynomial
from project.src.utils.error_utils import MinMaxInputError


PLANTED_HALF_DIM = 5
PLANTED_DEGREE = 3


def _quadratic_2d(a_xx: float, a_yy: float, a_xy: float) -> SparsePolynomial:
    """a_xx*x^2 + a_yy*y^2 + a_xy*x*y in variables (x, y)."""
    return SparsePolynomial(2, [(a_xx, (2, 0)), (a_yy, (0, 2)), (a_xy, (1, 1))])


def f1_polynomial() -> SparsePolynomial:
    return _quadratic_2d(-1.0 / 8.0, -0.5, 0.6)


def f2_polynomial() -> SparsePolynomial:
    return _quadratic_2d(0.5, 0.5, 4.0)


def make_xy() -> MinMaxFunction:
    return MinMaxFunction(n=1, m=1, body=SparsePolynomial(2, [(1.0, (1, 1))]), label="xy", builtin="xy")


def make_f1() -> MinMaxFunction:
    return MinMaxFunction(n=1, m=1, body=f1_polynomial(), label="f1", builtin="f1")


def make_f2() -> MinMaxFunction:
    return MinMaxFunction(n=1, m=1, body=f2_polynomial(), label="f2", builtin="f2")


def w_polynomial(half_dim: int = PLANTED_HALF_DIM) -> SparsePolynomial:
    nvars = 2 * half_dim
    terms = []
    for i in range(half_dim):
        terms.append((1.0, [2 if v == i else 0 for v in range(nvars)]))
        terms.append((-1.0, [2 if v == half_dim + i else 0 for v in range(nvars)]))
    return SparsePolynomial(nvars, terms)


def make_w() -> MinMaxFunction:
    return MinMaxFunction(
        n=PLANTED_HALF_DIM, m=PLANTED_HALF_DIM, body=w_polynomial(), label="w", builtin="w"
    )


def make_composite2d() -> MinMaxFunction:
    x = SparsePolynomial.variable(2, 0)
    y = SparsePolynomial.variable(2, 1)
    corner_weight = (x - 1.0) ** 2 * (y - 1.0) ** 2
    origin_weight = x ** 2 * y ** 2
    body = f1_polynomial().shift([-1.0, -1.0]) * origin_weight + f2_polynomial() * corner_weight
    return MinMaxFunction(n=1, m=1, body=body, label="composite2d", builtin="composite2d")


def random_polynomial(nvars: int, degree: int, rng: np.random.Generator) -> SparsePolynomial:
    """All monomials of total degree <= degree with i.i.d. U[-1, 1] coefficients (grlex order)."""
    terms = []
    for d in range(degree + 1):
        for combo in itertools.combinations_with_replacement(range(nvars), d):
            exponent = [0] * nvars
            for v in combo:
                exponent[v] += 1
            terms.append((rng.uniform(-1.0, 1.0), exponent))
    return SparsePolynomial(nvars, terms)


def make_planted10d(seed: int = 0) -> MinMaxFunction:
    nvars = 2 * PLANTED_HALF_DIM
    rng = np.random.default_rng(seed)
    p = random_polynomial(nvars, PLANTED_DEGREE, rng)
    cubes = SparsePolynomial(nvars, [(1.0, [3 if u == v else 0 for u in range(nvars)]) for v in range(nvars)])
    one = SparsePolynomial.constant(nvars, 1.0)
    body = ProductSumBody([(p, cubes), (w_polynomial(), one)])
    return MinMaxFunction(
        n=PLANTED_HALF_DIM,
        m=PLANTED_HALF_DIM,
        body=body,
        label=f"planted10d(seed={seed})",
        builtin="planted10d",
    )


def make_bilinear(matrix: Sequence[Sequence[float]]) -> MinMaxFunction:
    a = np.atleast_2d(np.asarray(matrix, dtype=float))
    if a.ndim != 2 or a.size == 0:
        raise MinMaxInputError(f"bilinear needs a non-empty 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise MinMaxInputError("bilinear matrix must be finite")
    n, m = a.shape
    terms = []
    for i in range(n):
        for j in range(m):
            exponent = [0] * (n + m)
            exponent[i] = 1
            exponent[n + j] = 1
            terms.append((a[i, j], exponent))
    return MinMaxFunction(
        n=n, m=m, body=SparsePolynomial(n + m, terms), label=f"bilinear({n}x{m})", builtin="bilinear"
    )


_SIMPLE: Dict[str, Callable[[], MinMaxFunction]] = {
    "xy": make_xy,
    "f1": make_f1,
    "f2": make_f2,
    "w": make_w,
    "composite2d": make_composite2d,
}

BUILTIN_NAMES = tuple(sorted(list(_SIMPLE) + ["planted10d", "bilinear"]))


def builtin(name: str, seed: Optional[int] = None, matrix: Optional[Sequence[Sequence[float]]] = None) -> MinMaxFunction:
    """
    Returns the named catalog function.

    Args:
        name: one of BUILTIN_NAMES
        seed: coefficient seed for planted10d (default 0)
        matrix: coupling matrix for bilinear

    Raises:
        MinMaxInputError: unknown name or missing matrix
    """
    if name in _SIMPLE:
        return _SIMPLE[name]()
    if name == "planted10d":
        return make_planted10d(0 if seed is None else int(seed))
    if name == "bilinear":
        if matrix is None:
            raise MinMaxInputError("builtin 'bilinear' needs a matrix, e.g. 'bilinear:1,0;0,1'")
        return make_bilinear(matrix)
    raise MinMaxInputError(f"unknown builtin '{name}'; choose one of {', '.join(BUILTIN_NAMES)}")


def parse_builtin_spec(spec: str, default_seed: Optional[int] = None) -> MinMaxFunction:
    """
    Parses a CLI builtin reference.

    Accepted forms: "f1", "planted10d", "planted10d:7" (explicit seed),
    "bilinear:1,2,3;4,5,6" (matrix rows separated by ';').
    """
    name, _, arg = spec.partition(":")
    name = name.strip()
    if name == "planted10d":
        seed = default_seed
        if arg:
            try:
                seed = int(arg)
            except ValueError:
                raise MinMaxInputError(f"planted10d seed must be an integer, got {arg!r}")
        return builtin(name, seed=seed)
    if name == "bilinear":
        if not arg:
            return builtin(name)
        try:
            rows = [[float(v) for v in row.split(",")] for row in arg.split(";")]
        except ValueError:
            raise MinMaxInputError(f"bilinear matrix must be numbers like '1,0;0,1', got {arg!r}")
        if len({len(r) for r in rows}) != 1:
            raise MinMaxInputError(f"bilinear matrix rows must have equal length, got {arg!r}")
        return builtin(name, matrix=rows)
    if arg:
        raise MinMaxInputError(f"builtin '{name}' takes no argument, got {arg!r}")
    return builtin(name)
