"""
Jacobians of the GDA/OGDA update rules and spectra of real matrices.

With S = diag(-I_n, I_m) and the Hessian of f at a critical point:

    H       = S * hess f                          (so J_GDA = I + a*H)
    J_GDA   = I + a*H
    J_OGDA  = [[I + 2aH, -aH],
               [I,        0 ]]                    (at a lifted fixed point)

Each eigenvalue mu of H gives two eigenvalues of J_OGDA, the roots of
lambda^2 - lambda*(1 + 2r) + r = 0 with r = a*mu; equivalently
det(lambda*I - J_OGDA) = (2*lambda - 1)^(n+m) * det(z*I - J_GDA) with
z = (lambda^2 + lambda - 1) / (2*lambda - 1).

Eigenvalues come from LAPACK geev through scipy.linalg.eig (balancing,
Hessenberg reduction, shifted QR with deflation); every result carries a
backward-error residual and a reliability flag.
"""

import cmath
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from project.src.function_model import MinMaxFunction, PointXY
from project.src.utils.error_utils import MinMaxInputError, print_diagnostic
from project.src.utils.validation_utils import require_positive


MAX_EIG_DIM = 64
RESIDUAL_TOL = 1e-8
CONJUGATE_PAIR_TOL = 1e-10
MATCH_TOL = 1e-7


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    """Eigenvalues (with multiplicity) of a real square matrix."""
    eigenvalues: np.ndarray
    residual: float
    matrix_dim: int
    reliable: bool = True
    diagnostic: str = ""

    @property
    def radius(self) -> float:
        return float(np.max(np.abs(self.eigenvalues))) if self.eigenvalues.size else 0.0

    def to_dict(self) -> Dict:
        return {
            "dim": self.matrix_dim,
            "eigs": [{"re": float(z.real), "im": float(z.imag)} for z in self.eigenvalues],
            "residual": float(self.residual),
            "reliable": bool(self.reliable),
        }


# --- matrices ---

def _sign_matrix(f: MinMaxFunction) -> np.ndarray:
    return np.diag(np.concatenate([-np.ones(f.n), np.ones(f.m)]))


def h_gda(f: MinMaxFunction, p: PointXY) -> np.ndarray:
    """H = [[-hess_xx, -hess_xy], [hess_yx, hess_yy]] = diag(-I, I) * hess f."""
    return _sign_matrix(f) @ f.full_hessian(p)


def jacobian_gda(f: MinMaxFunction, p: PointXY, alpha: float) -> np.ndarray:
    alpha = require_positive("alpha", alpha)
    return np.eye(f.dim) + alpha * h_gda(f, p)


def _ogda_blocks(top_left: np.ndarray, top_right: np.ndarray) -> np.ndarray:
    d = top_left.shape[0]
    return np.block([[top_left, top_right], [np.eye(d), np.zeros((d, d))]])


def jacobian_ogda(f: MinMaxFunction, p: PointXY, alpha: float) -> np.ndarray:
    """Jacobian of the lifted OGDA map at the fixed point (x, y, x, y)."""
    alpha = require_positive("alpha", alpha)
    h = h_gda(f, p)
    return _ogda_blocks(np.eye(f.dim) + 2.0 * alpha * h, -alpha * h)


def jacobian_ogda_lifted(f: MinMaxFunction, cur: PointXY, prev: PointXY, alpha: float) -> np.ndarray:
    """Jacobian of the lifted OGDA map at an arbitrary state (cur, prev)."""
    alpha = require_positive("alpha", alpha)
    s = _sign_matrix(f)
    return _ogda_blocks(
        np.eye(f.dim) + 2.0 * alpha * (s @ f.full_hessian(cur)),
        -alpha * (s @ f.full_hessian(prev)),
    )


# --- eigenvalues ---

def _check_square(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise MinMaxInputError(f"expected a non-empty square matrix, got shape {m.shape}")
    if m.shape[0] > MAX_EIG_DIM:
        raise MinMaxInputError(f"matrix dimension {m.shape[0]} exceeds the supported {MAX_EIG_DIM}")
    if not np.all(np.isfinite(m)):
        raise MinMaxInputError("matrix has non-finite entries")
    return m


def _symmetrize_conjugates(eigs: np.ndarray, scale: float) -> np.ndarray:
    """Snaps near-real values to the real axis and makes complex pairs exact conjugates."""
    tol = CONJUGATE_PAIR_TOL * max(1.0, scale)
    eigs = eigs.astype(complex).copy()
    real = np.abs(eigs.imag) <= tol
    eigs[real] = eigs[real].real
    upper = [i for i in range(eigs.size) if not real[i] and eigs[i].imag > 0]
    lower = [i for i in range(eigs.size) if not real[i] and eigs[i].imag < 0]
    for i in upper:
        if not lower:
            break
        j = min(lower, key=lambda k: abs(eigs[k] - np.conj(eigs[i])))
        if abs(eigs[j] - np.conj(eigs[i])) <= tol:
            mean = 0.5 * (eigs[i] + np.conj(eigs[j]))
            eigs[i], eigs[j] = mean, np.conj(mean)
            lower.remove(j)
    return eigs


def eigenvalues(m: np.ndarray) -> SpectrumResult:
    """
    All complex eigenvalues of a real square matrix, with diagnostics.

    residual = max_i ||M v_i - l_i v_i|| / (||M||_2 ||v_i||); the result is
    flagged unreliable when it exceeds RESIDUAL_TOL or LAPACK fails.
    """
    m = _check_square(m)
    dim = m.shape[0]
    norm = float(scipy.linalg.norm(m, 2))
    try:
        eigs, vecs = scipy.linalg.eig(m, check_finite=False)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as e:
        print_diagnostic("spectral", f"eigenvalue iteration did not converge: {e}", always=True)
        return SpectrumResult(
            eigenvalues=np.full(dim, np.nan + 0j), residual=np.inf, matrix_dim=dim,
            reliable=False, diagnostic=f"no convergence: {e}",
        )

    if norm == 0.0:
        residual = 0.0
    else:
        errors = np.linalg.norm(m @ vecs - vecs * eigs[None, :], axis=0)
        residual = float(np.max(errors / (norm * np.linalg.norm(vecs, axis=0))))

    eigs = _symmetrize_conjugates(eigs, norm)
    order = np.lexsort((-eigs.imag, -eigs.real))
    reliable = bool(np.isfinite(residual) and residual <= RESIDUAL_TOL)
    diagnostic = "" if reliable else f"backward error {residual:.3e} exceeds {RESIDUAL_TOL:g}"
    return SpectrumResult(
        eigenvalues=eigs[order], residual=residual, matrix_dim=dim,
        reliable=reliable, diagnostic=diagnostic,
    )


def spectral_radius(m: np.ndarray) -> float:
    return eigenvalues(m).radius


# --- GDA <-> OGDA correspondence ---

def ogda_eigs_from_r(r: complex) -> Tuple[complex, complex]:
    """
    Roots of lambda^2 - lambda*(1 + 2r) + r = 0.

    The larger root is taken from the quadratic formula and the smaller one
    from the product of roots (= r) to avoid cancellation.
    """
    r = complex(r)
    b = 1.0 + 2.0 * r
    s = cmath.sqrt(1.0 + 4.0 * r * r)
    big = 0.5 * (b + s) if abs(b + s) >= abs(b - s) else 0.5 * (b - s)
    small = r / big if big != 0 else 0.5 * (b - s)
    return big, small


def ogda_roots_batch(r: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorized ogda_eigs_from_r over an array of r values."""
    r = np.asarray(r, dtype=complex)
    b = 1.0 + 2.0 * r
    s = np.sqrt(1.0 + 4.0 * r * r)
    big = np.where(np.abs(b + s) >= np.abs(b - s), 0.5 * (b + s), 0.5 * (b - s))
    with np.errstate(divide="ignore", invalid="ignore"):
        small = np.where(big != 0, r / np.where(big != 0, big, 1.0), 0.5 * (b - s))
    return big, small


def bilinear_ogda_eigs(alpha: float) -> np.ndarray:
    """
    Closed-form eigenvalues of J_OGDA for f = x*y at the origin:
    (1 +- sqrt(1 - 8a^2 +- 4 sqrt(4a^4 - a^2))) / 2.
    """
    a = complex(alpha)
    inner = cmath.sqrt(4.0 * a ** 4 - a ** 2)
    eigs = []
    for s_inner in (1.0, -1.0):
        outer = cmath.sqrt(1.0 - 8.0 * a ** 2 + s_inner * 4.0 * inner)
        eigs.extend([0.5 * (1.0 + outer), 0.5 * (1.0 - outer)])
    return np.array(eigs, dtype=complex)


def ogda_spectrum_from_h(h_spectrum: np.ndarray, alpha: float) -> np.ndarray:
    roots: List[complex] = []
    for mu in h_spectrum:
        roots.extend(ogda_eigs_from_r(alpha * mu))
    return np.array(roots, dtype=complex)


def match_multisets(a: Sequence[complex], b: Sequence[complex]) -> Tuple[bool, float]:
    """
    Greedy minimal-distance pairing of two multisets.

    Returns:
        (same size, largest distance among matched pairs)
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.size != b.size:
        return False, np.inf
    if a.size == 0:
        return True, 0.0
    dist = np.abs(a[:, None] - b[None, :])
    free_a, free_b = set(range(a.size)), set(range(b.size))
    worst = 0.0
    for flat in np.argsort(dist, axis=None, kind="stable"):
        i, j = divmod(int(flat), b.size)
        if i in free_a and j in free_b:
            worst = max(worst, float(dist[i, j]))
            free_a.discard(i)
            free_b.discard(j)
            if not free_a:
                break
    return True, worst


def gda_step_bound(h_spectrum: np.ndarray, margin: float = 1e-9) -> Optional[float]:
    """
    min over eigenvalues of H of -Re(l)/|l|^2 when every Re(l) < -margin, else None.

    Every 0 < a < bound gives |1 + a*l| < 1 for all eigenvalues l.
    """
    eigs = np.asarray(h_spectrum, dtype=complex)
    if eigs.size == 0 or np.any(eigs.real >= -margin):
        return None
    return float(np.min(-eigs.real / np.abs(eigs) ** 2))


# --- characteristic polynomial identity ---

def _char_poly(j: np.ndarray, lam: complex) -> complex:
    return complex(np.linalg.det(lam * np.eye(j.shape[0]) - j))


def char_poly_identity_terms(f: MinMaxFunction, p: PointXY, alpha: float, lam: complex) -> Tuple[complex, complex]:
    """Both sides of q_OGDA(l) = (2l - 1)^(n+m) q_GDA((l^2 + l - 1)/(2l - 1))."""
    lam = complex(lam)
    if abs(2.0 * lam - 1.0) == 0.0:
        raise MinMaxInputError("lambda = 1/2 is excluded from the characteristic polynomial identity")
    lhs = _char_poly(jacobian_ogda(f, p, alpha), lam)
    z = (lam * lam + lam - 1.0) / (2.0 * lam - 1.0)
    rhs = (2.0 * lam - 1.0) ** f.dim * _char_poly(jacobian_gda(f, p, alpha), z)
    return lhs, rhs


def char_poly_identity_check(f: MinMaxFunction, p: PointXY, alpha: float, sample_points: Sequence[complex]) -> float:
    """
    max over samples of |q_OGDA(l) - rhs(l)| / (1 + |q_OGDA(l)|).

    A sample where the two sides agree only up to sign is reported on stderr
    and excluded from the error (determinant manipulations preserve absolute
    value only).
    """
    worst = 0.0
    sign_only = 0
    for lam in sample_points:
        lhs, rhs = char_poly_identity_terms(f, p, alpha, lam)
        scale = 1.0 + abs(lhs)
        err = abs(lhs - rhs) / scale
        if err > MATCH_TOL and abs(lhs + rhs) / scale <= MATCH_TOL:
            sign_only += 1
            continue
        worst = max(worst, err)
    if sign_only:
        print_diagnostic("spectral", f"{sign_only} char-poly samples agree only up to sign", always=True)
    return worst


def ky_fan_gap(h: np.ndarray) -> float:
    """lambda_max((H + H^T)/2) - max Re(eig H); non-negative by the Ky Fan inequality."""
    h = _check_square(h)
    sym_max = float(np.max(np.linalg.eigvalsh(0.5 * (h + h.T))))
    return sym_max - float(np.max(eigenvalues(h).eigenvalues.real))
