"""
Classification of critical points.

For a critical point p of f the module answers:
  - is p a local min-max (three-valued second-order test) or strongly local min-max
  - is p stable under GDA / OGDA at a given step size (spectral radius of the Jacobian)
  - is p stable under GDA / OGDA for all sufficiently small step sizes
  - do the standing assumptions hold (invertible Hessian, no imaginary-axis spectrum of H)

Verdicts are computed, never looked up; reference tables only produce notes.
"""

import enum
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from project.src.critical_points import CriticalPointSet, find_critical_points
from project.src.function_model import LIPSCHITZ_SAFETY_FACTOR, Box, MinMaxFunction, PointXY
from project.src.spectral import (
    MATCH_TOL,
    SpectrumResult,
    eigenvalues,
    gda_step_bound,
    h_gda,
    jacobian_gda,
    jacobian_ogda,
    match_multisets,
    ogda_eigs_from_r,
    ogda_spectrum_from_h,
)
from project.src.utils.error_utils import ConsistencyError, MinMaxInputError, print_diagnostic
from project.src.utils.validation_utils import require_positive


CRIT_TOL = 1e-8
EIG_MARGIN = 1e-9
RHO_BAND = 1e-9
ASSUMPTION1_DET_TOL = 1e-10
OGDA_SWEEP_STEPS = 11
REFERENCE_MATCH_RADIUS = 1e-3
REFERENCE_VALUE_TOL = 5e-3


class MinMaxVerdict(str, enum.Enum):
    YES = "Yes"
    NO = "No"
    INDETERMINATE = "Indeterminate"


class Stability(str, enum.Enum):
    STABLE = "Stable"
    MARGINALLY_STABLE = "MarginallyStable"
    UNSTABLE = "Unstable"


class SmallAlphaVerdict(str, enum.Enum):
    STABLE = "Stable"
    UNSTABLE = "Unstable"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True, eq=False)
class StabilityReport:
    point: PointXY
    grad_norm: float
    f_value: float
    alpha: float
    local_minmax: MinMaxVerdict
    strongly_local_minmax: bool
    gda_at_alpha: Stability
    ogda_at_alpha: Stability
    gda_small_alpha: SmallAlphaVerdict
    ogda_small_alpha: SmallAlphaVerdict
    assumption1_holds: bool
    assumption2_holds: bool
    h_spectrum: SpectrumResult
    hyperbolic_gda: bool
    hyperbolic_ogda: bool
    unstable_dim_gda: int
    unstable_dim_ogda: int
    step_bound: Optional[float] = None
    multiplicity: int = 1
    notes: Tuple[str, ...] = field(default_factory=tuple)

    def to_dict(self) -> Dict:
        return {
            "point": list(self.point.as_tuple()),
            "grad_norm": self.grad_norm,
            "f_value": self.f_value,
            "alpha": self.alpha,
            "local_minmax": self.local_minmax.value,
            "strongly_local_minmax": self.strongly_local_minmax,
            "gda_at_alpha": self.gda_at_alpha.value,
            "ogda_at_alpha": self.ogda_at_alpha.value,
            "gda_small_alpha": self.gda_small_alpha.value,
            "ogda_small_alpha": self.ogda_small_alpha.value,
            "assumption1_holds": self.assumption1_holds,
            "assumption2_holds": self.assumption2_holds,
            "hyperbolic_gda": self.hyperbolic_gda,
            "hyperbolic_ogda": self.hyperbolic_ogda,
            "unstable_dim_gda": self.unstable_dim_gda,
            "unstable_dim_ogda": self.unstable_dim_ogda,
            "step_bound": self.step_bound,
            "multiplicity": self.multiplicity,
            "h_spectrum": self.h_spectrum.to_dict(),
            "notes": list(self.notes),
        }


# --- helpers ---

def _require_critical(f: MinMaxFunction, p: PointXY) -> float:
    grad_norm = float(np.linalg.norm(f.full_gradient(p)))
    if grad_norm > CRIT_TOL:
        raise MinMaxInputError(
            f"point {p.as_tuple()} is not critical: ||grad f|| = {grad_norm:.3e} > {CRIT_TOL:g}"
        )
    return grad_norm


def _reliable(result: SpectrumResult, what: str) -> SpectrumResult:
    if not result.reliable:
        raise ConsistencyError(f"unreliable spectrum of {what}: {result.diagnostic}")
    return result


def _h_spectrum(f: MinMaxFunction, p: PointXY) -> SpectrumResult:
    return _reliable(eigenvalues(h_gda(f, p)), "H")


def _rho_verdict(rho: float) -> Stability:
    if rho < 1.0 - RHO_BAND:
        return Stability.STABLE
    if rho > 1.0 + RHO_BAND:
        return Stability.UNSTABLE
    return Stability.MARGINALLY_STABLE


def _unit_circle_profile(eigs: np.ndarray) -> Tuple[bool, int]:
    """(hyperbolic, number of eigenvalues strictly outside the unit circle)."""
    mags = np.abs(eigs)
    hyperbolic = bool(np.all(np.abs(mags - 1.0) > RHO_BAND))
    return hyperbolic, int(np.sum(mags > 1.0 + RHO_BAND))


def _block_extremes(f: MinMaxFunction, p: PointXY) -> Tuple[float, float]:
    """(lambda_min of hess_xx, lambda_max of hess_yy)."""
    blocks = f.hessian(p)
    xx = 0.5 * (blocks.xx + blocks.xx.T)
    yy = 0.5 * (blocks.yy + blocks.yy.T)
    return float(np.linalg.eigvalsh(xx)[0]), float(np.linalg.eigvalsh(yy)[-1])


def local_lipschitz(f: MinMaxFunction, p: PointXY) -> float:
    """1.1 * ||hess f(p)||_2, floored at a tiny positive value."""
    norm = float(np.max(np.abs(np.linalg.eigvalsh(f.full_hessian(p)))))
    return LIPSCHITZ_SAFETY_FACTOR * max(norm, 1e-12)


# --- local min-max ---

def local_minmax_test(f: MinMaxFunction, p: PointXY) -> MinMaxVerdict:
    """
    Second-order local min-max test.

    Yes when hess_xx > 0 and hess_yy < 0 (sufficient); No when hess_xx has a
    negative or hess_yy a positive eigenvalue (necessary condition fails);
    Indeterminate on the semidefinite boundary. Pure bilinear objectives
    x^T A y satisfy the definition directly and always give Yes.
    """
    _require_critical(f, p)
    if f.is_bilinear:
        return MinMaxVerdict.YES
    xx_min, yy_max = _block_extremes(f, p)
    if xx_min > EIG_MARGIN and yy_max < -EIG_MARGIN:
        return MinMaxVerdict.YES
    if xx_min < -EIG_MARGIN or yy_max > EIG_MARGIN:
        return MinMaxVerdict.NO
    return MinMaxVerdict.INDETERMINATE


def strongly_local_minmax_test(f: MinMaxFunction, p: PointXY) -> bool:
    _require_critical(f, p)
    xx_min, yy_max = _block_extremes(f, p)
    return xx_min > EIG_MARGIN and yy_max < -EIG_MARGIN


# --- stability at a fixed step size ---

def _gda_at_alpha(f: MinMaxFunction, p: PointXY, alpha: float) -> Tuple[Stability, np.ndarray]:
    spec = _reliable(eigenvalues(jacobian_gda(f, p, alpha)), "J_GDA")
    return _rho_verdict(spec.radius), spec.eigenvalues


def gda_stability_at_alpha(f: MinMaxFunction, p: PointXY, alpha: float) -> Stability:
    _require_critical(f, p)
    return _gda_at_alpha(f, p, alpha)[0]


def _ogda_at_alpha(f: MinMaxFunction, p: PointXY, alpha: float, h_spec: np.ndarray) -> Tuple[Stability, np.ndarray]:
    spec = _reliable(eigenvalues(jacobian_ogda(f, p, alpha)), "J_OGDA")
    predicted = ogda_spectrum_from_h(h_spec, alpha)
    same_size, distance = match_multisets(spec.eigenvalues, predicted)
    scale = max(1.0, spec.radius)
    if not same_size or distance > MATCH_TOL * scale:
        raise ConsistencyError(
            f"J_OGDA spectrum at {p.as_tuple()} disagrees with the roots built from spec(H): "
            f"max pairing distance {distance:.3e} > {MATCH_TOL:g}"
        )
    return _rho_verdict(spec.radius), spec.eigenvalues


def ogda_stability_at_alpha(f: MinMaxFunction, p: PointXY, alpha: float) -> Stability:
    """
    Spectral-radius verdict for the lifted OGDA Jacobian.

    Raises:
        ConsistencyError: if the eigensolver's spectrum of J_OGDA and the
            spectrum predicted from spec(H) differ by more than 1e-7
    """
    _require_critical(f, p)
    alpha = require_positive("alpha", alpha)
    return _ogda_at_alpha(f, p, alpha, _h_spectrum(f, p).eigenvalues)[0]


# --- small step sizes ---

def _gda_small_alpha(h_spec: np.ndarray) -> SmallAlphaVerdict:
    re, im = h_spec.real, h_spec.imag
    on_axis = np.abs(re) <= EIG_MARGIN
    if np.any(re > EIG_MARGIN) or np.any(on_axis & (np.abs(im) > EIG_MARGIN)):
        # |1 + a*l|^2 = 1 + a^2 |l|^2 > 1 for purely imaginary l, for every a
        return SmallAlphaVerdict.UNSTABLE
    if np.all(re < -EIG_MARGIN):
        return SmallAlphaVerdict.STABLE
    return SmallAlphaVerdict.INDETERMINATE


def gda_stability_small_alpha(f: MinMaxFunction, p: PointXY) -> SmallAlphaVerdict:
    _require_critical(f, p)
    return _gda_small_alpha(_h_spectrum(f, p).eigenvalues)


def ogda_root_magnitude(h_spec: np.ndarray, alpha: float) -> float:
    """Largest |root| over both OGDA roots of every r = alpha * mu, mu in spec(H)."""
    return max(abs(root) for mu in h_spec for root in ogda_eigs_from_r(alpha * mu))


def _ogda_expectation(h_spec: np.ndarray) -> SmallAlphaVerdict:
    re, im = h_spec.real, h_spec.imag
    if np.any(re > EIG_MARGIN):
        return SmallAlphaVerdict.UNSTABLE
    if np.any(np.abs(h_spec) <= EIG_MARGIN):
        return SmallAlphaVerdict.INDETERMINATE
    if np.all((re < -EIG_MARGIN) | (np.abs(im) > EIG_MARGIN)):
        return SmallAlphaVerdict.STABLE
    return SmallAlphaVerdict.INDETERMINATE


def _ogda_small_alpha(h_spec: np.ndarray, lipschitz: float) -> SmallAlphaVerdict:
    beta = 1.0 / (4.0 * lipschitz)
    stable = [
        ogda_root_magnitude(h_spec, beta * 2.0 ** (-k)) <= 1.0 + EIG_MARGIN
        for k in range(OGDA_SWEEP_STEPS)
    ]
    if all(stable):
        verdict = SmallAlphaVerdict.STABLE
    elif not any(stable):
        verdict = SmallAlphaVerdict.UNSTABLE
    else:
        verdict = SmallAlphaVerdict.INDETERMINATE

    expected = _ogda_expectation(h_spec)
    if expected is not SmallAlphaVerdict.INDETERMINATE and verdict is not expected:
        print_diagnostic(
            "classify", f"OGDA step-size sweep gave {verdict.value}, spectrum of H suggests {expected.value}", always=True
        )
    return verdict


def ogda_stability_small_alpha(f: MinMaxFunction, p: PointXY, lipschitz: Optional[float] = None) -> SmallAlphaVerdict:
    """
    OGDA verdict for all small step sizes.

    Sweeps a_k = beta * 2^-k for k = 0..10 with beta = 1/(4 L), where L is the
    given Lipschitz estimate or, by default, 1.1 * ||hess f(p)||_2.
    """
    _require_critical(f, p)
    lip = local_lipschitz(f, p) if lipschitz is None else require_positive("lipschitz", lipschitz)
    return _ogda_small_alpha(_h_spectrum(f, p).eigenvalues, lip)


# --- assumptions ---

def assumption_checks(
    f: MinMaxFunction,
    p: PointXY,
    box: Optional[Box] = None,
    samples: int = 0,
    seed: int = 0,
) -> Tuple[bool, bool]:
    """
    (assumption1, assumption2).

    assumption1: |det hess f| > 1e-10 at p and at `samples` uniform points of box.
    assumption2: no eigenvalue of H at p has |Re| <= 1e-9.
    """
    points = f._vector(p)[None, :]
    if box is not None and samples > 0:
        points = np.concatenate([points, box.sample(np.random.default_rng(seed), samples)], axis=0)
    dets = np.abs(np.linalg.det(f.hessians(points)))
    assumption1 = bool(np.min(dets) > ASSUMPTION1_DET_TOL)
    h_spec = _h_spectrum(f, p).eigenvalues
    assumption2 = bool(np.min(np.abs(h_spec.real)) > EIG_MARGIN)
    return assumption1, assumption2


# --- reports ---

def classify_point(
    f: MinMaxFunction,
    p: PointXY,
    alpha: float,
    lipschitz: Optional[float] = None,
    box: Optional[Box] = None,
    assumption_samples: int = 0,
    seed: int = 0,
    multiplicity: int = 1,
) -> StabilityReport:
    """Builds the full StabilityReport for one critical point."""
    alpha = require_positive("alpha", alpha)
    grad_norm = _require_critical(f, p)
    h_spec = _h_spectrum(f, p)
    lip = local_lipschitz(f, p) if lipschitz is None else require_positive("lipschitz", lipschitz)

    gda_verdict, gda_eigs = _gda_at_alpha(f, p, alpha)
    ogda_verdict, ogda_eigs = _ogda_at_alpha(f, p, alpha, h_spec.eigenvalues)
    gda_small = _gda_small_alpha(h_spec.eigenvalues)
    ogda_small = _ogda_small_alpha(h_spec.eigenvalues, lip)
    hyper_gda, udim_gda = _unit_circle_profile(gda_eigs)
    hyper_ogda, udim_ogda = _unit_circle_profile(ogda_eigs)
    a1, a2 = assumption_checks(f, p, box, assumption_samples, seed)
    minmax = local_minmax_test(f, p)

    notes: List[str] = []
    if gda_small is SmallAlphaVerdict.STABLE and ogda_small is not SmallAlphaVerdict.STABLE:
        notes.append(f"GDA-stable point is OGDA {ogda_small.value} for small steps")
    if a2 and minmax is MinMaxVerdict.YES and gda_small is not SmallAlphaVerdict.STABLE:
        notes.append(f"local min-max point is GDA {gda_small.value} for small steps")
    for note in notes:
        print_diagnostic("classify", f"{p.as_tuple()}: {note}", always=True)

    return StabilityReport(
        point=p,
        grad_norm=grad_norm,
        f_value=f.evaluate(p),
        alpha=alpha,
        local_minmax=minmax,
        strongly_local_minmax=strongly_local_minmax_test(f, p),
        gda_at_alpha=gda_verdict,
        ogda_at_alpha=ogda_verdict,
        gda_small_alpha=gda_small,
        ogda_small_alpha=ogda_small,
        assumption1_holds=a1,
        assumption2_holds=a2,
        h_spectrum=h_spec,
        hyperbolic_gda=hyper_gda,
        hyperbolic_ogda=hyper_ogda,
        unstable_dim_gda=udim_gda,
        unstable_dim_ogda=udim_ogda,
        step_bound=gda_step_bound(h_spec.eigenvalues),
        multiplicity=multiplicity,
        notes=tuple(notes),
    )


def full_report(
    f: MinMaxFunction,
    box: Box,
    alpha: float,
    seeds: int = 200,
    seed: int = 0,
    critical_points: Optional[CriticalPointSet] = None,
    assumption_samples: int = 100,
) -> List[StabilityReport]:
    """
    One StabilityReport per critical point of f in box, sorted by coordinates.

    Args:
        f: objective
        box: search region for critical points (and Assumption 1 samples)
        alpha: step size for the at-alpha verdicts
        seeds: random Newton starts
        seed: RNG seed for Newton starts and assumption samples
        critical_points: skip the search and classify these points instead
        assumption_samples: extra box points checked for an invertible Hessian
    """
    if critical_points is None:
        critical_points = find_critical_points(f, box, seeds=seeds, seed=seed)
    reports = [
        classify_point(f, p, alpha, box=box, assumption_samples=assumption_samples, seed=seed, multiplicity=k)
        for p, k in zip(critical_points.points, critical_points.merged_multiplicity)
    ]
    return sorted(reports, key=lambda r: r.point.as_tuple())


def reference_discrepancies(reports: Sequence[StabilityReport], reference: Sequence[Dict]) -> List[str]:
    """
    Compares computed verdicts with reference rows (see path_utils.parse_reference_table).

    GDA/OGDA columns are compared with the small-step verdicts. Computed
    values are never changed; the returned notes describe every mismatch.
    """
    notes: List[str] = []
    for row in reference:
        target = np.asarray(row["point"], dtype=float)
        label = ", ".join(f"{c:g}" for c in row["point"])
        matches = [
            r for r in reports
            if r.point.vector.shape == target.shape and np.linalg.norm(r.point.vector - target) <= REFERENCE_MATCH_RADIUS
        ]
        if not matches:
            notes.append(f"reference point ({label}) is not among the computed critical points")
            continue
        r = min(matches, key=lambda rep: np.linalg.norm(rep.point.vector - target))
        checks = [
            ("GDA-stable", row["gda_stable"], r.gda_small_alpha is SmallAlphaVerdict.STABLE, r.gda_small_alpha.value),
            ("OGDA-stable", row["ogda_stable"], r.ogda_small_alpha is SmallAlphaVerdict.STABLE, r.ogda_small_alpha.value),
            ("local min-max", row["local_minmax"], r.local_minmax is MinMaxVerdict.YES, r.local_minmax.value),
        ]
        for name, expected, computed, shown in checks:
            if expected != computed:
                notes.append(
                    f"({label}): reference says {name} {'YES' if expected else 'NO'}, computed {shown}"
                )
        if abs(row["f_value"] - r.f_value) > REFERENCE_VALUE_TOL:
            notes.append(f"({label}): reference f = {row['f_value']:g}, computed {r.f_value:.6g}")

    for r in reports:
        if not any(
            r.point.vector.shape == np.asarray(row["point"]).shape
            and np.linalg.norm(r.point.vector - np.asarray(row["point"], dtype=float)) <= REFERENCE_MATCH_RADIUS
            for row in reference
        ):
            notes.append(f"computed critical point {_format_point(r.point)} has no reference row")
    return notes


def attach_notes(reports: Sequence[StabilityReport], notes: Sequence[str]) -> List[StabilityReport]:
    """Returns copies of reports where each note mentioning a point's label is attached to it."""
    attached = []
    for r in reports:
        label = _format_point(r.point, digits=4)
        extra = tuple(n for n in notes if n.startswith(label))
        attached.append(replace(r, notes=r.notes + extra) if extra else r)
    return attached


# --- rendering ---

def _format_point(p: PointXY, digits: int = 4) -> str:
    # + 0.0 turns -0.0 into 0.0
    return "(" + ", ".join(f"{round(v, digits) + 0.0:g}" for v in p.as_tuple()) + ")"


def reports_to_markdown(reports: Sequence[StabilityReport], notes: Sequence[str] = ()) -> str:
    """Markdown table with one row per critical point, followed by notes."""
    header = [
        "Critical point", "f", "Local min-max", "GDA-stable (small a)", "OGDA-stable (small a)",
        "GDA at a", "OGDA at a", "Assumption 1", "Assumption 2",
    ]
    lines = [
        "| " + " | ".join(header) + " |",
        "|" + "|".join("---" for _ in header) + "|",
    ]
    for r in reports:
        cells = [
            _format_point(r.point),
            f"{r.f_value:.4g}",
            r.local_minmax.value,
            r.gda_small_alpha.value,
            r.ogda_small_alpha.value,
            r.gda_at_alpha.value,
            r.ogda_at_alpha.value,
            "yes" if r.assumption1_holds else "no",
            "yes" if r.assumption2_holds else "no",
        ]
        lines.append("| " + " | ".join(cells) + " |")
    all_notes = [n for r in reports for n in r.notes if n not in notes] + list(notes)
    if reports:
        lines.append("")
        lines.append(f"Step size a = {reports[0].alpha:g}")
    if all_notes:
        lines.append("")
        lines.append("Notes:")
        lines.extend(f"- {n}" for n in dict.fromkeys(all_notes))
    return "\n".join(lines) + "\n"


def reports_to_json(reports: Sequence[StabilityReport]) -> List[Dict]:
    return [r.to_dict() for r in reports]
