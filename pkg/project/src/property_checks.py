"""
Numerical property suite behind the `check` command.

Each check takes a PropertyContext (objective, step size, sampling box,
critical points, seed) and a PropertySpec from workflows/property_checks.yaml
(sample count, tolerance) and returns a PropertyResult. Checks are pure; in
strict mode the suite raises PropertyFailure after running everything.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Dict, List, Optional

import numpy as np

from project.src.classify import (
    MinMaxVerdict,
    SmallAlphaVerdict,
    StabilityReport,
    classify_point,
)
from project.src.critical_points import CriticalPointSet, find_critical_points
from project.src.function_model import LIPSCHITZ_SAFETY_FACTOR, Box, MinMaxFunction, PointXY
from project.src.spectral import (
    bilinear_ogda_eigs,
    char_poly_identity_check,
    eigenvalues,
    h_gda,
    jacobian_gda,
    jacobian_ogda,
    jacobian_ogda_lifted,
    ky_fan_gap,
    match_multisets,
    ogda_roots_batch,
    ogda_spectrum_from_h,
)
from project.src.utils.error_utils import MinMaxInputError, PropertyFailure, print_diagnostic
from project.src.workflow_parser import PropertySpec, PropertySuite, parse_property_suite


@dataclass
class PropertyContext:
    f: MinMaxFunction
    alpha: float
    box: Box
    seed: int = 0
    critical_points: Optional[CriticalPointSet] = None
    newton_seeds: int = 200

    def rng(self, offset: int) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=(offset,)))

    @cached_property
    def points(self) -> List[PointXY]:
        if self.critical_points is None:
            self.critical_points = find_critical_points(self.f, self.box, seeds=self.newton_seeds, seed=self.seed)
        return list(self.critical_points.points)

    @cached_property
    def reports(self) -> List[StabilityReport]:
        return [classify_point(self.f, p, self.alpha) for p in self.points]


@dataclass
class PropertyResult:
    name: str
    passed: bool
    worst: float
    tolerance: float
    samples: int
    detail: str = ""

    def to_dict(self) -> Dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "worst": self.worst,
            "tolerance": self.tolerance,
            "samples": self.samples,
            "detail": self.detail,
        }


def _result(spec: PropertySpec, passed: bool, worst: float, samples: int, detail: str = "") -> PropertyResult:
    return PropertyResult(spec.name, bool(passed), float(worst), spec.tolerance, int(samples), detail)


def _vacuous(spec: PropertySpec, detail: str) -> PropertyResult:
    return PropertyResult(spec.name, True, 0.0, spec.tolerance, 0, f"vacuous: {detail}")


def _annulus_samples(rng: np.random.Generator, count: int) -> np.ndarray:
    """Complex lambda with 0.6 <= |lambda| <= 3 and |lambda - 1/2| > 0.1."""
    out: List[complex] = []
    while len(out) < count:
        radius = rng.uniform(0.6, 3.0)
        angle = rng.uniform(0.0, 2.0 * np.pi)
        lam = radius * np.exp(1j * angle)
        if abs(lam - 0.5) > 0.1:
            out.append(lam)
    return np.array(out)


# --- checks ---

def check_char_poly_identity(ctx: PropertyContext, spec: PropertySpec) -> PropertyResult:
    points = ctx.points or [ctx.f.point(np.zeros(ctx.f.dim))]
    rng = ctx.rng(1)
    worst = max(
        char_poly_identity_check(ctx.f, p, ctx.alpha, _annulus_samples(rng, spec.samples)) for p in points
    )
    return _result(spec, worst <= spec.tolerance, worst, spec.samples * len(points))


def check_ogda_root_sweep(ctx: PropertyContext, spec: PropertySpec) -> PropertyResult:
    """|r| < 1/2 and |1 + r| < 1 imply both OGDA roots lie in the closed unit disc."""
    rng = ctx.rng(2)
    rs = np.empty(0, dtype=complex)
    while rs.size < spec.samples:
        cand = rng.uniform(-0.5, 0.5, 2 * spec.samples) + 1j * rng.uniform(-0.5, 0.5, 2 * spec.samples)
        cand = cand[(np.abs(cand) < 0.5) & (np.abs(1.0 + cand) < 1.0)]
        rs = np.concatenate([rs, cand])
    rs = rs[:spec.samples]
    big, small = ogda_roots_batch(rs)
    worst = float(np.max(np.maximum(np.abs(big), np.abs(small))) - 1.0)
    violations = int(np.sum(np.maximum(np.abs(big), np.abs(small)) > 1.0 + spec.tolerance))
    return _result(spec, violations == 0, worst, spec.samples, f"{violations} violations")


def check_bilinear_alpha_sweep(ctx: PropertyContext, spec: PropertySpec) -> PropertyResult:
    """For f = x*y and every a in (0, 1/2), the four OGDA eigenvalues have modulus <= 1."""
    alphas = ctx.rng(3).uniform(0.0, 0.5, spec.samples)
    alphas = alphas[alphas > 0.0]
    worst = max(float(np.max(np.abs(bilinear_ogda_eigs(a)))) for a in alphas) - 1.0
    return _result(spec, worst <= spec.tolerance, worst, alphas.size)


def check_ky_fan(ctx: PropertyContext, spec: PropertySpec) -> PropertyResult:
    """max Re(eig H) <= lambda_max((H + H^T)/2) at random points."""
    points = ctx.box.sample(ctx.rng(4), spec.samples)
    worst = 0.0
    for z in points:
        h = h_gda(ctx.f, z)
        scale = max(1.0, float(np.max(np.abs(h))))
        worst = max(worst, -ky_fan_gap(h) / scale)
    return _result(spec, worst <= spec.tolerance, worst, spec.samples)


def _sampled_hessians(ctx: PropertyContext, offset: int, count: int):
    points = ctx.box.sample(ctx.rng(offset), count)
    hessians = ctx.f.hessians(points)
    norms = np.max(np.abs(np.linalg.eigvalsh(hessians)), axis=1)
    return points, hessians, norms


def check_gda_diffeomorphism(ctx: PropertyContext, spec: PropertySpec) -> PropertyResult:
    """det J_GDA != 0 for a < 1/L, L estimated from the same sample points."""
    points, _, norms = _sampled_hessians(ctx, 5, spec.samples)
    lip = LIPSCHITZ_SAFETY_FACTOR * max(float(np.max(norms)), 1e-12)
    alpha = min(ctx.alpha, 0.9 / lip)
    smallest = min(abs(float(np.linalg.det(jacobian_gda(ctx.f, z, alpha)))) for z in points)
    return _result(spec, smallest > spec.tolerance, smallest, spec.samples, f"alpha = {alpha:.3g}")


def check_ogda_diffeomorphism(ctx: PropertyContext, spec: PropertySpec) -> PropertyResult:
    """
    |det J_lifted(cur, prev)| = a^d |det hess f(prev)|, nonzero wherever the
    Hessian is invertible; compared as a relative error.
    """
    rng = ctx.rng(6)
    curs = ctx.box.sample(rng, spec.samples)
    prevs = ctx.box.sample(rng, spec.samples)
    d = ctx.f.dim
    worst, used = 0.0, 0
    for cur, prev in zip(curs, prevs):
        hess_det = abs(float(np.linalg.det(ctx.f.full_hessian(prev))))
        if hess_det <= 1e-10:
            continue
        used += 1
        jac = jacobian_ogda_lifted(ctx.f, ctx.f.point(cur), ctx.f.point(prev), ctx.alpha)
        _, logdet = np.linalg.slogdet(jac)
        predicted = d * np.log(ctx.alpha) + np.log(hess_det)
        worst = max(worst, abs(logdet - predicted))
    if used == 0:
        return _vacuous(spec, "Hessian singular at every sample")
    return _result(spec, worst <= spec.tolerance, worst, used)


def check_rho_h_bounded(ctx: PropertyContext, spec: PropertySpec) -> PropertyResult:
    """rho(H) <= ||hess f||_2 at random points."""
    points, _, norms = _sampled_hessians(ctx, 7, spec.samples)
    worst = 0.0
    for z, norm in zip(points, norms):
        rho = eigenvalues(h_gda(ctx.f, z)).radius
        worst = max(worst, (rho - norm) / max(1.0, norm))
    return _result(spec, worst <= spec.tolerance, worst, spec.samples)


def check_half_not_eigenvalue(ctx: PropertyContext, spec: PropertySpec) -> PropertyResult:
    if not ctx.points:
        return _vacuous(spec, "no critical points in the box")
    closest = min(
        float(np.min(np.abs(eigenvalues(jacobian_ogda(ctx.f, p, ctx.alpha)).eigenvalues - 0.5)))
        for p in ctx.points
    )
    return _result(spec, closest > spec.tolerance, closest, len(ctx.points))


def check_eigenvalue_correspondence(ctx: PropertyContext, spec: PropertySpec) -> PropertyResult:
    if not ctx.points:
        return _vacuous(spec, "no critical points in the box")
    worst = 0.0
    for p in ctx.points:
        ogda = eigenvalues(jacobian_ogda(ctx.f, p, ctx.alpha)).eigenvalues
        predicted = ogda_spectrum_from_h(eigenvalues(h_gda(ctx.f, p)).eigenvalues, ctx.alpha)
        same_size, distance = match_multisets(ogda, predicted)
        worst = max(worst, distance if same_size else np.inf)
    return _result(spec, worst <= spec.tolerance, worst, len(ctx.points))


def check_real_spectrum_minmax(ctx: PropertyContext, spec: PropertySpec) -> PropertyResult:
    """At a local min-max point where spec(H) is real, every eigenvalue of H is <= 0."""
    relevant = [
        r for r in ctx.reports
        if r.local_minmax is MinMaxVerdict.YES
        and np.all(np.abs(r.h_spectrum.eigenvalues.imag) <= spec.tolerance)
    ]
    if not relevant:
        return _vacuous(spec, "no local min-max point with real spectrum of H")
    worst = max(float(np.max(r.h_spectrum.eigenvalues.real)) for r in relevant)
    return _result(spec, worst <= spec.tolerance, worst, len(relevant))


def check_inclusion_chain(ctx: PropertyContext, spec: PropertySpec) -> PropertyResult:
    """local min-max => GDA-stable => OGDA-stable, at points without imaginary-axis spectrum."""
    relevant = [r for r in ctx.reports if r.assumption2_holds]
    if not relevant:
        return _vacuous(spec, "no critical point satisfies assumption 2")
    broken = 0
    for r in relevant:
        if r.local_minmax is MinMaxVerdict.YES and r.gda_small_alpha is not SmallAlphaVerdict.STABLE:
            broken += 1
        if r.gda_small_alpha is SmallAlphaVerdict.STABLE and r.ogda_small_alpha is not SmallAlphaVerdict.STABLE:
            broken += 1
    return _result(spec, broken == 0, broken, len(relevant), f"{broken} broken links")


def check_eigensolver_backward_error(ctx: PropertyContext, spec: PropertySpec) -> PropertyResult:
    rng = ctx.rng(8)
    max_dim = int(spec.params.get("max_dim", 24))
    worst = 0.0
    for _ in range(spec.samples):
        dim = int(rng.integers(1, max_dim + 1))
        worst = max(worst, eigenvalues(rng.standard_normal((dim, dim))).residual)
    return _result(spec, worst <= spec.tolerance, worst, spec.samples)


CHECKS: Dict[str, Callable[[PropertyContext, PropertySpec], PropertyResult]] = {
    "char_poly_identity": check_char_poly_identity,
    "ogda_root_sweep": check_ogda_root_sweep,
    "bilinear_alpha_sweep": check_bilinear_alpha_sweep,
    "ky_fan": check_ky_fan,
    "gda_diffeomorphism": check_gda_diffeomorphism,
    "ogda_diffeomorphism": check_ogda_diffeomorphism,
    "rho_h_bounded": check_rho_h_bounded,
    "half_not_eigenvalue": check_half_not_eigenvalue,
    "eigenvalue_correspondence": check_eigenvalue_correspondence,
    "real_spectrum_minmax": check_real_spectrum_minmax,
    "inclusion_chain": check_inclusion_chain,
    "eigensolver_backward_error": check_eigensolver_backward_error,
}


def run_property_suite(
    ctx: PropertyContext,
    suite: Optional[PropertySuite] = None,
    strict: bool = False,
) -> List[PropertyResult]:
    """
    Runs every enabled property of the suite (default: the shipped YAML).

    Raises:
        MinMaxInputError: if the suite names an unknown property
        PropertyFailure: in strict mode, if any property fails
    """
    suite = suite or parse_property_suite()
    unknown = [p.name for p in suite.properties if p.name not in CHECKS]
    if unknown:
        raise MinMaxInputError(f"unknown properties in suite '{suite.name}': {', '.join(unknown)}")

    results = []
    for spec in suite.properties:
        if not spec.enabled:
            continue
        result = CHECKS[spec.name](ctx, spec)
        print_diagnostic("property_checks", f"{spec.name}: {'PASS' if result.passed else 'FAIL'} (worst {result.worst:.3e})")
        results.append(result)

    failed = [r.name for r in results if not r.passed]
    if strict and failed:
        raise PropertyFailure(f"properties failed: {', '.join(failed)}")
    return results


def results_to_text(results: List[PropertyResult]) -> str:
    lines = []
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        line = f"{status}  {r.name:<28} worst={r.worst:.3e}  tol={r.tolerance:.1e}  n={r.samples}"
        if r.detail:
            line += f"  ({r.detail})"
        lines.append(line)
    return "\n".join(lines) + "\n"
