"""Local polynomials, root analysis, per-family stability regions, and the
eta / mixing-time bound formulas, plus the end-to-end certifier that checks
the spectral bound against brute force on desk-scale instances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import CapExceededError, NonConvergenceError, ValidationError
from .exact import influence_matrix, eigmax
from .models import BinarySymmetricHolant, ModelSpec, enumerate_pinnings
from .regions import (
    ClosedDisk,
    Region,
    cardioid_complement,
    describe,
    distance_report,
    halfplane_square_complement,
)

MAX_POLY_DEGREE = 64

_ROOT_RESIDUAL_REL = 1e-8
_NEG_REAL_IMAG_TOL = 1e-8
_NEG_REAL_PART_TOL = -1e-12
_RATIO_TOL = 1e-10


@dataclass(frozen=True)
class RealPolynomial:
    """Real coefficients, ascending degree, trailing zeros trimmed."""

    coefficients: tuple

    def __post_init__(self):
        coeffs = list(self.coefficients)
        if not coeffs:
            raise ValidationError("polynomial needs at least one coefficient")
        for c in coeffs:
            if isinstance(c, complex):
                raise ValidationError("coefficients must be real")
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        if len(coeffs) - 1 > MAX_POLY_DEGREE:
            raise ValidationError(f"degree {len(coeffs) - 1} exceeds the cap of {MAX_POLY_DEGREE}")
        object.__setattr__(self, "coefficients", tuple(coeffs))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, z):
        acc = 0
        for c in reversed(self.coefficients):
            acc = acc * z + c
        return acc

    def derivative(self) -> "RealPolynomial":
        if self.degree == 0:
            return RealPolynomial((0,))
        return RealPolynomial(tuple(k * c for k, c in enumerate(self.coefficients) if k > 0))


def local_polynomial(f: Callable[[int], object] | Sequence, d: int) -> RealPolynomial:
    """P(z) = sum_k C(d,k) f(k) z^k for a local count-weight function f."""
    if d < 1 or d > MAX_POLY_DEGREE:
        raise ValidationError(f"degree must be in 1..{MAX_POLY_DEGREE}")
    get = f.__getitem__ if not callable(f) else f
    return RealPolynomial(tuple(math.comb(d, k) * get(k) for k in range(d + 1)))


def _aberth(coeffs: np.ndarray, max_iter: int = 400) -> np.ndarray | None:
    d = len(coeffs) - 1
    dcoeffs = coeffs[1:] * np.arange(1, d + 1)
    lead = coeffs[-1]
    radius = 1.0 + float(np.max(np.abs(coeffs[:-1] / lead)))
    # Deterministic start: evenly spaced on a scaled circle, rotated off the
    # axes so real-rooted polynomials do not stall on symmetry.
    angles = 2 * np.pi * (np.arange(d) + 0.25) / d + 0.3
    z = radius * np.exp(1j * angles)
    rev = coeffs[::-1]
    drev = dcoeffs[::-1]
    with np.errstate(all="ignore"):
        for _ in range(max_iter):
            pv = np.polyval(rev, z)
            dv = np.polyval(drev, z)
            if not (np.isfinite(pv).all() and np.isfinite(dv).all()):
                return None
            bad = np.abs(dv) < 1e-300
            if bad.any():
                z = z + 1e-8 * (1 + np.abs(z)) * bad
                continue
            w = pv / dv
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, np.inf)
            S = (1.0 / diff).sum(axis=1)
            corr = w / (1 - w * S)
            z = z - corr
            if not np.isfinite(z).all():
                return None
            if np.max(np.abs(corr)) <= 1e-14 * (1 + np.max(np.abs(z))):
                return z
    return None


def _polished(coeffs: np.ndarray, roots: np.ndarray) -> np.ndarray:
    rev = coeffs[::-1]
    drev = (coeffs[1:] * np.arange(1, len(coeffs)))[::-1]
    z = roots.astype(np.complex128)
    with np.errstate(all="ignore"):
        for _ in range(8):
            dv = np.polyval(drev, z)
            dv = np.where(np.abs(dv) < 1e-300, 1e-300, dv)
            step = np.polyval(rev, z) / dv
            z = z - np.where(np.isfinite(step), step, 0)
    return z


def _backward_error(p: RealPolynomial, found: np.ndarray) -> np.ndarray:
    """|p(r)| relative to sum_k |c_k| |r|^k: the relative coefficient
    perturbation under which r is an exact root."""
    full = np.asarray([float(c) for c in p.coefficients], dtype=np.complex128)
    with np.errstate(all="ignore"):
        residuals = np.abs(np.polyval(full[::-1], found))
        local = np.polyval(np.abs(full)[::-1], np.abs(found)).real
        ratio = residuals / np.maximum(local, 1e-300)
    # a non-finite iterate must fail the contract, never slip through as NaN
    return np.where(np.isnan(ratio), np.inf, ratio)


def poly_roots(p: RealPolynomial) -> list[complex]:
    """All roots with multiplicity, ordered by (real part, imaginary part).

    Simultaneous (Aberth-Ehrlich) iteration with a companion-matrix fallback;
    every returned root r is an exact root of a polynomial whose coefficients
    differ relatively by at most 1e-8 (backward error |p(r)| relative to
    sum_k |c_k| |r|^k).
    """
    if p.degree < 1:
        raise ValidationError("root finding needs degree >= 1")
    coeffs = np.asarray([float(c) for c in p.coefficients], dtype=np.complex128)
    # Deflate roots at the origin exactly.
    zeros_at_origin = 0
    while abs(coeffs[0]) == 0 and len(coeffs) > 1:
        coeffs = coeffs[1:]
        zeros_at_origin += 1
    roots = np.zeros(zeros_at_origin, dtype=np.complex128)
    if len(coeffs) > 1:
        found = _aberth(coeffs)
        if found is None:
            found = _polished(coeffs, np.roots(coeffs[::-1]))
        if np.max(_backward_error(p, found)) > _ROOT_RESIDUAL_REL:
            found = _polished(coeffs, np.roots(coeffs[::-1]))
            worst = float(np.max(_backward_error(p, found)))
            if worst > _ROOT_RESIDUAL_REL:
                raise NonConvergenceError("root refinement stalled", residual=worst)
        roots = np.concatenate([roots, found])
    ordered = sorted((complex(r) for r in roots), key=lambda r: (r.real, r.imag))
    return ordered


def two_spin_polynomial(beta, gamma, d: int) -> RealPolynomial:
    """P_d(z) = sum_k C(d,k) beta^C(k,2) gamma^C(d-k,2) z^k."""
    if d < 1:
        raise ValidationError("degree must be at least 1")
    if beta < 0 or gamma <= 0:
        raise ValidationError("need beta >= 0 and gamma > 0")
    return RealPolynomial(
        tuple(
            math.comb(d, k) * beta ** math.comb(k, 2) * gamma ** math.comb(d - k, 2)
            for k in range(d + 1)
        )
    )


@dataclass(frozen=True)
class TwoSpinRootsReport:
    beta: float
    gamma: float
    d: int
    roots: tuple[complex, ...]  # sorted descending by real part
    all_negative_real: bool
    ratios_ok: bool
    ratios: tuple[float, ...]


def check_two_spin_roots(beta, gamma, d: int) -> TwoSpinRootsReport:
    """Roots of the two-spin local polynomial: all strictly negative real, and
    consecutive root ratios below beta*gamma."""
    if beta * gamma >= 1:
        raise ValidationError("requires beta * gamma < 1")
    roots = poly_roots(two_spin_polynomial(beta, gamma, d))
    roots = sorted(roots, key=lambda r: r.real, reverse=True)
    all_neg = all(
        abs(r.imag) <= _NEG_REAL_IMAG_TOL * (1 + abs(r.real)) and r.real <= _NEG_REAL_PART_TOL
        for r in roots
    )
    ratios = tuple(
        roots[i].real / roots[i + 1].real for i in range(len(roots) - 1)
    )
    ratios_ok = all(r < beta * gamma + _RATIO_TOL for r in ratios)
    return TwoSpinRootsReport(
        beta=float(beta), gamma=float(gamma), d=d,
        roots=tuple(roots), all_negative_real=all_neg, ratios_ok=ratios_ok, ratios=ratios,
    )


def two_spin_recursion_residual(beta, gamma, d: int, z) -> complex:
    """P_{d+1}(z) - gamma^d P_d(z/gamma) - z P_d(beta z); identically zero."""
    if d < 1:
        raise ValidationError("degree must be at least 1")
    p_d = two_spin_polynomial(beta, gamma, d)
    p_d1 = two_spin_polynomial(beta, gamma, d + 1)
    return p_d1(z) - gamma**d * p_d(z / gamma) - z * p_d(beta * z)


def two_spin_recursion_coefficient_deltas(beta, gamma, d: int) -> list:
    """Coefficient-level version of the degree recursion; exact zeros when the
    parameters are exact."""
    if d < 1:
        raise ValidationError("degree must be at least 1")
    lhs = two_spin_polynomial(beta, gamma, d + 1).coefficients
    c = two_spin_polynomial(beta, gamma, d).coefficients

    def coeff(seq, k):
        # stored coefficients trim trailing zeros (beta = 0 drops the degree)
        return seq[k] if 0 <= k < len(seq) else 0

    deltas = []
    for k in range(d + 2):
        first = gamma**d * coeff(c, k) / gamma**k if k <= d else 0
        second = coeff(c, k - 1) * beta ** (k - 1) if 1 <= k <= d + 1 else 0
        deltas.append(coeff(lhs, k) - first - second)
    return deltas


def even_subgraph_t(rho, d: int):
    """t = ((1+rho)/(1-rho))^(1/d); rho in (0,1)."""
    if not (0 < rho < 1):
        raise ValidationError("requires rho in (0, 1)")
    if d < 1:
        raise ValidationError("degree must be at least 1")
    return ((1 + rho) / (1 - rho)) ** (1 / d)


def even_subgraph_local_polynomial(rho, d: int) -> RealPolynomial:
    return local_polynomial(lambda k: 1 if k % 2 == 0 else rho, d)


def even_subgraph_root_disk(rho, d: int) -> ClosedDisk:
    """The closed disk holding all roots of the parity local polynomial:
    the Moebius image (w - t)/(w + t) of the unit circle."""
    t = even_subgraph_t(rho, d)
    denom = t * t - 1
    return ClosedDisk(-(t * t + 1) / denom, 2 * t / denom)


@dataclass(frozen=True)
class FamilyRegion:
    family: str
    max_degree: int
    region: Region
    epsilon: float | None
    params: tuple[tuple[str, object], ...]
    notes: tuple[str, ...]
    formula_tag: str

    @property
    def region_description(self) -> str:
        return describe(self.region)


def stability_region_for_family(
    family: str, max_degree: int, params: Mapping[str, object] | None = None
) -> FamilyRegion:
    """The zero-free edge-activity region guaranteed for a named family on
    graphs of maximum degree ``max_degree``."""
    params = dict(params or {})
    if max_degree < 1:
        raise ValidationError("max_degree must be at least 1")
    notes: list[str] = []
    if family == "edge_cover":
        rho = params.get("rho")
        if rho is not None and not (0 <= rho <= 1):
            raise ValidationError("edge_cover requires rho in [0, 1]")
        notes.append("region is parameter-free for edge covers")
        return FamilyRegion(
            family, max_degree, cardioid_complement(), None,
            tuple(sorted(params.items())), tuple(notes),
            "stability.edge_cover.cardioid",
        )
    if family == "even_subgraph":
        if "rho" not in params:
            raise ValidationError("even_subgraph requires parameter rho")
        rho = params["rho"]
        if rho == 0:
            raise ValidationError(
                "even_subgraph with rho = 0 is outside the certified range (rho in (0, 1])"
            )
        if not (0 < rho <= 1):
            raise ValidationError("even_subgraph requires rho in (0, 1]")
        if rho == 1:
            eps = 1.0
            notes.append("rho = 1 is the product-measure special case (epsilon = 1)")
        else:
            t = even_subgraph_t(rho, max_degree)
            eps = (t - 1) / (t + 1)
            notes.append(f"t = ((1+rho)/(1-rho))^(1/max_degree) = {t:.12g}")
        notes.append("certified mixing constant grows exponentially in 1/rho")
        return FamilyRegion(
            family, max_degree, halfplane_square_complement(eps), float(eps),
            tuple(sorted(params.items())), tuple(notes),
            "stability.even_subgraph.halfplane_square",
        )
    if family in ("two_spin_edge", "ising_line"):
        if family == "ising_line":
            if "beta" not in params:
                raise ValidationError("ising_line requires parameter beta")
            beta = params["beta"]
            gamma = beta
            if not (0 < beta < 1):
                raise ValidationError("ising_line requires beta in (0, 1) so that beta^2 < 1")
            notes.append("line-graph Ising is the two-spin family with gamma = beta")
        else:
            missing = [k for k in ("beta", "gamma") if k not in params]
            if missing:
                raise ValidationError(f"two_spin_edge requires parameter(s) {missing}")
            beta, gamma = params["beta"], params["gamma"]
            if beta < 0 or gamma <= 0:
                raise ValidationError("two_spin_edge requires beta >= 0 and gamma > 0")
            if beta * gamma >= 1:
                raise ValidationError("two_spin_edge requires beta * gamma < 1")
        eps_by_degree = []
        for d in range(1, max_degree + 1):
            roots = poly_roots(two_spin_polynomial(beta, gamma, d))
            eps_by_degree.append(-max(r.real for r in roots))
        eps = min(eps_by_degree)
        if not (eps > 0):
            raise ValidationError("local polynomial roots are not negative; no region")
        notes.append(
            "epsilon_d = -(largest root) per degree: "
            + ", ".join(f"d={d}: {e:.12g}" for d, e in enumerate(eps_by_degree, start=1))
        )
        return FamilyRegion(
            family, max_degree, halfplane_square_complement(eps), float(eps),
            tuple(sorted(params.items())), tuple(notes),
            "stability.two_spin_edge.halfplane_square",
        )
    if family == "matchings":
        eps = 1.0 / max_degree
        notes.append("at-most-one local polynomial has its root at -1/degree")
        return FamilyRegion(
            family, max_degree, halfplane_square_complement(eps), float(eps),
            tuple(sorted(params.items())), tuple(notes),
            "stability.matchings.halfplane_square",
        )
    raise ValidationError(f"unsupported family {family!r} for stability regions")


ETA_VARIANTS = ("R+", "lambda_c_below", "lambda_c_above", "arb")

NOT_NEEDED = "not needed"


@dataclass(frozen=True)
class EtaCertificate:
    variant: str
    delta: float
    b: object  # float or "not needed"
    lam: float | None
    lam_star: float | None
    eta: float
    region_description: str | None
    formula_tag: str
    inputs: tuple[tuple[str, object], ...]
    caveats: tuple[str, ...] = ()


def eta_bound(
    variant: str,
    delta_value: float,
    b: float | None = None,
    lam: float | None = None,
    lam_star: float | None = None,
    lam_extremes: tuple[float, float] | None = None,
    region_description: str | None = None,
) -> EtaCertificate:
    """The spectral-independence bound eta for a given normalized boundary
    distance; four variants matching the positive-axis, below/above-threshold
    and arbitrary-region regimes."""
    if variant not in ETA_VARIANTS:
        raise ValidationError(f"unknown eta variant {variant!r}; expected one of {ETA_VARIANTS}")
    if not (delta_value > 0):
        raise ValidationError("delta must be positive")
    inputs = [("variant", variant), ("delta", delta_value)]
    if lam_extremes is not None:
        lo, hi = lam_extremes
        if not (0 < lo <= hi):
            raise ValidationError("lam_extremes must satisfy 0 < min <= max")
        inputs.append(("lam_extremes", (float(lo), float(hi))))

    def need_b():
        if b is None or not (0 < b <= 1):
            raise ValidationError(f"variant {variant} needs marginal bound b in (0, 1]")
        inputs.append(("b", b))
        return b

    if variant == "R+":
        eta = 8.0 / delta_value
        return EtaCertificate(variant, float(delta_value), NOT_NEEDED, lam, None, float(eta),
                              region_description, "eta.positive_axis", tuple(inputs))
    if variant == "arb":
        bb = need_b()
        eta = 2.0 / (bb * delta_value**2)
        return EtaCertificate(variant, float(delta_value), float(bb), lam, None, float(eta),
                              region_description, "eta.generic_region", tuple(inputs))
    bb = need_b()
    if lam is None or lam_star is None:
        raise ValidationError(f"variant {variant} needs lam and lam_star")
    inputs += [("lam", lam), ("lam_star", lam_star)]
    if variant == "lambda_c_below":
        lam_eff = lam if lam_extremes is None else lam_extremes[1]
        if not (0 < lam_eff < lam_star):
            raise ValidationError("lambda_c_below needs 0 < lambda (or lambda_max) < lambda_star")
        eta = (8.0 / delta_value) * min((1 - bb) / bb, lam_eff / (bb * (lam_star - lam_eff)) + 1)
        tag = "eta.below_threshold"
    else:
        lam_eff = lam if lam_extremes is None else lam_extremes[0]
        if not (lam_eff > lam_star > 0):
            raise ValidationError("lambda_c_above needs lambda (or lambda_min) > lambda_star > 0")
        eta = (8.0 / delta_value) * min((1 - bb) / bb, lam_star / (bb * (lam_eff - lam_star)) + 1)
        tag = "eta.above_threshold"
    if not (eta > 0):
        raise ValidationError("eta must be positive; inputs degenerate")
    return EtaCertificate(variant, float(delta_value), float(bb), float(lam), float(lam_star),
                          float(eta), region_description, tag, tuple(inputs))


def cset_distance_bound(
    kind: str,
    p: float,
    alpha: float,
    beta_sup: float,
    region_unbounded_or_zero_closure: bool = False,
) -> float:
    """Upper bound on the distance from 1 to the conditioned-ratio set of a
    (site, spin) pair; ``beta_sup`` may be math.inf with 1/inf = 0."""
    if kind not in ("nonzero-spin", "zero-spin"):
        raise ValidationError("kind must be 'nonzero-spin' or 'zero-spin'")
    if region_unbounded_or_zero_closure:
        return 1.0
    if not (0 < p <= 1):
        raise ValidationError("p must be in (0, 1]")
    if not (alpha < 1 < beta_sup):
        raise ValidationError("requires alpha < 1 < beta_sup")
    first = alpha / (p * (1 - alpha))
    second = 0.0 if math.isinf(beta_sup) else 1 / (p * (beta_sup - 1))
    if kind == "nonzero-spin":
        return min(first + (1 - p) / p, second + 1)
    return min(first + 1, second + (1 - p) / p)


@dataclass(frozen=True)
class MixingTimeEstimate:
    kind: str
    value: float
    caveat: str


def mixing_time_formula(
    kind: str, n: int, eta: float | None = None, mu_min: float | None = None
) -> MixingTimeEstimate:
    """Mixing-time shape implied by an eta bound; values are up to an
    unspecified universal constant."""
    if n < 1:
        raise ValidationError("n must be positive")
    if kind == "generic":
        if eta is None or mu_min is None:
            raise ValidationError("generic kind needs eta and mu_min")
        if not (eta > 0) or not (0 < mu_min <= 1):
            raise ValidationError("need eta > 0 and mu_min in (0, 1]")
        value = n ** (eta + 1) * math.log(1 / mu_min)
        return MixingTimeEstimate(kind, float(value),
                                  "up to an unspecified universal constant")
    if kind == "bounded-degree":
        return MixingTimeEstimate(
            kind, float(n * math.log(n)),
            "up to a constant depending on max degree, eta, and the marginal "
            "bound that is not explicit",
        )
    raise ValidationError("kind must be 'generic' or 'bounded-degree'")


@dataclass(frozen=True)
class CertificationResult:
    family: str
    lam: float
    max_degree: int
    region_description: str
    delta: float
    certificate: EtaCertificate
    comparison: float | None  # max over pinnings of the influence eigmax; None if skipped
    comparison_status: str  # "checked" | "skipped"
    pinnings_checked: int
    passes: bool | None
    formula_tags: tuple[str, ...]
    caveats: tuple[str, ...]


def certify_model(model: ModelSpec, lam: float, *, slack: float = 1e-8) -> CertificationResult:
    """Certify the positive-axis spectral bound for a named-family model and
    compare it against brute force over every feasible pinning."""
    if not isinstance(model, BinarySymmetricHolant) or model.family is None:
        raise ValidationError("certification needs a model built from a named family")
    lam = float(lam)
    if any(float(x) != lam for x in model.edge_fields):
        raise ValidationError("certification requires a uniform edge field equal to lambda")
    family_params = {k: v for k, v in model.params if k != "lambda"}
    fam = stability_region_for_family(model.family, model.graph.max_degree, family_params)
    dist = distance_report(fam.region, lam)
    delta_value = dist.value / lam
    cert = eta_bound("R+", delta_value, lam=lam,
                     region_description=fam.region_description)
    caveats = list(fam.notes)
    caveats.append("mixing-time consequence has the n log n shape with a non-explicit constant")
    comparison = None
    status = "skipped"
    count = 0
    passes: bool | None = None
    try:
        worst = 0.0
        for pin in enumerate_pinnings(model):
            count += 1
            psi = influence_matrix(model, pin, exact=False)
            worst = max(worst, eigmax(psi.array).value)
        comparison = worst
        status = "checked"
        passes = comparison <= cert.eta + slack
    except CapExceededError as exc:
        caveats.append(f"brute-force comparison skipped: {exc}")
    return CertificationResult(
        family=model.family,
        lam=lam,
        max_degree=model.graph.max_degree,
        region_description=fam.region_description,
        delta=float(delta_value),
        certificate=cert,
        comparison=comparison,
        comparison_status=status,
        pinnings_checked=count,
        passes=passes,
        formula_tags=(fam.formula_tag, dist.method, cert.formula_tag),
        caveats=tuple(caveats),
    )
