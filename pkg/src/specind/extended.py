"""Admissibility thresholds and Fourier-cube conditions for the extended
model classes (vertex-spin interaction matrices, tensor networks, and
exponential potentials on the discrete cube), wired to the exact verifier.

The universal constant gamma = x*/2 comes from maximizing x = theta*cos(theta/2)
subject to the stationarity condition 2/theta = tan(theta/2).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ValidationError
from .exact import ZeroScanReport, zero_scan
from .models import (
    CubeFourierModel,
    ModelSpec,
    TensorNetworkModel,
    VertexSpinModel,
)
from .multiaffine import MultiAffinePolynomial
from .regions import OpenDisk
from .stability import EtaCertificate, eta_bound

C_FOURIER = 0.55
EXACT_SPIN_CAP = 8
EXACT_SITE_CAP = 20


@dataclass(frozen=True)
class ThresholdConstants:
    theta_star: float
    x_star: float
    gamma: float
    c_fourier: float


@lru_cache(maxsize=1)
def solve_threshold_constants() -> ThresholdConstants:
    """Bisection for the root of tan(theta/2) = 2/theta on (0, 2*pi/3)."""
    lo, hi = 1e-9, 2 * math.pi / 3

    def g(theta: float) -> float:
        return math.tan(theta / 2) - 2 / theta

    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g(mid) < 0:
            lo = mid
        else:
            hi = mid
    theta = 0.5 * (lo + hi)
    x_star = theta * math.cos(theta / 2)
    return ThresholdConstants(theta, x_star, x_star / 2, C_FOURIER)


def hom_threshold(max_degree: int) -> float:
    gamma = solve_threshold_constants().gamma
    return gamma / (max_degree + gamma)


def tensor_threshold(max_degree: int) -> float:
    gamma = solve_threshold_constants().gamma
    return gamma / (max_degree + 1 + gamma)


@dataclass(frozen=True)
class AdmissibilityReport:
    admissible: bool
    margin: float
    threshold: float
    max_deviation: float
    epsilon: float


def _max_entry_deviation(arrays) -> float:
    worst = 0.0
    for arr in arrays:
        flat = np.asarray(arr, dtype=complex).ravel()
        if flat.size == 0:
            raise ValidationError("empty interaction data")
        worst = max(worst, float(np.abs(flat - 1.0).max()))
    return worst


def _admissibility(arrays, threshold: float, epsilon: float) -> AdmissibilityReport:
    if not epsilon > 0:
        raise ValidationError("epsilon must be positive")
    max_dev = _max_entry_deviation(arrays)
    margin = (threshold - epsilon) - max_dev
    return AdmissibilityReport(
        admissible=max_dev <= threshold - epsilon,
        margin=margin,
        threshold=threshold,
        max_deviation=max_dev,
        epsilon=epsilon,
    )


def hom_admissible(matrices, max_degree: int, epsilon: float) -> AdmissibilityReport:
    """Every per-edge matrix entry must satisfy |A(j,k) - 1| <= thr - epsilon
    with thr = gamma/(max_degree + gamma)."""
    if max_degree < 1:
        raise ValidationError("max_degree must be at least 1")
    return _admissibility(matrices, hom_threshold(max_degree), epsilon)


def tensor_admissible(tensors, max_degree: int, epsilon: float) -> AdmissibilityReport:
    """Per-vertex tensor entries must satisfy |f_v(a) - 1| <= thr - epsilon
    with thr = gamma/(max_degree + 1 + gamma)."""
    if max_degree < 1:
        raise ValidationError("max_degree must be at least 1")
    return _admissibility(tensors, tensor_threshold(max_degree), epsilon)


def hom_polydisk_radius(max_degree: int, epsilon: float) -> float:
    """Largest c with (1 + thr - eps)*(1+c)^2 - 1 < thr, by bisection.

    Reweighting an admissible entry by two vertex factors within distance c
    of 1 then stays strictly inside the zero-free entry bound."""
    if not epsilon > 0:
        raise ValidationError("epsilon must be positive")
    if max_degree < 1:
        raise ValidationError("max_degree must be at least 1")
    thr = hom_threshold(max_degree)
    eps = min(epsilon, thr)

    def violated(c: float) -> bool:
        return (1 + thr - eps) * (1 + c) ** 2 - 1 >= thr

    lo, hi = 0.0, 1.0
    while not violated(hi):
        hi *= 2
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if violated(mid):
            hi = mid
        else:
            lo = mid
    return lo


@dataclass(frozen=True)
class FourierPotential:
    n: int
    coefficients: tuple[tuple[tuple[int, ...], float], ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError("potential needs at least one site")
        seen = set()
        for subset, value in self.coefficients:
            if tuple(sorted(subset)) != tuple(subset) or len(set(subset)) != len(subset):
                raise ValidationError(f"subset {subset} must be sorted and distinct")
            if subset in seen:
                raise ValidationError(f"duplicate subset {subset}")
            seen.add(subset)
            for i in subset:
                if not 0 <= i < self.n:
                    raise ValidationError(f"site {i} out of range for n={self.n}")
            float(value)

    @classmethod
    def from_dict(cls, n: int, coefficients: dict) -> "FourierPotential":
        items = sorted(
            (tuple(sorted(s)), float(v)) for s, v in coefficients.items()
        )
        return cls(n, tuple(items))

    @property
    def degree(self) -> int:
        sizes = [len(s) for s, v in self.coefficients if v != 0]
        return max(sizes, default=0)


@dataclass(frozen=True)
class FourierStats:
    L: float
    deg: int
    condition_value: float
    dobrushin_value: float


def fourier_stats(potential: FourierPotential) -> FourierStats:
    """L = max_i sum_{S ni i} |f_hat(S)|; condition value sqrt(deg)*L."""
    per_site = [0.0] * potential.n
    for subset, value in potential.coefficients:
        if value == 0:
            continue
        for i in subset:
            per_site[i] += abs(value)
    L = max(per_site, default=0.0)
    deg = potential.degree
    return FourierStats(
        L=L,
        deg=deg,
        condition_value=math.sqrt(deg) * L,
        dobrushin_value=(deg - 1) * L,
    )


def fourier_eta(potential: FourierPotential, b: float) -> EtaCertificate:
    """Certificate via the slack xi = 2C/sqrt(deg) - 2L: the field polydisk of
    radius c = 1 - exp(-xi) about 1 is zero-free, so delta = c and
    eta = 2/(b*delta^2)."""
    if not 0 < b <= 1:
        raise ValidationError("b must lie in (0, 1]")
    stats = fourier_stats(potential)
    if stats.condition_value >= C_FOURIER:
        raise ValidationError(
            f"fourier condition violated: sqrt(deg)*L = {stats.condition_value} "
            f"is not below C = {C_FOURIER}"
        )
    if stats.deg == 0:
        xi = math.inf
        c = 1.0
    else:
        xi = 2 * C_FOURIER / math.sqrt(stats.deg) - 2 * stats.L
        c = 1 - math.exp(-xi)
    cert = eta_bound(
        "arb",
        delta_value=c,
        b=b,
        region_description=f"field polydisk |z - 1| <= {c:.12g}",
    )
    inputs = dict(cert.inputs)
    inputs.update({"xi": xi, "L": stats.L, "deg": stats.deg})
    return EtaCertificate(
        variant=cert.variant,
        delta=cert.delta,
        b=cert.b,
        lam=cert.lam,
        lam_star=cert.lam_star,
        eta=cert.eta,
        region_description=cert.region_description,
        formula_tag=cert.formula_tag,
        inputs=inputs,
        caveats=cert.caveats
        + ("constant chosen through the general eigenvalue route; valid but possibly not tight",),
    )


def polydisk_eta(radius: float, b: float) -> EtaCertificate:
    """Eta certificate when the per-variable zero-free region is the disk of
    the given radius about 1 and the evaluation point is 1 itself."""
    if not 0 < b <= 1:
        raise ValidationError("b must lie in (0, 1]")
    if not radius > 0:
        raise ValidationError("radius must be positive")
    return eta_bound(
        "arb",
        delta_value=radius,
        b=b,
        region_description=f"field polydisk of radius {radius:.12g} about 1",
    )


def polydisk_zero_scan(
    poly: MultiAffinePolynomial,
    radius: float,
    *,
    n_samples: int,
    seed: int,
    center: complex = 1.0,
) -> ZeroScanReport:
    """Zero scan with every variable ranging over the disk of the given
    radius about ``center`` (default 1, the unreweighted evaluation point)."""
    if not radius > 0:
        raise ValidationError("radius must be positive")
    return zero_scan(
        poly, OpenDisk(complex(center), float(radius)), n_samples=n_samples, seed=seed
    )


def build_gibbs_from_extended(kind: str, data: dict) -> ModelSpec:
    """Construct a sampler-ready model from extended-class data.

    kinds: "hom" (graph, matrices), "tensor" (graph, spin_count, tensors,
    optional edge_fields), "cube" (potential).
    """
    if kind == "hom":
        graph = data["graph"]
        matrices = data["matrices"]
        q = len(matrices[0]) if matrices else 0
        if q < 1 or q > EXACT_SPIN_CAP:
            raise ValidationError(f"spin count must lie in 1..{EXACT_SPIN_CAP}")
        checked = []
        for mat in matrices:
            arr = np.asarray(mat, dtype=complex)
            if arr.shape != (q, q):
                raise ValidationError("each edge needs a q x q matrix")
            if np.abs(arr.imag).max() > 0 or arr.real.min() < 0:
                raise ValidationError(
                    "sampling requires real nonnegative matrix entries"
                )
            checked.append(tuple(tuple(float(x) for x in row) for row in arr.real))
        fields = tuple((1.0,) * q for _ in range(graph.vertex_count))
        return VertexSpinModel(graph, q, tuple(checked), fields)
    if kind == "tensor":
        graph = data["graph"]
        q = int(data["spin_count"])
        tensors = tuple(tuple(float(x) for x in t) for t in data["tensors"])
        edge_fields = data.get("edge_fields")
        if edge_fields is None:
            edge_fields = tuple((1.0,) * q for _ in range(graph.edge_count))
        return TensorNetworkModel(graph, q, tensors, tuple(edge_fields))
    if kind == "cube":
        potential = data["potential"]
        if not isinstance(potential, FourierPotential):
            raise ValidationError("cube data needs a FourierPotential")
        if potential.n > EXACT_SITE_CAP:
            raise ValidationError(
                f"{potential.n} sites exceed the exact cap of {EXACT_SITE_CAP}"
            )
        return CubeFourierModel(potential.n, potential.coefficients)
    raise ValidationError(f"unknown extended model kind {kind!r}")


def log_disk_containment_gap(xi: float, n_probes: int = 10**4) -> float:
    """max over boundary probes of |log z| - xi for |z - 1| = 1 - exp(-xi);
    nonpositive (to rounding) by the containment inequality."""
    c = 1 - math.exp(-xi)
    worst = -math.inf
    for t in range(n_probes):
        z = 1 + c * cmath.exp(2j * math.pi * t / n_probes)
        worst = max(worst, abs(cmath.log(z)) - xi)
    return worst
