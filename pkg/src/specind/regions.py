"""Complex-plane regions: membership, boundary distance, sampling, and the
negated-Minkowski-product combinator that turns per-vertex root exclusion
regions into an edge-activity region.

All region constructors describe open sets.  Closed disks and closed
half-planes appear only as the *bases* of product regions.  Distances use
closed forms where one exists and a boundary-pair grid/Newton minimizer
otherwise; the minimizer is exact for product regions because the nearest
point of the product set to an outside point lies on a product of boundary
points.
"""

from __future__ import annotations

import cmath
import math
import re as _re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import NonConvergenceError, ParseError, ValidationError

_MEMBERSHIP_MARGIN = 1e-12
DEFAULT_TRUNCATION_RADIUS = 1e6


# ---------------------------------------------------------------------------
# Base atoms (closed sets; not regions themselves)


@dataclass(frozen=True)
class ClosedDisk:
    center: complex
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if not (self.radius > 0):
            raise ValidationError("disk radius must be positive")
        if abs(self.center) < self.radius * (1 - 1e-12):
            raise ValidationError(
                "products of disks with 0 in the interior are not supported"
            )

    @property
    def touches_zero(self) -> bool:
        return abs(abs(self.center) - self.radius) <= 1e-12 * self.radius

    def boundary_point(self, theta):
        return self.center + self.radius * np.exp(1j * np.asarray(theta))

    def boundary_tangent(self, theta):
        return 1j * self.radius * np.exp(1j * np.asarray(theta))


@dataclass(frozen=True)
class ClosedHalfPlane:
    """The half-plane {x + iy : x <= -eps}, eps > 0."""

    eps: float

    def __post_init__(self):
        object.__setattr__(self, "eps", float(self.eps))
        if not (self.eps > 0):
            raise ValidationError("half-plane offset eps must be positive")

    def boundary_point(self, u):
        # Boundary line Re z = -eps, parameterized by u in (-pi/2, pi/2).
        return -self.eps + 1j * self.eps * np.tan(np.asarray(u))

    def boundary_tangent(self, u):
        return 1j * self.eps / np.cos(np.asarray(u)) ** 2


# ---------------------------------------------------------------------------
# Regions


class Region:
    """Open subset of the complex plane."""

    def contains(self, z: complex) -> bool:
        raise NotImplementedError

    def contains_many(self, zs: np.ndarray) -> np.ndarray:
        return np.array([self.contains(complex(z)) for z in np.asarray(zs).ravel()])

    def sample_box(self, truncation_radius: float) -> tuple[float, float, float, float]:
        R = float(truncation_radius)
        return (-R, R, -R, R)

    def distance_methods(self) -> tuple[str, ...]:
        return ("probe",)


@dataclass(frozen=True)
class OpenDisk(Region):
    center: complex
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if not (self.radius > 0):
            raise ValidationError("disk radius must be positive")

    def contains(self, z: complex) -> bool:
        return abs(z - self.center) < self.radius

    def contains_many(self, zs):
        return np.abs(np.asarray(zs) - self.center) < self.radius

    def sample_box(self, truncation_radius):
        c, r = self.center, self.radius
        return (c.real - r, c.real + r, c.imag - r, c.imag + r)

    def distance_methods(self):
        return ("closed_form",)


@dataclass(frozen=True)
class ClosedDiskComplement(Region):
    center: complex
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if not (self.radius > 0):
            raise ValidationError("disk radius must be positive")

    def contains(self, z: complex) -> bool:
        return abs(z - self.center) > self.radius

    def contains_many(self, zs):
        return np.abs(np.asarray(zs) - self.center) > self.radius

    def distance_methods(self):
        return ("closed_form",)


@dataclass(frozen=True)
class OpenHalfPlane(Region):
    """{z : Re(z * conj(normal)) > offset}; normal is normalized at build.

    The named special case H_eps = {x + iy : x < -eps} is
    ``OpenHalfPlane.h_epsilon(eps)`` (normal -1, offset eps).
    """

    normal: complex
    offset: float

    def __post_init__(self):
        n = complex(self.normal)
        if n == 0:
            raise ValidationError("half-plane normal must be nonzero")
        scale = abs(n)
        object.__setattr__(self, "normal", n / scale)
        object.__setattr__(self, "offset", float(self.offset) / scale)

    @classmethod
    def h_epsilon(cls, eps: float) -> "OpenHalfPlane":
        return cls(normal=-1, offset=float(eps))

    def contains(self, z: complex) -> bool:
        return (z * self.normal.conjugate()).real > self.offset

    def contains_many(self, zs):
        return (np.asarray(zs) * np.conj(self.normal)).real > self.offset

    def sample_box(self, truncation_radius):
        R = float(truncation_radius)
        # Clip along an axis when the normal allows it.
        if self.normal == 1:
            return (max(self.offset, -R), R, -R, R)
        if self.normal == -1:
            return (-R, min(-self.offset, R), -R, R)
        return (-R, R, -R, R)

    def distance_methods(self):
        return ("closed_form",)


def _product_membership_disks(d1: ClosedDisk, d2: ClosedDisk, zs) -> np.ndarray:
    """Vectorized test: does -z lie in the Minkowski product of two closed disks?"""
    zs = np.asarray(zs, dtype=np.complex128)
    if d1.touches_zero and d2.touches_zero:
        # Polar form: the product of two zero-touching disks is the cardioid-type
        # set {m e^{i psi} : m <= 2 r1 r2 (1 + cos(psi - phi1 - phi2))}.
        phi = cmath.phase(d1.center) + cmath.phase(d2.center)
        w = -zs
        m = np.abs(w)
        psi = np.angle(w) - phi
        bound = 2 * d1.radius * d2.radius * (1 + np.cos(psi))
        return m <= bound + _MEMBERSHIP_MARGIN * (1 + bound)
    # Invert whichever disk keeps 0 strictly outside.
    inv, other = (d1, d2) if not d1.touches_zero else (d2, d1)
    denom = abs(inv.center) ** 2 - inv.radius**2
    c_star = inv.center.conjugate() / denom
    r_star = inv.radius / denom
    lhs = np.abs(-zs * c_star - other.center)
    rhs = np.abs(zs) * r_star + other.radius
    return lhs <= rhs + _MEMBERSHIP_MARGIN * (1 + rhs)


def _parabola_contains(eps2: float, zs) -> np.ndarray:
    """Membership in (-H_a * H_b)^c with ab = eps2: {y^2 < 4 eps2 (x + eps2)}."""
    zs = np.asarray(zs, dtype=np.complex128)
    lhs = zs.imag**2
    rhs = 4 * eps2 * (zs.real + eps2)
    return lhs < rhs - _MEMBERSHIP_MARGIN * (1 + np.abs(rhs))


@dataclass(frozen=True)
class NegMinkowskiSquareComplement(Region):
    """(-S^2)^c where S is a closed disk or closed half-plane base."""

    base: ClosedDisk | ClosedHalfPlane

    def __post_init__(self):
        if not isinstance(self.base, (ClosedDisk, ClosedHalfPlane)):
            raise ValidationError("square-complement base must be a closed disk or half-plane")

    def contains(self, z: complex) -> bool:
        return bool(self.contains_many(np.array([z]))[0])

    def contains_many(self, zs):
        if isinstance(self.base, ClosedHalfPlane):
            return _parabola_contains(self.base.eps**2, zs)
        return ~_product_membership_disks(self.base, self.base, zs)

    def sample_box(self, truncation_radius):
        R = float(truncation_radius)
        if isinstance(self.base, ClosedHalfPlane):
            e2 = self.base.eps**2
            half_height = 2 * self.base.eps * math.sqrt(R + e2)
            return (-e2, R, -half_height, half_height)
        return (-R, R, -R, R)

    def distance_methods(self):
        if isinstance(self.base, ClosedHalfPlane):
            return ("closed_form", "numeric")
        if self.base == ClosedDisk(-1, 1):
            return ("closed_form", "numeric")
        return ("numeric",)


@dataclass(frozen=True)
class NegMinkowskiProductComplement(Region):
    """(-S1*S2)^c for two closed bases of the same kind."""

    base1: ClosedDisk | ClosedHalfPlane
    base2: ClosedDisk | ClosedHalfPlane

    def __post_init__(self):
        kinds = {type(self.base1), type(self.base2)}
        if not kinds <= {ClosedDisk, ClosedHalfPlane}:
            raise ValidationError("product bases must be closed disks or half-planes")
        if len(kinds) == 2:
            raise ValidationError("mixed disk/half-plane products are not supported")

    def contains(self, z: complex) -> bool:
        return bool(self.contains_many(np.array([z]))[0])

    def contains_many(self, zs):
        if isinstance(self.base1, ClosedHalfPlane):
            return _parabola_contains(self.base1.eps * self.base2.eps, zs)
        return ~_product_membership_disks(self.base1, self.base2, zs)

    def sample_box(self, truncation_radius):
        R = float(truncation_radius)
        if isinstance(self.base1, ClosedHalfPlane):
            ab = self.base1.eps * self.base2.eps
            half_height = 2 * math.sqrt(ab) * math.sqrt(R + ab)
            return (-ab, R, -half_height, half_height)
        return (-R, R, -R, R)

    def distance_methods(self):
        if isinstance(self.base1, ClosedHalfPlane):
            return ("closed_form", "numeric")
        return ("numeric",)


@dataclass(frozen=True)
class Scaled(Region):
    """(1/factor) * inner = {z : factor * z in inner}."""

    inner: Region
    factor: float

    def __post_init__(self):
        object.__setattr__(self, "factor", float(self.factor))
        if not (self.factor > 0):
            raise ValidationError("scale factor must be positive")

    def contains(self, z: complex) -> bool:
        return self.inner.contains(self.factor * z)

    def contains_many(self, zs):
        return self.inner.contains_many(np.asarray(zs) * self.factor)

    def sample_box(self, truncation_radius):
        x0, x1, y0, y1 = self.inner.sample_box(truncation_radius * self.factor)
        f = self.factor
        return (x0 / f, x1 / f, y0 / f, y1 / f)

    def distance_methods(self):
        return self.inner.distance_methods()


@dataclass(frozen=True)
class Intersection(Region):
    members: tuple[Region, ...]

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise ValidationError("intersection needs at least one member")
        object.__setattr__(self, "members", members)

    def contains(self, z: complex) -> bool:
        return all(m.contains(z) for m in self.members)

    def contains_many(self, zs):
        out = np.ones(len(np.asarray(zs)), dtype=bool)
        for m in self.members:
            out &= m.contains_many(zs)
        return out

    def sample_box(self, truncation_radius):
        boxes = [m.sample_box(truncation_radius) for m in self.members]
        x0 = max(b[0] for b in boxes)
        x1 = min(b[1] for b in boxes)
        y0 = max(b[2] for b in boxes)
        y1 = min(b[3] for b in boxes)
        if x0 >= x1 or y0 >= y1:
            raise ValidationError("intersection bounding boxes do not overlap")
        return (x0, x1, y0, y1)

    def distance_methods(self):
        return ("min_of_members",)


@dataclass(frozen=True)
class Inverted(Region):
    """{1/w : w in inner, w != 0}."""

    inner: Region

    def contains(self, z: complex) -> bool:
        if z == 0:
            return False
        return self.inner.contains(1 / z)

    def contains_many(self, zs):
        zs = np.asarray(zs, dtype=np.complex128)
        nonzero = zs != 0
        out = np.zeros(zs.shape, dtype=bool)
        if nonzero.any():
            out[nonzero] = self.inner.contains_many(1 / zs[nonzero])
        return out


def cardioid_complement() -> NegMinkowskiSquareComplement:
    return NegMinkowskiSquareComplement(ClosedDisk(-1, 1))


def halfplane_square_complement(eps: float) -> NegMinkowskiSquareComplement:
    return NegMinkowskiSquareComplement(ClosedHalfPlane(eps))


def contains(region: Region, z: complex) -> bool:
    return region.contains(complex(z))


# ---------------------------------------------------------------------------
# Distances


def _halfplane_square_distance(eps: float, lam: float) -> float:
    if lam < eps**2:
        return lam + eps**2
    return 2 * eps * math.sqrt(lam)


def _cardioid_distance(lam: float) -> float:
    # Boundary rho(psi) = 2(1-cos psi); the squared distance from positive real
    # lam is minimized at cos(psi) = (lam+2)/(2 lam+2).
    c = (lam + 2) / (2 * lam + 2)
    best = lam + 4.0  # psi = pi candidate, boundary point -4
    if -1 <= c <= 1:
        psi = math.acos(c)
        w = 2 * (1 - c) * cmath.exp(1j * psi)
        best = min(best, abs(lam - w))
    return best


def _pair_distance_numeric(
    base1, base2, lam: float, grid: int = 2048, newton_steps: int = 30
) -> float:
    """min over boundary pairs (a, b) of |lam + a b|, by chunked grid search
    plus Newton refinement in the two boundary parameters."""

    if isinstance(base1, ClosedHalfPlane):
        lo, hi = -math.pi / 2 + 1e-9, math.pi / 2 - 1e-9
    else:
        lo, hi = 0.0, 2 * math.pi
    us = np.linspace(lo, hi, grid, endpoint=not isinstance(base1, ClosedDisk))
    if isinstance(base2, ClosedHalfPlane):
        lo2, hi2 = -math.pi / 2 + 1e-9, math.pi / 2 - 1e-9
    else:
        lo2, hi2 = 0.0, 2 * math.pi
    vs = np.linspace(lo2, hi2, grid, endpoint=not isinstance(base2, ClosedDisk))

    a_all = base1.boundary_point(us)
    b_all = base2.boundary_point(vs)
    best_val = math.inf
    best_uv = (us[0], vs[0])
    chunk = max(1, (1 << 20) // grid)
    for i0 in range(0, grid, chunk):
        a = a_all[i0 : i0 + chunk]
        F = np.abs(lam + a[:, None] * b_all[None, :])
        k = int(np.argmin(F))
        r, c = divmod(k, grid)
        if F[r, c] < best_val:
            best_val = float(F[r, c])
            best_uv = (float(us[i0 + r]), float(vs[c]))

    def value_and_grad(u, v):
        a = complex(base1.boundary_point(u))
        b = complex(base2.boundary_point(v))
        da = complex(base1.boundary_tangent(u))
        db = complex(base2.boundary_tangent(v))
        w = lam + a * b
        F = abs(w) ** 2
        gu = 2 * (w.conjugate() * da * b).real
        gv = 2 * (w.conjugate() * a * db).real
        return F, gu, gv

    u, v = best_uv
    Fcur, gu, gv = value_and_grad(u, v)
    h = 1e-6
    for _ in range(newton_steps):
        if math.hypot(gu, gv) < 1e-16 * (1 + Fcur):
            break
        # Finite-difference Hessian of F(u, v).
        _, gu_u, gv_u = value_and_grad(u + h, v)
        _, gu_d, gv_d = value_and_grad(u - h, v)
        _, gu_r, gv_r = value_and_grad(u, v + h)
        _, gu_l, gv_l = value_and_grad(u, v - h)
        huu = (gu_u - gu_d) / (2 * h)
        hvv = (gv_r - gv_l) / (2 * h)
        huv = ((gv_u - gv_d) / (2 * h) + (gu_r - gu_l) / (2 * h)) / 2
        det = huu * hvv - huv * huv
        if abs(det) < 1e-300:
            break
        du = -(hvv * gu - huv * gv) / det
        dv = -(huu * gv - huv * gu) / det
        step = 1.0
        moved = False
        for _ in range(25):
            Fnew, gnu, gnv = value_and_grad(u + step * du, v + step * dv)
            if Fnew < Fcur:
                u, v = u + step * du, v + step * dv
                Fcur, gu, gv = Fnew, gnu, gnv
                moved = True
                break
            step /= 2
        if not moved:
            break
    refined = math.sqrt(Fcur)
    if refined < best_val:
        best_val = refined
    else:
        # Zoom-grid fallback around the best grid point.
        u, v = best_uv
        span = (hi - lo) / grid * 4
        for _ in range(6):
            uu = np.linspace(u - span, u + span, 65)
            vv = np.linspace(v - span, v + span, 65)
            a = base1.boundary_point(uu)
            b = base2.boundary_point(vv)
            F = np.abs(lam + a[:, None] * b[None, :])
            k = int(np.argmin(F))
            r, c = divmod(k, 65)
            u, v = float(uu[r]), float(vv[c])
            best_val = min(best_val, float(F[r, c]))
            span /= 8
    return best_val


@dataclass(frozen=True)
class DistanceResult:
    value: float
    method: str
    exact_geometry: bool  # False for flagged best-effort paths


def _probe_distance(region: Region, lam: float, directions: int = 1024,
                    truncation_radius: float = DEFAULT_TRUNCATION_RADIUS) -> float:
    """Best-effort distance: nearest boundary crossing along ray probes."""
    best = math.inf
    for k in range(directions):
        theta = 2 * math.pi * k / directions
        d = cmath.exp(1j * theta)
        t_in, t_out = 0.0, None
        t = max(1e-9, abs(lam) * 1e-9)
        while t <= truncation_radius:
            if not region.contains(lam + t * d):
                t_out = t
                break
            t_in = t
            t *= 2
        if t_out is None:
            continue
        for _ in range(60):
            mid = (t_in + t_out) / 2
            if region.contains(lam + mid * d):
                t_in = mid
            else:
                t_out = mid
        best = min(best, t_out)
    if best is math.inf:
        raise NonConvergenceError(
            "no boundary crossing found within the truncation radius"
        )
    return best


@lru_cache(maxsize=1024)
def _distance_cached(region: Region, lam: float, method: str) -> DistanceResult:
    if isinstance(region, OpenDisk):
        return DistanceResult(region.radius - abs(lam - region.center), "disk.closed_form", True)
    if isinstance(region, ClosedDiskComplement):
        return DistanceResult(abs(lam - region.center) - region.radius,
                              "disk_complement.closed_form", True)
    if isinstance(region, OpenHalfPlane):
        val = (lam * region.normal.conjugate()).real - region.offset
        return DistanceResult(val, "halfplane.closed_form", True)
    if isinstance(region, NegMinkowskiSquareComplement):
        base = region.base
        if isinstance(base, ClosedHalfPlane):
            if method in ("auto", "closed_form"):
                return DistanceResult(_halfplane_square_distance(base.eps, lam),
                                      "distance.halfplane_square.closed_form", True)
            return DistanceResult(_pair_distance_numeric(base, base, lam),
                                  "distance.boundary_pair.numeric", True)
        if base == ClosedDisk(-1, 1) and method in ("auto", "closed_form"):
            return DistanceResult(_cardioid_distance(lam),
                                  "distance.cardioid.closed_form", True)
        return DistanceResult(_pair_distance_numeric(base, base, lam),
                              "distance.boundary_pair.numeric", True)
    if isinstance(region, NegMinkowskiProductComplement):
        b1, b2 = region.base1, region.base2
        if isinstance(b1, ClosedHalfPlane):
            if method in ("auto", "closed_form"):
                eps_eff = math.sqrt(b1.eps * b2.eps)
                return DistanceResult(_halfplane_square_distance(eps_eff, lam),
                                      "distance.halfplane_product.closed_form", True)
            return DistanceResult(_pair_distance_numeric(b1, b2, lam),
                                  "distance.boundary_pair.numeric", True)
        return DistanceResult(_pair_distance_numeric(b1, b2, lam),
                              "distance.boundary_pair.numeric", True)
    if isinstance(region, Scaled):
        inner = _distance_cached(region.inner, region.factor * lam, method)
        return DistanceResult(inner.value / region.factor,
                              inner.method + "+scaled", inner.exact_geometry)
    if isinstance(region, Intersection):
        parts = [_distance_cached(m, lam, method) for m in region.members]
        val = min(p.value for p in parts)
        exact = len(parts) == 1 and parts[0].exact_geometry
        return DistanceResult(val, "distance.intersection.min_of_members", exact)
    return DistanceResult(_probe_distance(region, lam),
                          "distance.directional_probe.best_effort", False)


def distance_report(region: Region, lam: float, method: str = "auto") -> DistanceResult:
    """Distance from positive real lam to the region boundary, with the method
    used and whether the geometry path is exact or best-effort."""
    lam = float(lam)
    if not (lam > 0):
        raise ValidationError("lambda must be a positive real")
    if not region.contains(lam):
        raise ValidationError(f"lambda = {lam:g} is not in the region")
    if method not in ("auto", "closed_form", "numeric"):
        raise ValidationError(f"unknown distance method {method!r}")
    return _distance_cached(region, lam, method)


def dist_to_boundary(region: Region, lam: float, method: str = "auto") -> float:
    return distance_report(region, lam, method).value


def delta(lam: float, region: Region, method: str = "auto") -> float:
    """Normalized boundary distance (1/lambda) * dist(lambda, boundary)."""
    return dist_to_boundary(region, lam, method) / float(lam)


# ---------------------------------------------------------------------------
# Region combinator


def asano_ruelle_edge_region(phi_u: Region, phi_v: Region) -> Region:
    """Edge-activity region (-phi_u^c * phi_v^c)^c from two root-exclusion
    regions; each input must be a circular region whose closure contains 0."""

    def complement_base(phi: Region, name: str):
        if isinstance(phi, ClosedDiskComplement):
            # closure contains 0 iff the removed disk reaches 0
            if abs(phi.center) > phi.radius + 1e-12:
                raise ValidationError(f"{name} does not contain 0")
            return ClosedDisk(phi.center, phi.radius)
        if isinstance(phi, OpenHalfPlane):
            if phi.normal != 1:
                raise ValidationError(
                    f"{name}: only half-planes of the form x > -eps are supported"
                )
            if phi.offset >= 0:
                raise ValidationError(f"{name} does not contain 0")
            return ClosedHalfPlane(-phi.offset)
        raise ValidationError(f"{name} is not a supported circular region")

    b1 = complement_base(phi_u, "phi_u")
    b2 = complement_base(phi_v, "phi_v")
    return neg_minkowski_complement(b1, b2)


def neg_minkowski_complement(b1, b2) -> Region:
    """(-b1*b2)^c, collapsing equal bases to the square form."""
    if b1 == b2:
        return NegMinkowskiSquareComplement(b1)
    return NegMinkowskiProductComplement(b1, b2)


# ---------------------------------------------------------------------------
# Sampling


def sample(
    region: Region,
    rng,
    *,
    truncation_radius: float = DEFAULT_TRUNCATION_RADIUS,
    reference_point: complex | None = None,
    max_attempts: int = 10**6,
) -> complex:
    """One point of the region by bounding-box rejection.  With a reference
    point, only the connected component containing it is sampled (components
    are identified by flood fill on a grid whose resolution doubles until the
    answer stabilizes)."""
    x0, x1, y0, y1 = region.sample_box(truncation_radius)
    for _ in range(max_attempts):
        z = complex(rng.uniform(x0, x1), rng.uniform(y0, y1))
        if not region.contains(z):
            continue
        if reference_point is not None and not same_component(
            region, z, reference_point, truncation_radius=truncation_radius
        ):
            continue
        return z
    raise NonConvergenceError(f"rejection sampling failed after {max_attempts} attempts")


def _component_grid_answer(region: Region, a: complex, b: complex, box, res: int) -> bool:
    x0, x1, y0, y1 = box
    xs = np.linspace(x0, x1, res)
    ys = np.linspace(y0, y1, res)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    inside = region.contains_many((X + 1j * Y).ravel()).reshape(res, res)

    def cell(z):
        i = int(np.clip(np.searchsorted(xs, z.real) - 1, 0, res - 1))
        j = int(np.clip(np.searchsorted(ys, z.imag) - 1, 0, res - 1))
        # snap to a nearby inside cell if the exact cell straddles the boundary
        for di in (0, 1, -1):
            for dj in (0, 1, -1):
                ii, jj = i + di, j + dj
                if 0 <= ii < res and 0 <= jj < res and inside[ii, jj]:
                    return ii, jj
        return None

    ca, cb = cell(a), cell(b)
    if ca is None or cb is None:
        return False
    # BFS flood fill from ca.
    seen = np.zeros_like(inside)
    stack = [ca]
    seen[ca] = True
    while stack:
        i, j = stack.pop()
        if (i, j) == cb:
            return True
        for ii, jj in ((i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1)):
            if 0 <= ii < res and 0 <= jj < res and inside[ii, jj] and not seen[ii, jj]:
                seen[ii, jj] = True
                stack.append((ii, jj))
    return bool(seen[cb])


def same_component(
    region: Region,
    z: complex,
    reference: complex,
    *,
    truncation_radius: float = DEFAULT_TRUNCATION_RADIUS,
) -> bool:
    """Whether z and the reference point lie in the same connected component,
    by flood fill at doubling resolutions until the answer repeats twice."""
    if not (region.contains(z) and region.contains(reference)):
        return False
    box = region.sample_box(truncation_radius)
    span = max(abs(z - reference), 1.0)
    pad = span * 2
    x0 = max(box[0], min(z.real, reference.real) - pad)
    x1 = min(box[1], max(z.real, reference.real) + pad)
    y0 = max(box[2], min(z.imag, reference.imag) - pad)
    y1 = min(box[3], max(z.imag, reference.imag) + pad)
    answers = []
    res = 64
    while res <= 2048:
        answers.append(_component_grid_answer(region, reference, z, (x0, x1, y0, y1), res))
        if len(answers) >= 3 and answers[-1] == answers[-2] == answers[-3]:
            return answers[-1]
        res *= 2
    return answers[-1]


# ---------------------------------------------------------------------------
# Region literals


def describe(region: Region) -> str:
    """Canonical literal form; ``parse_region`` round-trips it."""
    if isinstance(region, NegMinkowskiSquareComplement):
        if isinstance(region.base, ClosedHalfPlane):
            return f"halfplane eps={region.base.eps:.12g}"
        if region.base == ClosedDisk(-1, 1):
            return "cardioid"
        return (f"negmink disk c={_fmt_c(region.base.center)} r={region.base.radius:.12g} "
                f"disk c={_fmt_c(region.base.center)} r={region.base.radius:.12g}")
    if isinstance(region, NegMinkowskiProductComplement):
        return f"negmink {_fmt_base(region.base1)} {_fmt_base(region.base2)}"
    if isinstance(region, OpenDisk):
        return f"disk c={_fmt_c(region.center)} r={region.radius:.12g}"
    if isinstance(region, Scaled):
        return f"scaled f={region.factor:.12g} ({describe(region.inner)})"
    if isinstance(region, OpenHalfPlane):
        return f"open-halfplane n={_fmt_c(region.normal)} o={region.offset:.12g}"
    if isinstance(region, ClosedDiskComplement):
        return f"disk-complement c={_fmt_c(region.center)} r={region.radius:.12g}"
    if isinstance(region, Intersection):
        return "intersect " + " ".join(f"({describe(m)})" for m in region.members)
    if isinstance(region, Inverted):
        return f"inverted ({describe(region.inner)})"
    raise ValidationError(f"cannot describe region type {type(region).__name__}")


def _fmt_c(c: complex) -> str:
    if c.imag == 0:
        return f"{c.real:.12g}"
    return f"{c.real:.12g}{c.imag:+.12g}j"


def _fmt_base(base) -> str:
    if isinstance(base, ClosedDisk):
        return f"disk c={_fmt_c(base.center)} r={base.radius:.12g}"
    return f"halfplane eps={base.eps:.12g}"


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.toks = _re.findall(r"\(|\)|[^\s()]+", text)
        self.pos = 0

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def next(self):
        tok = self.peek()
        if tok is None:
            raise ParseError(f"unexpected end of region literal {self.text!r}")
        self.pos += 1
        return tok

    def expect(self, want: str):
        tok = self.next()
        if tok != want:
            raise ParseError(f"expected {want!r}, found {tok!r} in region literal {self.text!r}")
        return tok


def _kv(tokens: _Tokens, key: str, conv):
    tok = tokens.next()
    if not tok.startswith(key + "="):
        raise ParseError(f"expected {key}=..., found {tok!r} in region literal")
    try:
        return conv(tok[len(key) + 1 :])
    except ValueError as exc:
        raise ParseError(f"bad value for {key} in region literal: {exc}") from exc


def _parse_base(tokens: _Tokens):
    tok = tokens.next()
    if tok == "disk":
        c = _kv(tokens, "c", complex)
        r = _kv(tokens, "r", float)
        return ClosedDisk(c, r)
    if tok == "halfplane":
        return ClosedHalfPlane(_kv(tokens, "eps", float))
    raise ParseError(f"expected a disk or halfplane base, found {tok!r}")


def _parse_region(tokens: _Tokens) -> Region:
    tok = tokens.next()
    if tok == "halfplane":
        return NegMinkowskiSquareComplement(ClosedHalfPlane(_kv(tokens, "eps", float)))
    if tok == "cardioid":
        return cardioid_complement()
    if tok == "negmink":
        return neg_minkowski_complement(_parse_base(tokens), _parse_base(tokens))
    if tok == "disk":
        c = _kv(tokens, "c", complex)
        r = _kv(tokens, "r", float)
        return OpenDisk(c, r)
    if tok == "disk-complement":
        c = _kv(tokens, "c", complex)
        r = _kv(tokens, "r", float)
        return ClosedDiskComplement(c, r)
    if tok == "open-halfplane":
        n = _kv(tokens, "n", complex)
        o = _kv(tokens, "o", float)
        return OpenHalfPlane(n, o)
    if tok == "scaled":
        f = _kv(tokens, "f", float)
        tokens.expect("(")
        inner = _parse_region(tokens)
        tokens.expect(")")
        return Scaled(inner, f)
    if tok == "intersect":
        members = []
        while tokens.peek() == "(":
            tokens.next()
            members.append(_parse_region(tokens))
            tokens.expect(")")
        if not members:
            raise ParseError("intersect needs at least one (...) member")
        return Intersection(tuple(members))
    if tok == "inverted":
        tokens.expect("(")
        inner = _parse_region(tokens)
        tokens.expect(")")
        return Inverted(inner)
    raise ParseError(f"unknown region literal starting with {tok!r}")


def parse_region(text: str) -> Region:
    """Parse a region literal such as ``halfplane eps=0.5``, ``cardioid``,
    ``negmink disk c=-1 r=1 disk c=-1 r=1``, or ``scaled f=0.5 (...)``."""
    tokens = _Tokens(text.strip())
    try:
        region = _parse_region(tokens)
    except ValidationError as exc:
        raise ParseError(f"invalid region literal {text!r}: {exc}") from exc
    if tokens.peek() is not None:
        raise ParseError(f"trailing tokens {tokens.toks[tokens.pos:]} in region literal {text!r}")
    return region
