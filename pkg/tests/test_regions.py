import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from specind import (
    Intersection,
    Inverted,
    OpenDisk,
    OpenHalfPlane,
    Scaled,
    ValidationError,
    asano_ruelle_edge_region,
    cardioid_complement,
    delta,
    describe,
    dist_to_boundary,
    distance_report,
    halfplane_square_complement,
    parse_region,
)
from specind.regions import ClosedDisk, ClosedHalfPlane, sample


# -------------------------------------------------------------- membership


def test_cardioid_complement_membership():
    r = cardioid_complement()
    # the removed set is -(closure of D(-1,1))^2, a cardioid with its cusp
    # at the origin reaching -4 on the negative axis; only 0 itself blocks
    # the positive direction
    assert not r.contains(0)
    assert not r.contains(-3.99)
    assert r.contains(1e-9)
    assert r.contains(-4.01)
    assert r.contains(1.0)
    # boundary formula |z| = 2(1 - cos(arg z)) on the cut side
    theta = 2.0
    rad = 2 * (1 - math.cos(theta))
    z = cmath.rect(rad * 1.001, theta)
    assert r.contains(z)
    assert not r.contains(cmath.rect(rad * 0.999, theta))


def test_halfplane_square_membership():
    r = halfplane_square_complement(0.5)
    # removed set is the closed region left of the parabola
    # x = (y/(2 eps))^2 - eps^2, which crosses the real axis at -eps^2
    assert r.contains(0)
    assert not r.contains(-1)
    assert r.contains(-0.24)
    assert not r.contains(-0.26)
    y = 0.8
    x = (y / 1.0) ** 2 - 0.25
    assert r.contains(complex(x + 0.01, y))
    assert not r.contains(complex(x - 0.01, y))


def test_positive_axis_clearance_values():
    r = halfplane_square_complement(0.5)
    assert dist_to_boundary(r, 1.0) == pytest.approx(1.0)
    assert dist_to_boundary(r, 0.1) == pytest.approx(0.35)
    assert dist_to_boundary(r, 4.0) == pytest.approx(2.0)
    assert delta(4.0, r) == pytest.approx(0.5)


def test_cardioid_distance_closed_form_matches_frozen_values():
    r = cardioid_complement()
    assert dist_to_boundary(r, 0.5) == pytest.approx(0.28867513459481287, abs=1e-12)
    assert dist_to_boundary(r, 1.0) == pytest.approx(0.7071067811865476, abs=1e-12)
    assert dist_to_boundary(r, 2.0) == pytest.approx(1.632993161855452, abs=1e-12)


@pytest.mark.parametrize("eps", [0.1, 0.25, 0.5, 1.0])
@pytest.mark.parametrize("lam_rule", ["0.01", "eps2", "1", "4"])
def test_halfplane_square_closed_form_vs_numeric(eps, lam_rule):
    lam = {"0.01": 0.01, "eps2": eps * eps, "1": 1.0, "4": 4.0}[lam_rule]
    r = halfplane_square_complement(eps)
    closed = distance_report(r, lam, method="closed_form")
    numeric = distance_report(r, lam, method="numeric")
    assert closed.exact_geometry
    assert closed.value == pytest.approx(numeric.value, abs=1e-6)


def test_cardioid_closed_form_vs_numeric():
    r = cardioid_complement()
    for lam in (0.5, 1.0, 2.0):
        closed = distance_report(r, lam, method="closed_form")
        numeric = distance_report(r, lam, method="numeric")
        assert closed.value == pytest.approx(numeric.value, abs=1e-6)


def test_distance_method_tags():
    assert (
        distance_report(cardioid_complement(), 1.0).method
        == "distance.cardioid.closed_form"
    )
    assert (
        distance_report(halfplane_square_complement(0.5), 1.0).method
        == "distance.halfplane_square.closed_form"
    )


def test_scaled_region_distance_scales():
    r = halfplane_square_complement(0.5)
    s = Scaled(inner=r, factor=2.0)  # z in s iff 2z in r
    assert s.contains(-0.124)  # boundary moves to -eps^2 / factor
    assert not s.contains(-0.126)
    assert dist_to_boundary(s, 0.5) == pytest.approx(dist_to_boundary(r, 1.0) / 2)


def test_mixed_product_region_distance():
    # half-plane times disk base: (-H_a * D_b)^c with the parabola form exact
    a, b = ClosedHalfPlane(0.5), ClosedHalfPlane(0.8)
    from specind import neg_minkowski_complement

    r = neg_minkowski_complement(a, b)
    rep = distance_report(r, 1.0)
    # the square-case geometry carries over with eps^2 replaced by a*b
    assert rep.value == pytest.approx(2 * math.sqrt(0.4 * 1.0))
    assert rep.method == "distance.halfplane_product.closed_form"
    assert r.contains(-0.39)
    assert not r.contains(-0.41)


def test_asano_ruelle_edge_region_halfplane_case():
    phi = OpenHalfPlane(1, -0.5)  # {Re z > -0.5}... offset convention checked below
    region = asano_ruelle_edge_region(phi, phi)
    assert describe(region) == "halfplane eps=0.5"


def test_asano_ruelle_edge_region_disk_case():
    from specind import ClosedDiskComplement

    disk_c = ClosedDiskComplement(-1, 1)
    region = asano_ruelle_edge_region(disk_c, disk_c)
    assert describe(region) == "cardioid"


def test_asano_ruelle_requires_zero_in_closure():
    from specind import ClosedDiskComplement

    far = ClosedDiskComplement(-5, 1)
    with pytest.raises(ValidationError):
        asano_ruelle_edge_region(far, far)


# -------------------------------------------------------------- literals


@pytest.mark.parametrize(
    "literal",
    [
        "cardioid",
        "halfplane eps=0.5",
        "disk c=-1 r=0.25",
        "disk c=1+2j r=3",
        "disk-complement c=-1 r=1",
        "negmink disk c=-1 r=1 disk c=-2 r=0.5",
        "negmink halfplane eps=0.3 halfplane eps=0.7",
        "scaled f=0.5 (cardioid)",
        "inverted (disk c=-1 r=1)",
        "intersect (cardioid) (halfplane eps=0.5)",
    ],
)
def test_parse_describe_round_trip(literal):
    region = parse_region(literal)
    text = describe(region)
    again = parse_region(text)
    assert describe(again) == text
    # membership agrees on a probe set
    for z in (0.3, 1.5, -0.2 + 0.4j, 2 - 1j):
        assert region.contains(z) == again.contains(z)


def test_parse_region_rejects_garbage():
    from specind import ParseError

    for bad in ("", "pentagon", "disk c=1", "halfplane", "scaled f=2"):
        with pytest.raises(ParseError):
            parse_region(bad)


# -------------------------------------------------------------- sampling


def test_sample_stays_in_region_and_is_deterministic():
    rng1 = np.random.default_rng(5)
    rng2 = np.random.default_rng(5)
    r = cardioid_complement()
    pts1 = [sample(r, rng1, truncation_radius=16) for _ in range(50)]
    pts2 = [sample(r, rng2, truncation_radius=16) for _ in range(50)]
    assert pts1 == pts2
    assert all(r.contains(z) for z in pts1)
    assert all(abs(z.real) <= 16 and abs(z.imag) <= 16 for z in pts1)


def test_inverted_region_membership():
    base = OpenDisk(-1, 1)
    inv = Inverted(base)
    # z in inv iff 1/z in base; z = -1 maps to -1 which is the disk center
    assert inv.contains(-1)
    assert not inv.contains(1)


def test_intersection_membership():
    r = Intersection((cardioid_complement(), halfplane_square_complement(1.0)))
    assert r.contains(1.5)
    assert not r.contains(-0.5)  # inside the halfplane-square removed set
    assert not r.contains(-3.5)  # inside the cardioid removed set only


@given(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False, allow_subnormal=False))
@settings(max_examples=80, deadline=None)
def test_cardioid_polar_criterion(z):
    r = cardioid_complement()
    if z == 0:
        assert not r.contains(z)
        return
    inside_cut = abs(z) <= 2 * (1 - math.cos(cmath.phase(z))) + 1e-12
    near_boundary = abs(abs(z) - 2 * (1 - math.cos(cmath.phase(z)))) < 1e-9
    if not near_boundary:
        assert r.contains(z) == (not inside_cut)
