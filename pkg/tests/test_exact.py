import math
from fractions import Fraction

import numpy as np
import pytest

from specind import (
    EMPTY_PINNING,
    CapExceededError,
    OpenDisk,
    Pinning,
    ValidationError,
    build_named_model,
    cardioid_complement,
    eigmax,
    gibbs_table,
    influence_eigmax,
    influence_matrix,
    marginal,
    marginal_bound,
    MultiAffinePolynomial,
    partition_function,
    partition_zero_scan,
    path_graph,
    pin_polynomial,
    to_multiaffine,
    zero_scan,
)

F = Fraction


def test_partition_function_exact_rational(ec_path):
    assert partition_function(ec_path) == F(17, 8)


def test_partition_function_conditional(ec_path):
    # pin the second edge off: remaining weights 1/8 (none) + 1/2 (first on)
    assert partition_function(ec_path, Pinning.of({1: 0})) == F(5, 8)


def test_gibbs_table_probabilities(ec_path):
    t = gibbs_table(ec_path)
    assert sum(t.probabilities) == 1
    lookup = dict(zip(t.configs, t.probabilities))
    assert lookup[(1, 1)] == F(8, 17)
    assert lookup[(0, 0)] == F(1, 17)


def test_gibbs_table_infeasible_pinning():
    m = build_named_model("edge_cover", path_graph(3), {"lambda": F(1), "rho": F(0)})
    with pytest.raises(ValidationError):
        gibbs_table(m, Pinning.of({0: 0}))


def test_marginals(ec_path):
    assert marginal(ec_path, EMPTY_PINNING, 0, 1) == F(12, 17)
    assert marginal(ec_path, Pinning.of({1: 0}), 0, 1) == F(4, 5)


def test_marginal_bound_minimizes_over_all_pairs(ec_path):
    # the minimum is attained at mu(edge off | other edge off) = 1/5
    assert marginal_bound(ec_path) == F(1, 5)


def test_influence_matrix_entries_and_row_sums(ec_path):
    psi = influence_matrix(ec_path)
    assert psi.entry((0, 1), (1, 1)) == F(-2, 51)
    # diagonal blocks (same site) vanish
    assert psi.entry((0, 0), (0, 1)) == 0
    # rows sum to zero over each target site's spin values
    arr = psi.array
    for i in range(arr.shape[0]):
        assert abs(arr[i].sum()) < 1e-12


def test_influence_matrix_real_spectrum(ec_path):
    arr = influence_matrix(ec_path, exact=False).array
    eig = np.linalg.eigvals(arr)
    assert np.max(np.abs(eig.imag)) < 1e-8


def test_eigmax_agrees_with_dense_solver(ec_path):
    arr = influence_matrix(ec_path, exact=False).array
    res = eigmax(arr)
    dense = float(np.max(np.linalg.eigvals(arr).real))
    assert res.value == pytest.approx(dense, abs=1e-9)
    assert res.value <= res.inf_norm + 1e-12


def test_eigmax_trivial_cases():
    assert eigmax(np.zeros((0, 0))).value == 0.0
    assert eigmax(np.zeros((3, 3))).value == 0.0
    assert eigmax([[2.0, 0.0], [0.0, -1.0]]).value == pytest.approx(2.0)


def test_influence_eigmax_over_pinnings(ec_path):
    values = [
        influence_eigmax(ec_path, pin).value
        for pin in [EMPTY_PINNING, Pinning.of({0: 0}), Pinning.of({0: 1})]
    ]
    assert max(values) <= 8 / 0.70710678 * 1.01  # sanity ceiling


def test_to_multiaffine_matches_partition_function(ec_path):
    poly = to_multiaffine(ec_path)
    # all edge variables at their activities reproduces Z
    z = poly.evaluate({(0, 1): F(1), (1, 1): F(1)})
    assert z == partition_function(ec_path)


def test_pin_polynomial_matches_model_pinning(ec_path):
    poly = to_multiaffine(ec_path)
    for site in (0, 1):
        for spin in (0, 1):
            direct = to_multiaffine(ec_path, Pinning.of({site: spin}))
            via_poly = pin_polynomial(poly, site, spin, 2)
            assert direct.as_dict() == via_poly.as_dict()


def test_zero_scan_negative_control_finds_root():
    p = MultiAffinePolynomial.from_dict({frozenset(): 1, frozenset([0]): 1})
    rep = zero_scan(p, OpenDisk(-1, 0.5), n_samples=100, seed=3, truncation_radius=16)
    assert rep.zero_found
    assert rep.min_modulus == 0.0
    ((var, point),) = rep.witness
    assert var == 0 and abs(point - (-1)) < 1e-12


def test_zero_scan_region_map_per_variable():
    # zero at (x, y) = (-1, anything) only; restrict x away from -1
    p = MultiAffinePolynomial.from_dict({frozenset(): 1, frozenset(["x"]): 1})
    regions = {"x": OpenDisk(1, 0.5), "y": OpenDisk(-1, 0.5)}
    q = p + MultiAffinePolynomial.from_dict({frozenset(["y"]): 0})
    rep = zero_scan(p, regions, n_samples=200, seed=1, truncation_radius=16)
    assert not rep.zero_found
    assert rep.min_modulus > 0.5


def test_partition_zero_scan_certified_region_is_clean(ec_path):
    rep = partition_zero_scan(
        ec_path, cardioid_complement(), n_samples=400, seed=7, truncation_radius=16
    )
    assert not rep.zero_found
    assert rep.min_modulus > 1e-6
    assert rep.n_samples == 400


def test_zero_scan_rejects_bad_truncation_radius():
    p = MultiAffinePolynomial.from_dict({frozenset(): 1, frozenset([0]): 1})
    for radius in (0.0, -2.0, float("inf"), float("nan")):
        with pytest.raises(ValidationError):
            zero_scan(p, OpenDisk(-1, 0.5), n_samples=10, seed=3, truncation_radius=radius)


def test_zero_scan_reports_are_reproducible(ec_path):
    kw = dict(n_samples=50, seed=11, truncation_radius=16)
    a = partition_zero_scan(ec_path, cardioid_complement(), **kw)
    b = partition_zero_scan(ec_path, cardioid_complement(), **kw)
    assert a == b


def test_pinning_cap_raises():
    m = build_named_model("matchings", path_graph(15), {"lambda": F(1)})
    with pytest.raises(CapExceededError):
        marginal_bound(m)
