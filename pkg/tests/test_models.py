from fractions import Fraction

import pytest

from specind import (
    EMPTY_PINNING,
    BinarySymmetricHolant,
    CubeFourierModel,
    Pinning,
    TensorNetworkModel,
    ValidationError,
    VertexSpinModel,
    build_named_model,
    enumerate_configurations,
    enumerate_pinnings,
    feasible_configurations,
    feasible_pairs,
    is_feasible_pinning,
    path_graph,
    star_graph,
)
from specind.models import weight

F = Fraction


def test_matchings_weights(path3):
    m = build_named_model("matchings", path3, {"lambda": F(2)})
    assert weight(m, (0, 0)) == 1
    assert weight(m, (1, 0)) == 2
    assert weight(m, (0, 1)) == 2
    assert weight(m, (1, 1)) == 0  # center vertex is doubly covered


def test_edge_cover_weights(ec_path):
    # uncovered vertices pay rho each; lambda = 1
    assert weight(ec_path, (0, 0)) == F(1, 8)
    assert weight(ec_path, (1, 0)) == F(1, 2)
    assert weight(ec_path, (1, 1)) == 1


def test_even_subgraph_weights(triangle):
    m = build_named_model("even_subgraph", triangle, {"lambda": F(1), "rho": F(1, 3)})
    # all-zero has even (zero) degree everywhere
    assert weight(m, (0, 0, 0)) == 1
    # a single edge leaves two odd vertices
    assert weight(m, (1, 0, 0)) == F(1, 9)
    # the full triangle is even everywhere
    assert weight(m, (1, 1, 1)) == 1


def test_two_spin_edge_weights(path3):
    m = build_named_model(
        "two_spin_edge", path3, {"beta": F(1, 2), "gamma": F(2), "lambda": F(1)}
    )
    # each vertex of degree d with k occupied incident edges weighs
    # beta^C(k,2) * gamma^C(d-k,2); the path ends have degree 1 and never
    # contribute, the center has degree 2
    assert weight(m, (1, 1)) == F(1, 2)  # center: beta^1
    assert weight(m, (0, 0)) == 2  # center: gamma^1
    assert weight(m, (1, 0)) == 1


def test_ising_line_is_two_spin_with_equal_parameters(path3):
    a = build_named_model("ising_line", path3, {"beta": F(1, 3), "lambda": F(1)})
    b = build_named_model(
        "two_spin_edge", path3, {"beta": F(1, 3), "gamma": F(1, 3), "lambda": F(1)}
    )
    for cfg in enumerate_configurations(a):
        assert weight(a, cfg) == weight(b, cfg)


def test_build_named_model_validates_keys(path3):
    with pytest.raises(ValidationError):
        build_named_model("matchings", path3, {"lambda": 1, "rho": 1})
    with pytest.raises(ValidationError):
        build_named_model("edge_cover", path3, {"lambda": 1})
    with pytest.raises(ValidationError):
        build_named_model("no_such_family", path3, {})


def test_pinning_basics():
    p = Pinning.of({2: 0, 0: 1})
    assert p.sites == (0, 2)
    assert p.size == 2
    assert p.as_dict() == {0: 1, 2: 0}
    assert EMPTY_PINNING.size == 0
    q = p.extend(1, 1)
    assert q.as_dict() == {0: 1, 1: 1, 2: 0}
    with pytest.raises(ValidationError):
        p.extend(0, 0)  # site already pinned


def test_enumerate_and_feasible(ec_path):
    cfgs = list(enumerate_configurations(ec_path))
    assert len(cfgs) == 4
    feas = list(feasible_configurations(ec_path))
    assert len(feas) == 4  # rho > 0 keeps everything feasible
    m = build_named_model("edge_cover", path_graph(3), {"lambda": F(1), "rho": F(0)})
    # with rho = 0 every vertex must be covered: only (1,1) covers both ends
    assert set(feasible_configurations(m)) == {(1, 1)}


def test_feasible_pairs_all_vs_nonzero(ec_path):
    fp = feasible_pairs(ec_path, EMPTY_PINNING)
    assert fp.pairs == ((0, 0), (0, 1), (1, 0), (1, 1))
    assert fp.nonzero == ((0, 1), (1, 1))


def test_is_feasible_pinning(ec_path):
    assert is_feasible_pinning(ec_path, Pinning.of({0: 0}))
    m = build_named_model("edge_cover", path_graph(3), {"lambda": F(1), "rho": F(0)})
    assert not is_feasible_pinning(m, Pinning.of({0: 0}))


def test_enumerate_pinnings_order_and_count(ec_path):
    pins = list(enumerate_pinnings(ec_path))
    assert pins[0] == EMPTY_PINNING
    assert len(pins) == 9  # 1 empty + 4 singletons + 4 feasible full pairs
    sizes = [p.size for p in pins]
    assert sizes == sorted(sizes)


def test_vertex_spin_model_validation(k2):
    with pytest.raises(ValidationError):
        VertexSpinModel(k2, 2, (((1.0, 1.0),),), ((1.0, 1.0), (1.0, 1.0)))
    m = VertexSpinModel(
        k2, 2, (((2.0, 1.0), (1.0, 2.0)),), ((1.0, 1.0), (1.0, 1.0))
    )
    assert weight(m, (0, 0)) == pytest.approx(2.0)
    assert weight(m, (0, 1)) == pytest.approx(1.0)


def test_tensor_model_weight(k2):
    # edge-site model: one site (the single edge); each endpoint applies its
    # tensor over the incident-edge spin
    m = TensorNetworkModel(k2, 2, ((1, 2), (1, 3)), ((1, 1),))
    assert weight(m, (1,)) == 6
    assert weight(m, (0,)) == 1


def test_cube_model_weight():
    m = CubeFourierModel(2, (((0,), 0.25), ((0, 1), -0.5)))
    import math

    # config (1, 0): x = (+1, -1); f = 0.25*1 + (-0.5)*(1*-1) = 0.75
    assert weight(m, (1, 0)) == pytest.approx(math.exp(0.75))


def test_isolated_vertex_needs_zero_count_weight():
    from specind import Graph

    iso = Graph(3, ((0, 1),))
    m = build_named_model("matchings", iso, {"lambda": F(1)})
    # isolated vertex contributes f(0) = 1 for matchings; fine
    assert weight(m, (1,)) == 1
    with pytest.raises(ValidationError):
        # edge_cover has f(0) = rho = 0: an isolated vertex kills every config
        bad = build_named_model("edge_cover", iso, {"lambda": F(1), "rho": F(0)})
        from specind import gibbs_table

        gibbs_table(bad)
