from fractions import Fraction

import pytest

from specind import build_named_model, cycle_graph, path_graph


@pytest.fixture
def path3():
    return path_graph(3)


@pytest.fixture
def k2():
    return path_graph(2)


@pytest.fixture
def triangle():
    return cycle_graph(3)


@pytest.fixture
def ec_path(path3):
    """Edge covers of the path a-b-c with exact rational parameters."""
    return build_named_model(
        "edge_cover", path3, {"lambda": Fraction(1), "rho": Fraction(1, 2)}
    )


@pytest.fixture
def es_k2(k2):
    """Even subgraphs of a single edge with exact rational parameters."""
    return build_named_model(
        "even_subgraph", k2, {"lambda": Fraction(1, 2), "rho": Fraction(1, 2)}
    )
