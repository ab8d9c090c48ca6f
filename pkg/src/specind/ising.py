"""Map even-subgraph samples to Ising spin samples.

The pipeline: lift an edge sample to an even subgraph of the ghost-augmented
graph (a ghost vertex adjacent to every vertex absorbs odd degrees), sprinkle
every absent augmented edge independently with its own edge activity, read the
union as a q=2 random-cluster sample, and color components with uniform signs
relative to the ghost.  The output law is the Ising model with agreement
weight ``(1+lam)/(1-lam)`` per edge and vertex field ``(1+rho)/(1-rho)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import CapExceededError, ValidationError
from .exact import gibbs_table
from .graphs import Graph
from .models import BinarySymmetricHolant, VertexSpinModel

EXACT_COMPOSITION_EDGE_CAP = 20


@dataclass(frozen=True)
class IsingParameters:
    beta: float
    lam: float


def ising_parameters(lam, rho) -> IsingParameters:
    lam_f, rho_f = float(lam), float(rho)
    if not 0 < lam_f < 1:
        raise ValidationError(
            f"transform requires an edge activity in (0, 1); got {lam_f}"
        )
    if rho_f == 1:
        raise ValidationError(
            "rho = 1 maps to an infinite Ising field (1+rho)/(1-rho); "
            "the transform rejects rho = 1"
        )
    if not 0 < rho_f < 1:
        raise ValidationError(
            f"transform requires rho in (0, 1); got {rho_f}"
        )
    return IsingParameters(beta=(1 + lam_f) / (1 - lam_f), lam=(1 + rho_f) / (1 - rho_f))


def _require_even_subgraph(model) -> tuple[Graph, tuple, object]:
    if not isinstance(model, BinarySymmetricHolant) or model.family != "even_subgraph":
        raise ValidationError("the transform expects an even-subgraph edge model")
    rho = model.param("rho")
    for lam_e in model.edge_fields:
        ising_parameters(lam_e, rho)
    return model.graph, model.edge_fields, rho


def _augmented_edges(graph: Graph, edge_fields, rho):
    """Edges of the ghost-augmented graph with their sprinkle activities."""
    ghost = graph.vertex_count
    edges = [(u, v) for (u, v) in graph.edges]
    activities = list(edge_fields)
    for v in range(graph.vertex_count):
        edges.append((v, ghost))
        activities.append(rho)
    return edges, activities, ghost


def _lift(graph: Graph, sample) -> list[int]:
    """Augmented-edge indicator of the lifted even subgraph."""
    degree = [0] * graph.vertex_count
    for e, (u, v) in enumerate(graph.edges):
        if sample[e]:
            degree[u] += 1
            degree[v] += 1
    indicator = [1 if sample[e] else 0 for e in range(graph.edge_count)]
    indicator.extend(1 if degree[v] % 2 else 0 for v in range(graph.vertex_count))
    return indicator


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x: int, y: int) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[max(rx, ry)] = min(rx, ry)


def _component_reps(n_vertices: int, edges, indicator) -> list[int]:
    uf = _UnionFind(n_vertices)
    for on, (u, v) in zip(indicator, edges):
        if on:
            uf.union(u, v)
    return [uf.find(v) for v in range(n_vertices)]


def even_subgraph_to_ising(model, sample, seed: int) -> tuple[int, ...]:
    """Transform one edge sample into a vertex sample in {-1, +1}^V."""
    graph, edge_fields, rho = _require_even_subgraph(model)
    sample = tuple(int(s) for s in sample)
    if len(sample) != graph.edge_count or any(s not in (0, 1) for s in sample):
        raise ValidationError("sample must assign 0/1 to every edge")
    edges, activities, ghost = _augmented_edges(graph, edge_fields, rho)
    indicator = _lift(graph, sample)
    rng = np.random.default_rng(seed)
    for i, (on, a) in enumerate(zip(indicator, activities)):
        if not on and rng.random() < float(a):
            indicator[i] = 1
    reps = _component_reps(ghost + 1, edges, indicator)
    signs = {r: int(rng.integers(0, 2)) * 2 - 1 for r in sorted(set(reps))}
    ghost_sign = signs[reps[ghost]]
    return tuple(signs[reps[v]] * ghost_sign for v in range(graph.vertex_count))


def ising_model_from_even_subgraph(model) -> VertexSpinModel:
    """The target Ising law as a vertex-spin model (spin 1 is +, spin 0 is -).

    Arithmetic stays rational when the source model's parameters are rational.
    """
    graph, edge_fields, rho = _require_even_subgraph(model)
    matrices = []
    one = Fraction(1)
    for lam_e in edge_fields:
        lam_x = lam_e if isinstance(lam_e, (int, Fraction)) else float(lam_e)
        beta = (one + lam_x) / (one - lam_x)
        matrices.append(((beta, 1), (1, beta)))
    rho_x = rho if isinstance(rho, (int, Fraction)) else float(rho)
    lam_field = (one + rho_x) / (one - rho_x)
    fields = tuple((1, lam_field) for _ in range(graph.vertex_count))
    return VertexSpinModel(graph, 2, tuple(matrices), fields)


def exact_transform_distribution(model) -> dict[tuple[int, ...], Fraction]:
    """Exact output law of the transform, by enumerating samples, sprinkles,
    and colorings.  Only for small graphs; exact when the model is rational."""
    graph, edge_fields, rho = _require_even_subgraph(model)
    edges, activities, ghost = _augmented_edges(graph, edge_fields, rho)
    if len(edges) > EXACT_COMPOSITION_EDGE_CAP:
        raise CapExceededError(
            f"{len(edges)} augmented edges exceed the exact-composition cap "
            f"of {EXACT_COMPOSITION_EDGE_CAP}"
        )
    acts = [Fraction(a) for a in activities]
    table = gibbs_table(model)
    dist: dict[tuple[int, ...], Fraction] = {}
    n = graph.vertex_count
    for cfg, prob in zip(table.configs, table.probabilities):
        base = _lift(graph, cfg)
        free = [i for i, on in enumerate(base) if not on]
        p_sample = Fraction(prob)
        for mask in range(1 << len(free)):
            indicator = list(base)
            p_sprinkle = Fraction(1)
            for bit, i in enumerate(free):
                if mask >> bit & 1:
                    indicator[i] = 1
                    p_sprinkle *= acts[i]
                else:
                    p_sprinkle *= 1 - acts[i]
            reps = _component_reps(ghost + 1, edges, indicator)
            comps = sorted(set(reps))
            p_color = Fraction(1, 2 ** len(comps))
            for color_mask in range(1 << len(comps)):
                signs = {
                    r: (1 if color_mask >> i & 1 else -1)
                    for i, r in enumerate(comps)
                }
                ghost_sign = signs[reps[ghost]]
                sigma = tuple(signs[reps[v]] * ghost_sign for v in range(n))
                dist[sigma] = dist.get(sigma, Fraction(0)) + (
                    p_sample * p_sprinkle * p_color
                )
    return dist


def ising_sample_batch(model, n_draws: int, seed: int) -> np.ndarray:
    """Vectorized transform over i.i.d. exact even-subgraph samples; returns
    an (n_draws, vertex_count) array of +/-1 spins."""
    if n_draws <= 0:
        raise ValidationError("empty sample")
    graph, edge_fields, rho = _require_even_subgraph(model)
    edges, activities, ghost = _augmented_edges(graph, edge_fields, rho)
    m_star = len(edges)
    if m_star > 16:
        raise CapExceededError(
            f"{m_star} augmented edges exceed the batch cap of 16"
        )
    table = gibbs_table(model)
    probs = np.array([float(p) for p in table.probabilities])
    probs /= probs.sum()
    lifts = np.array(
        [_lift(graph, cfg) for cfg in table.configs], dtype=bool
    )  # (n_configs, m_star)
    acts = np.array([float(a) for a in activities])

    # Component representatives for every possible augmented edge set.
    reps_table = np.empty((1 << m_star, ghost + 1), dtype=np.int64)
    for mask in range(1 << m_star):
        indicator = [(mask >> i) & 1 for i in range(m_star)]
        reps_table[mask] = _component_reps(ghost + 1, edges, indicator)

    rng = np.random.default_rng(seed)
    sigma = np.empty((n_draws, graph.vertex_count), dtype=np.int8)
    chunk = max(1, min(n_draws, (1 << 24) // max(1, m_star)))
    bits = 1 << np.arange(m_star, dtype=np.int64)
    done = 0
    while done < n_draws:
        size = min(chunk, n_draws - done)
        t_idx = rng.choice(len(probs), size=size, p=probs)
        in_lift = lifts[t_idx]
        sprinkle = rng.random((size, m_star)) < acts[None, :]
        omega = in_lift | (sprinkle & ~in_lift)
        mask_ids = omega @ bits
        reps = reps_table[mask_ids]  # (size, ghost+1)
        signs = rng.integers(0, 2, size=(size, ghost + 1), dtype=np.int8) * 2 - 1
        comp_signs = np.take_along_axis(signs, reps, axis=1)
        sigma[done : done + size] = (
            comp_signs[:, : graph.vertex_count] * comp_signs[:, ghost : ghost + 1]
        )
        done += size
    return sigma
