"""Site spaces, Gibbs model families, weights, and pinnings.

Spin conventions: spin 0 is the special spin and never carries an external
field; for edge-site models spin 1 means "edge selected".  Configurations are
plain tuples of ints of length ``site_count``.

All model classes are frozen dataclasses sharing a duck-typed interface:
``sites``, ``fields`` (per-site tuples of field factors, entry 0 always 1),
``base_weight(config)`` (no field factors), ``weight(config)`` (with them) and
``local_weights(config, site)`` (unnormalized single-site conditionals).
Parameters may be ints, floats, or ``fractions.Fraction``; arithmetic stays
exact when every input is exact.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterator, Mapping, Sequence

from .errors import CapExceededError, ValidationError
from .graphs import Graph

SPECIAL_SPIN = 0

DEFAULT_CONFIG_CAP = 1 << 20
DEFAULT_PINNING_CAP = 3**12

_UNDERFLOW_GUARD = 1e-300


def careful_product(factors) -> float | Fraction | int:
    """Product of nonnegative weights; floats switch to log-space accumulation
    when any factor is small enough to underflow a plain product."""
    fs = list(factors)
    if any(f == 0 for f in fs):
        return 0
    if all(not isinstance(f, float) for f in fs):
        p = 1
        for f in fs:
            p *= f
        return p
    if any(isinstance(f, float) and abs(f) < _UNDERFLOW_GUARD for f in fs):
        return math.exp(math.fsum(math.log(f) for f in fs))
    p = 1.0
    for f in fs:
        p *= f
    return p


@dataclass(frozen=True)
class SiteSpace:
    """The index space configurations live over."""

    kind: str  # "edge-sites" | "vertex-sites" | "cube-sites"
    site_count: int
    spin_count: int

    def __post_init__(self):
        if self.kind not in ("edge-sites", "vertex-sites", "cube-sites"):
            raise ValidationError(f"unknown site kind {self.kind!r}")
        if self.site_count < 1:
            raise ValidationError("site_count must be positive")
        if self.spin_count < 2:
            raise ValidationError("spin_count must be at least 2")


@dataclass(frozen=True)
class Pinning:
    """A partial assignment site -> spin on a subset of sites.

    Instances yielded by :func:`enumerate_pinnings` are feasible by
    construction; operations with a feasibility precondition re-check
    user-constructed pinnings at desk scale.
    """

    assignments: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        norm = tuple(sorted((int(s), int(k)) for s, k in self.assignments))
        sites = [s for s, _ in norm]
        if len(set(sites)) != len(sites):
            raise ValidationError("pinning assigns a site twice")
        object.__setattr__(self, "assignments", norm)

    @classmethod
    def of(cls, mapping: Mapping[int, int]) -> "Pinning":
        return cls(tuple(mapping.items()))

    def as_dict(self) -> dict[int, int]:
        return dict(self.assignments)

    @property
    def sites(self) -> tuple[int, ...]:
        return tuple(s for s, _ in self.assignments)

    @property
    def size(self) -> int:
        return len(self.assignments)

    def extend(self, site: int, spin: int) -> "Pinning":
        return Pinning(self.assignments + ((site, spin),))

    def matches(self, config: Sequence[int]) -> bool:
        return all(config[s] == k for s, k in self.assignments)


EMPTY_PINNING = Pinning(())


def _check_fields(fields, q, what):
    for s, per_site in enumerate(fields):
        if len(per_site) != q:
            raise ValidationError(f"{what} {s}: expected {q} field entries")
        if per_site[0] != 1:
            raise ValidationError(f"{what} {s}: spin 0 carries no field (entry must be 1)")
        for k in range(1, q):
            if not (per_site[k] > 0):
                raise ValidationError(f"{what} {s}, spin {k}: field must be positive")


@dataclass(frozen=True)
class BinarySymmetricHolant:
    """Edge-spin model: weight(S) = prod_v f_v(#selected edges at v) * prod_e field_e^{S_e}."""

    graph: Graph
    vertex_functions: tuple[tuple, ...]  # [v][k] for k = 0..deg(v)
    edge_fields: tuple  # per-edge field on spin 1
    family: str | None = None
    params: tuple[tuple[str, object], ...] = ()

    def __post_init__(self):
        g = self.graph
        if g.edge_count == 0:
            raise ValidationError("edge-site model needs at least one edge")
        if len(self.vertex_functions) != g.vertex_count:
            raise ValidationError("one local function per vertex required")
        for v, f in enumerate(self.vertex_functions):
            if len(f) != g.degree(v) + 1:
                raise ValidationError(
                    f"vertex {v}: local function must cover counts 0..{g.degree(v)}"
                )
            if any(w < 0 for w in f):
                raise ValidationError(f"vertex {v}: negative local weight")
            if g.degree(v) == 0 and f[0] == 0:
                raise ValidationError(
                    f"isolated vertex {v} has zero weight; every configuration "
                    "would be infeasible for this family"
                )
        if len(self.edge_fields) != g.edge_count:
            raise ValidationError("one field per edge required")
        if any(not (x > 0) for x in self.edge_fields):
            raise ValidationError("edge fields must be positive")
        object.__setattr__(self, "vertex_functions", tuple(tuple(f) for f in self.vertex_functions))
        object.__setattr__(self, "edge_fields", tuple(self.edge_fields))
        object.__setattr__(self, "params", tuple(self.params))

    @property
    def sites(self) -> SiteSpace:
        return SiteSpace("edge-sites", self.graph.edge_count, 2)

    @cached_property
    def fields(self) -> tuple[tuple, ...]:
        return tuple((1, lam) for lam in self.edge_fields)

    def param(self, name: str):
        for key, val in self.params:
            if key == name:
                return val
        raise KeyError(name)

    def _counts(self, config) -> list[int]:
        counts = [0] * self.graph.vertex_count
        for e, (u, v) in enumerate(self.graph.edges):
            if config[e]:
                counts[u] += 1
                counts[v] += 1
        return counts

    def base_weight(self, config):
        counts = self._counts(config)
        return careful_product(
            self.vertex_functions[v][counts[v]] for v in range(self.graph.vertex_count)
        )

    def weight(self, config):
        base = self.base_weight(config)
        if base == 0:
            return 0
        return base * careful_product(
            self.edge_fields[e] for e in range(len(config)) if config[e]
        )

    def local_weights(self, config, site: int) -> list:
        u, v = self.graph.edges[site]
        cnt_u = sum(config[e] for e in self.graph.incident[u] if e != site)
        cnt_v = sum(config[e] for e in self.graph.incident[v] if e != site)
        out = []
        for s in (0, 1):
            w = self.vertex_functions[u][cnt_u + s] * self.vertex_functions[v][cnt_v + s]
            out.append(w * self.fields[site][s])
        return out


@dataclass(frozen=True)
class VertexSpinModel:
    """Vertex-spin model: weight(sigma) = prod_{e=(u,v)} A_e[sigma_u][sigma_v] * fields."""

    graph: Graph
    spin_count: int
    edge_matrices: tuple[tuple[tuple, ...], ...]  # per edge, rows indexed by spin of the smaller endpoint
    vertex_fields: tuple[tuple, ...]

    def __post_init__(self):
        g, q = self.graph, self.spin_count
        if q < 2:
            raise ValidationError("spin_count must be at least 2")
        if len(self.edge_matrices) != g.edge_count:
            raise ValidationError("one matrix per edge required")
        mats = []
        for e, A in enumerate(self.edge_matrices):
            if len(A) != q or any(len(row) != q for row in A):
                raise ValidationError(f"edge {e}: matrix must be {q}x{q}")
            if any(x < 0 for row in A for x in row):
                raise ValidationError(f"edge {e}: negative matrix entry")
            mats.append(tuple(tuple(row) for row in A))
        object.__setattr__(self, "edge_matrices", tuple(mats))
        if len(self.vertex_fields) != g.vertex_count:
            raise ValidationError("one field tuple per vertex required")
        _check_fields(self.vertex_fields, q, "vertex")
        object.__setattr__(self, "vertex_fields", tuple(tuple(f) for f in self.vertex_fields))

    @property
    def sites(self) -> SiteSpace:
        return SiteSpace("vertex-sites", self.graph.vertex_count, self.spin_count)

    @property
    def fields(self) -> tuple[tuple, ...]:
        return self.vertex_fields

    def base_weight(self, config):
        return careful_product(
            self.edge_matrices[e][config[u]][config[v]]
            for e, (u, v) in enumerate(self.graph.edges)
        )

    def weight(self, config):
        base = self.base_weight(config)
        if base == 0:
            return 0
        return base * careful_product(
            self.vertex_fields[v][config[v]]
            for v in range(len(config))
            if config[v] != SPECIAL_SPIN
        )

    def local_weights(self, config, site: int) -> list:
        out = []
        for k in range(self.spin_count):
            w = self.vertex_fields[site][k]
            for e in self.graph.incident[site]:
                u, v = self.graph.edges[e]
                w = w * (
                    self.edge_matrices[e][k][config[v]]
                    if u == site
                    else self.edge_matrices[e][config[u]][k]
                )
                if w == 0:
                    break
            out.append(w)
        return out


@dataclass(frozen=True)
class TensorNetworkModel:
    """Edge-spin tensor network: weight = prod_v f_v(spins of incident edges) * fields.

    Each vertex tensor is stored flat, row-major over the incident edges in
    incident-list order, length spin_count**degree(v).
    """

    graph: Graph
    spin_count: int
    vertex_tensors: tuple[tuple, ...]
    edge_fields: tuple[tuple, ...]

    def __post_init__(self):
        g, q = self.graph, self.spin_count
        if g.edge_count == 0:
            raise ValidationError("edge-site model needs at least one edge")
        if q < 2:
            raise ValidationError("spin_count must be at least 2")
        if len(self.vertex_tensors) != g.vertex_count:
            raise ValidationError("one tensor per vertex required")
        tens = []
        for v, t in enumerate(self.vertex_tensors):
            want = q ** g.degree(v)
            if len(t) != want:
                raise ValidationError(f"vertex {v}: tensor must have {want} entries")
            if any(x < 0 for x in t):
                raise ValidationError(f"vertex {v}: negative tensor entry")
            if g.degree(v) == 0 and t[0] == 0:
                raise ValidationError(f"isolated vertex {v} has zero tensor weight")
            tens.append(tuple(t))
        object.__setattr__(self, "vertex_tensors", tuple(tens))
        if len(self.edge_fields) != g.edge_count:
            raise ValidationError("one field tuple per edge required")
        _check_fields(self.edge_fields, q, "edge")
        object.__setattr__(self, "edge_fields", tuple(tuple(f) for f in self.edge_fields))

    @property
    def sites(self) -> SiteSpace:
        return SiteSpace("edge-sites", self.graph.edge_count, self.spin_count)

    @property
    def fields(self) -> tuple[tuple, ...]:
        return self.edge_fields

    def _tensor_value(self, v: int, config):
        idx = 0
        for e in self.graph.incident[v]:
            idx = idx * self.spin_count + config[e]
        return self.vertex_tensors[v][idx]

    def base_weight(self, config):
        return careful_product(
            self._tensor_value(v, config) for v in range(self.graph.vertex_count)
        )

    def weight(self, config):
        base = self.base_weight(config)
        if base == 0:
            return 0
        return base * careful_product(
            self.edge_fields[e][config[e]]
            for e in range(len(config))
            if config[e] != SPECIAL_SPIN
        )

    def local_weights(self, config, site: int) -> list:
        u, v = self.graph.edges[site]
        work = list(config)
        out = []
        for k in range(self.spin_count):
            work[site] = k
            w = self.edge_fields[site][k] * self._tensor_value(u, work)
            if w != 0:
                w = w * self._tensor_value(v, work)
            out.append(w)
        return out


@dataclass(frozen=True)
class CubeFourierModel:
    """Hypercube model: weight(x) = exp(f(x)) with f given by its sparse
    multilinear expansion over subsets of coordinates; spin s maps to x = 2s-1."""

    site_count: int
    coefficients: tuple[tuple[tuple[int, ...], float], ...]

    def __post_init__(self):
        if self.site_count < 1:
            raise ValidationError("site_count must be positive")
        seen = set()
        norm = []
        for subset, val in self.coefficients:
            key = tuple(sorted(int(i) for i in subset))
            if len(set(key)) != len(key):
                raise ValidationError(f"subset {subset} repeats a coordinate")
            if key in seen:
                raise ValidationError(f"duplicate coefficient for subset {key}")
            if any(not (0 <= i < self.site_count) for i in key):
                raise ValidationError(f"subset {subset} has a coordinate out of range")
            seen.add(key)
            if val != 0:
                norm.append((key, float(val)))
        object.__setattr__(self, "coefficients", tuple(sorted(norm)))

    @property
    def sites(self) -> SiteSpace:
        return SiteSpace("cube-sites", self.site_count, 2)

    @property
    def fields(self) -> tuple[tuple, ...]:
        return tuple((1, 1) for _ in range(self.site_count))

    def exponent(self, config) -> float:
        total = 0.0
        for subset, val in self.coefficients:
            term = val
            for i in subset:
                term = -term if config[i] == 0 else term
            total += term
        return total

    def base_weight(self, config):
        return math.exp(self.exponent(config))

    weight = base_weight

    def local_weights(self, config, site: int) -> list:
        # Terms not containing the site cancel in the conditional; keep only
        # the coupling mass through this coordinate.
        delta = 0.0
        for subset, val in self.coefficients:
            if site in subset:
                term = val
                for i in subset:
                    if i != site and config[i] == 0:
                        term = -term
                delta += term
        return [math.exp(-delta), math.exp(delta)]


ModelSpec = BinarySymmetricHolant | VertexSpinModel | TensorNetworkModel | CubeFourierModel

NAMED_FAMILIES = ("matchings", "edge_cover", "even_subgraph", "two_spin_edge", "ising_line")

_FAMILY_KEYS = {
    "matchings": ("lambda",),
    "edge_cover": ("lambda", "rho"),
    "even_subgraph": ("lambda", "rho"),
    "two_spin_edge": ("beta", "gamma", "lambda"),
    "ising_line": ("beta", "lambda"),
}


def _require(cond: bool, constraint: str):
    if not cond:
        raise ValidationError(f"parameter constraint violated: {constraint}")


def build_named_model(family: str, graph: Graph, params: Mapping[str, object]) -> BinarySymmetricHolant:
    """Construct one of the named edge-spin families on the given graph."""
    if family not in _FAMILY_KEYS:
        raise ValidationError(f"unknown family {family!r}; expected one of {NAMED_FAMILIES}")
    keys = _FAMILY_KEYS[family]
    missing = [k for k in keys if k not in params]
    if missing:
        raise ValidationError(f"family {family}: missing parameter(s) {missing}")
    unknown = [k for k in params if k not in keys]
    if unknown:
        raise ValidationError(f"family {family}: unknown parameter(s) {unknown}")
    lam = params["lambda"]
    _require(lam > 0, f"{family}: lambda > 0")

    def table(f):
        return tuple(tuple(f(k, graph.degree(v)) for k in range(graph.degree(v) + 1))
                     for v in range(graph.vertex_count))

    if family == "matchings":
        funcs = table(lambda k, d: 1 if k <= 1 else 0)
    elif family == "edge_cover":
        rho = params["rho"]
        _require(0 <= rho <= 1, "edge_cover: rho in [0, 1]")
        funcs = table(lambda k, d: rho if k == 0 else 1)
    elif family == "even_subgraph":
        rho = params["rho"]
        _require(0 <= rho <= 1, "even_subgraph: rho in [0, 1]")
        funcs = table(lambda k, d: 1 if k % 2 == 0 else rho)
    else:
        beta = params["beta"]
        if family == "ising_line":
            _require(beta > 0, "ising_line: beta > 0")
            gamma = beta
        else:
            gamma = params["gamma"]
            _require(beta >= 0, "two_spin_edge: beta >= 0")
            _require(gamma > 0, "two_spin_edge: gamma > 0")
        funcs = table(lambda k, d: beta ** math.comb(k, 2) * gamma ** math.comb(d - k, 2))

    return BinarySymmetricHolant(
        graph=graph,
        vertex_functions=funcs,
        edge_fields=tuple(lam for _ in range(graph.edge_count)),
        family=family,
        params=tuple(sorted(params.items())),
    )


def weight(model: ModelSpec, config: Sequence[int]):
    """Unnormalized Gibbs weight of a configuration, field factors included."""
    cfg = tuple(config)
    if len(cfg) != model.sites.site_count:
        raise ValidationError("configuration length does not match site count")
    if any(not (0 <= s < model.sites.spin_count) for s in cfg):
        raise ValidationError("configuration has a spin out of range")
    return model.weight(cfg)


def enumerate_configurations(
    model: ModelSpec,
    pinning: Pinning = EMPTY_PINNING,
    max_configs: int = DEFAULT_CONFIG_CAP,
) -> Iterator[tuple[int, ...]]:
    """All configurations extending the pinning, in lexicographic order."""
    n, q = model.sites.site_count, model.sites.spin_count
    pinned = pinning.as_dict()
    for s in pinned:
        if not (0 <= s < n):
            raise ValidationError(f"pinned site {s} out of range")
    for k in pinned.values():
        if not (0 <= k < q):
            raise ValidationError(f"pinned spin {k} out of range")
    free = [s for s in range(n) if s not in pinned]
    if q ** len(free) > max_configs:
        raise CapExceededError(
            f"{q}^{len(free)} configurations exceed the cap of {max_configs}"
        )
    base = [pinned.get(s, 0) for s in range(n)]
    for combo in itertools.product(range(q), repeat=len(free)):
        cfg = base[:]
        for s, k in zip(free, combo):
            cfg[s] = k
        yield tuple(cfg)


def feasible_configurations(
    model: ModelSpec,
    pinning: Pinning = EMPTY_PINNING,
    max_configs: int = DEFAULT_CONFIG_CAP,
) -> list[tuple[int, ...]]:
    """Positive-weight configurations extending the pinning."""
    out = [
        cfg
        for cfg in enumerate_configurations(model, pinning, max_configs)
        if model.weight(cfg) > 0
    ]
    if not out:
        if pinning.size:
            raise ValidationError(f"infeasible pinning {pinning.as_dict()}")
        raise ValidationError("model weight is identically zero")
    return out


def is_feasible_pinning(model: ModelSpec, pinning: Pinning) -> bool:
    try:
        feasible_configurations(model, pinning)
        return True
    except ValidationError:
        return False


def enumerate_pinnings(
    model: ModelSpec,
    max_pinned: int | None = None,
    max_partial: int = DEFAULT_PINNING_CAP,
) -> Iterator[Pinning]:
    """All feasible pinnings with at most ``max_pinned`` pinned sites.

    Yields the empty pinning first, then grouped by pinned-set size with a
    deterministic order; every yielded pinning has a positive-weight
    extension by construction (pinnings are projections of feasible
    configurations).
    """
    n, q = model.sites.site_count, model.sites.spin_count
    if (q + 1) ** n > max_partial:
        raise CapExceededError(
            f"({q}+1)^{n} partial assignments exceed the cap of {max_partial}; "
            "refusing to enumerate pinnings"
        )
    if max_pinned is None:
        max_pinned = n
    feas = feasible_configurations(model)
    for size in range(0, min(max_pinned, n) + 1):
        for sites in itertools.combinations(range(n), size):
            projections = sorted({tuple(cfg[s] for s in sites) for cfg in feas})
            for proj in projections:
                yield Pinning(tuple(zip(sites, proj)))


@dataclass(frozen=True)
class FeasiblePairs:
    """Unpinned (site, spin) pairs admitting a valid extension of a pinning."""

    pairs: tuple[tuple[int, int], ...]
    nonzero: tuple[tuple[int, int], ...]  # the subset with spin != 0


def feasible_pairs(model: ModelSpec, pinning: Pinning = EMPTY_PINNING) -> FeasiblePairs:
    feas = feasible_configurations(model, pinning)
    pinned = set(pinning.sites)
    seen: set[tuple[int, int]] = set()
    for cfg in feas:
        for s, k in enumerate(cfg):
            if s not in pinned:
                seen.add((s, k))
    pairs = tuple(sorted(seen))
    return FeasiblePairs(pairs, tuple(p for p in pairs if p[1] != SPECIAL_SPIN))
