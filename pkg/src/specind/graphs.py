"""Small undirected graphs with explicit incidence structure."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ValidationError


@dataclass(frozen=True)
class Graph:
    """An undirected simple graph on vertices 0..vertex_count-1.

    Edges are stored as sorted (u, v) pairs in a fixed order; the edge index
    in this tuple is the edge's site id for edge-site models.
    """

    vertex_count: int
    edges: tuple[tuple[int, int], ...]
    incident: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)
    max_degree: int = field(init=False, compare=False)

    def __post_init__(self):
        if self.vertex_count < 1:
            raise ValidationError("graph needs at least one vertex")
        norm = []
        seen = set()
        for u, v in self.edges:
            if u == v:
                raise ValidationError(f"self-loop at vertex {u}")
            if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                raise ValidationError(f"edge ({u},{v}) has an endpoint out of range")
            e = (min(u, v), max(u, v))
            if e in seen:
                raise ValidationError(f"duplicate edge {e}")
            seen.add(e)
            norm.append(e)
        object.__setattr__(self, "edges", tuple(norm))
        inc: list[list[int]] = [[] for _ in range(self.vertex_count)]
        for i, (u, v) in enumerate(self.edges):
            inc[u].append(i)
            inc[v].append(i)
        object.__setattr__(self, "incident", tuple(tuple(x) for x in inc))
        object.__setattr__(self, "max_degree", max((len(x) for x in inc), default=0))

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return len(self.incident[v])


def path_graph(n: int) -> Graph:
    """Path on n vertices: 0-1-2-...-(n-1)."""
    return Graph(n, tuple((i, i + 1) for i in range(n - 1)))


def cycle_graph(n: int) -> Graph:
    """Cycle on n >= 3 vertices."""
    if n < 3:
        raise ValidationError("cycle needs at least 3 vertices")
    return Graph(n, tuple((i, (i + 1) % n) for i in range(n)))


def complete_graph(n: int) -> Graph:
    return Graph(n, tuple((i, j) for i in range(n) for j in range(i + 1, n)))


def star_graph(leaves: int) -> Graph:
    """Star with center 0 and the given number of leaves."""
    return Graph(leaves + 1, tuple((0, i + 1) for i in range(leaves)))
