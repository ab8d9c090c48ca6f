"""Text model files.

Format: a header line naming the kind (``holant``, ``vertexspin``, ``tensor``
or ``cube``), then for graph kinds a line ``n m`` followed by m edge lines
``u v`` (0-indexed), then ``key=value`` parameter lines and optional sections.
Values parse exactly when written as integers or fractions (``1/2``), so
models built from files can stay in rational arithmetic.

Sections by kind:
  holant:      ``field EDGE = VALUE`` (per-edge activity override)
  vertexspin:  ``matrix EDGE = v11 .. vqq`` (row-major; ``matrix * =`` sets a
               default), ``field VERTEX SPIN = VALUE``
  tensor:      ``tensor VERTEX = entries (spin-major over incident edges)``,
               ``field EDGE SPIN = VALUE``
  cube:        ``coeff I J ... = VALUE`` (Fourier coefficient of the subset;
               ``coeff = VALUE`` is the empty set)

``#`` starts a comment; blank lines are ignored; unknown keys are rejected.
"""

from __future__ import annotations

import dataclasses
import re
from fractions import Fraction

from .errors import ParseError
from .graphs import Graph
from .models import (
    _FAMILY_KEYS,
    CubeFourierModel,
    ModelSpec,
    TensorNetworkModel,
    VertexSpinModel,
    build_named_model,
)

_KINDS = ("holant", "vertexspin", "tensor", "cube")
_SECTIONS = {
    "holant": ("field",),
    "vertexspin": ("matrix", "field"),
    "tensor": ("tensor", "field"),
    "cube": ("coeff",),
}
_KEYS = {
    "vertexspin": ("q",),
    "tensor": ("q",),
    "cube": ("n",),
}
_KV_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(\S+)$")


def _number(token: str, line: int, path: str):
    try:
        if "/" in token:
            return Fraction(token)
        if re.fullmatch(r"[+-]?\d+", token):
            return int(token)
        return float(token)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad number {token!r}", line=line, path=path) from None


def _int(token: str, line: int, path: str) -> int:
    if not re.fullmatch(r"[+-]?\d+", token):
        raise ParseError(f"expected an integer, got {token!r}", line=line, path=path)
    return int(token)


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            yield lineno, body.split()


def parse_model(text: str, path: str = "<string>") -> ModelSpec:
    lines = list(_content_lines(text))
    if not lines:
        raise ParseError("empty model file", path=path)
    pos = 0

    def take():
        nonlocal pos
        if pos >= len(lines):
            raise ParseError("unexpected end of file", line=lines[-1][0], path=path)
        item = lines[pos]
        pos += 1
        return item

    line, tokens = take()
    if len(tokens) != 1 or tokens[0] not in _KINDS:
        raise ParseError(
            f"header must be one of {'|'.join(_KINDS)}", line=line, path=path
        )
    kind = tokens[0]

    graph = None
    if kind != "cube":
        line, tokens = take()
        if len(tokens) != 2:
            raise ParseError("expected 'n m' (vertex and edge counts)", line=line, path=path)
        n, m = (_int(t, line, path) for t in tokens)
        edges = []
        for _ in range(m):
            line, tokens = take()
            if len(tokens) != 2:
                raise ParseError("expected an edge line 'u v'", line=line, path=path)
            edges.append(tuple(_int(t, line, path) for t in tokens))
        try:
            graph = Graph(n, tuple(edges))
        except Exception as exc:
            raise ParseError(str(exc), line=line, path=path) from exc

    keys: dict[str, object] = {}
    key_lines: dict[str, int] = {}
    sections: list[tuple[int, str, list[int], list, bool]] = []
    while pos < len(lines):
        line, tokens = take()
        if tokens[0] in _SECTIONS[kind]:
            if "=" not in tokens:
                raise ParseError(
                    f"section line needs a standalone '=': {' '.join(tokens)!r}",
                    line=line, path=path,
                )
            eq = tokens.index("=")
            star = tokens[1:eq] == ["*"]
            indices = [] if star else [_int(t, line, path) for t in tokens[1:eq]]
            values = [_number(t, line, path) for t in tokens[eq + 1:]]
            if not values:
                raise ParseError("section line has no values", line=line, path=path)
            sections.append((line, tokens[0], indices, values, star))
            continue
        joined = " ".join(tokens)
        m_kv = _KV_RE.match(joined)
        if not m_kv:
            raise ParseError(
                f"expected 'key=value' or a section line, got {joined!r}",
                line=line, path=path,
            )
        key, value = m_kv.group(1), m_kv.group(2)
        allowed = _KEYS.get(kind)
        if allowed is not None and key not in allowed:
            raise ParseError(f"unknown key {key!r}", line=line, path=path)
        if kind == "holant" and key != "family" and key not in _ALL_FAMILY_KEYS:
            raise ParseError(f"unknown key {key!r}", line=line, path=path)
        if key in keys:
            raise ParseError(f"duplicate key {key!r}", line=line, path=path)
        keys[key] = value if key == "family" else _number(value, line, path)
        key_lines[key] = line

    build = {
        "holant": _build_holant,
        "vertexspin": _build_vertexspin,
        "tensor": _build_tensor,
        "cube": _build_cube,
    }[kind]
    return build(graph, keys, key_lines, sections, path)


_ALL_FAMILY_KEYS = sorted({k for ks in _FAMILY_KEYS.values() for k in ks})


def _require_key(keys, key_lines, name: str, path: str):
    if name not in keys:
        raise ParseError(f"missing required key {name!r}", path=path)
    return keys[name]


def _build_holant(graph, keys, key_lines, sections, path):
    family = _require_key(keys, key_lines, "family", path)
    if family not in _FAMILY_KEYS:
        raise ParseError(
            f"unknown family {family!r}", line=key_lines["family"], path=path
        )
    params = {k: v for k, v in keys.items() if k != "family"}
    for k in params:
        if k not in _FAMILY_KEYS[family]:
            raise ParseError(
                f"unknown key {k!r} for family {family}", line=key_lines[k], path=path
            )
    model = build_named_model(family, graph, params)
    overrides = {}
    for line, word, indices, values, star in sections:
        if star or len(indices) != 1 or len(values) != 1:
            raise ParseError("expected 'field EDGE = VALUE'", line=line, path=path)
        (e,), (val,) = indices, values
        if not 0 <= e < graph.edge_count:
            raise ParseError(f"edge index {e} out of range", line=line, path=path)
        overrides[e] = val
    if overrides:
        fields = tuple(
            overrides.get(e, lam) for e, lam in enumerate(model.edge_fields)
        )
        model = dataclasses.replace(model, edge_fields=fields)
    return model


def _mutable_fields(count: int, q: int):
    return [[1] + [1] * (q - 1) for _ in range(count)]


def _apply_field_override(fields, indices, values, line, path, what: str):
    if len(indices) != 2 or len(values) != 1:
        raise ParseError(f"expected 'field {what} SPIN = VALUE'", line=line, path=path)
    site, spin = indices
    if not 0 <= site < len(fields):
        raise ParseError(f"{what.lower()} index {site} out of range", line=line, path=path)
    if not 0 <= spin < len(fields[site]):
        raise ParseError(f"spin {spin} out of range", line=line, path=path)
    fields[site][spin] = values[0]


def _build_vertexspin(graph, keys, key_lines, sections, path):
    q = _require_key(keys, key_lines, "q", path)
    if not isinstance(q, int) or q < 2:
        raise ParseError("q must be an integer >= 2", line=key_lines.get("q"), path=path)
    matrices: dict[int, tuple] = {}
    default = None
    fields = _mutable_fields(graph.vertex_count, q)
    for line, word, indices, values, star in sections:
        if word == "matrix":
            if len(values) != q * q:
                raise ParseError(
                    f"matrix needs {q * q} entries, got {len(values)}", line=line, path=path
                )
            rows = tuple(tuple(values[r * q:(r + 1) * q]) for r in range(q))
            if star:
                default = rows
            else:
                if len(indices) != 1:
                    raise ParseError("expected 'matrix EDGE = ...'", line=line, path=path)
                if not 0 <= indices[0] < graph.edge_count:
                    raise ParseError(
                        f"edge index {indices[0]} out of range", line=line, path=path
                    )
                matrices[indices[0]] = rows
        else:
            _apply_field_override(fields, indices, values, line, path, "VERTEX")
    missing = [e for e in range(graph.edge_count) if e not in matrices]
    if missing and default is None:
        raise ParseError(f"no matrix for edge(s) {missing}", path=path)
    full = tuple(matrices.get(e, default) for e in range(graph.edge_count))
    return VertexSpinModel(graph, q, full, tuple(tuple(f) for f in fields))


def _build_tensor(graph, keys, key_lines, sections, path):
    q = _require_key(keys, key_lines, "q", path)
    if not isinstance(q, int) or q < 2:
        raise ParseError("q must be an integer >= 2", line=key_lines.get("q"), path=path)
    tensors: dict[int, tuple] = {}
    fields = _mutable_fields(graph.edge_count, q)
    for line, word, indices, values, star in sections:
        if word == "tensor":
            if star or len(indices) != 1:
                raise ParseError("expected 'tensor VERTEX = ...'", line=line, path=path)
            v = indices[0]
            if not 0 <= v < graph.vertex_count:
                raise ParseError(f"vertex index {v} out of range", line=line, path=path)
            want = q ** graph.degree(v)
            if len(values) != want:
                raise ParseError(
                    f"tensor for vertex {v} needs {want} entries, got {len(values)}",
                    line=line, path=path,
                )
            tensors[v] = tuple(values)
        else:
            _apply_field_override(fields, indices, values, line, path, "EDGE")
    missing = [v for v in range(graph.vertex_count) if v not in tensors]
    if missing:
        raise ParseError(f"no tensor for vertex(es) {missing}", path=path)
    full = tuple(tensors[v] for v in range(graph.vertex_count))
    return TensorNetworkModel(graph, q, full, tuple(tuple(f) for f in fields))


def _build_cube(graph, keys, key_lines, sections, path):
    n = _require_key(keys, key_lines, "n", path)
    if not isinstance(n, int) or n < 1:
        raise ParseError("n must be a positive integer", line=key_lines.get("n"), path=path)
    coeffs = {}
    for line, word, indices, values, star in sections:
        if star or len(values) != 1:
            raise ParseError("expected 'coeff I J ... = VALUE'", line=line, path=path)
        subset = tuple(sorted(indices))
        if len(set(subset)) != len(subset):
            raise ParseError(f"subset {indices} repeats a coordinate", line=line, path=path)
        if subset in coeffs:
            raise ParseError(f"duplicate coefficient for subset {subset}", line=line, path=path)
        if any(not 0 <= i < n for i in subset):
            raise ParseError(f"subset {indices} out of range for n={n}", line=line, path=path)
        coeffs[subset] = float(values[0])
    return CubeFourierModel(n, tuple(sorted(coeffs.items())))


def load_model(path: str) -> ModelSpec:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read model file: {exc}", path=path) from exc
    return parse_model(text, path=path)
