"""Brute-force exact engine for desk-scale models.

Everything here enumerates configurations, so all functions respect the
configuration cap.  Arithmetic stays exact (ints / Fractions) whenever the
model parameters are exact and the instance is small; otherwise float64
vectorized paths are used.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache

import numpy as np

from .errors import CapExceededError, NonConvergenceError, ValidationError
from .models import (
    DEFAULT_CONFIG_CAP,
    EMPTY_PINNING,
    SPECIAL_SPIN,
    BinarySymmetricHolant,
    CubeFourierModel,
    ModelSpec,
    Pinning,
    TensorNetworkModel,
    VertexSpinModel,
    enumerate_pinnings,
)
from .models import feasible_pairs as _feasible_pairs
from .multiaffine import MultiAffinePolynomial

_EXACT_SIZE_CAP = 1 << 14
_ZERO_THRESHOLD = 1e-12


def _is_exact_number(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def model_is_exact(model: ModelSpec) -> bool:
    """True when every model parameter is an int or Fraction."""
    if isinstance(model, BinarySymmetricHolant):
        nums = [x for f in model.vertex_functions for x in f] + list(model.edge_fields)
    elif isinstance(model, VertexSpinModel):
        nums = [x for A in model.edge_matrices for row in A for x in row]
        nums += [x for f in model.vertex_fields for x in f]
    elif isinstance(model, TensorNetworkModel):
        nums = [x for t in model.vertex_tensors for x in t]
        nums += [x for f in model.edge_fields for x in f]
    else:
        return False  # cube models weight through exp()
    return all(_is_exact_number(x) for x in nums)


@lru_cache(maxsize=64)
def _model_ensemble(model: ModelSpec) -> tuple[np.ndarray, np.ndarray]:
    """All configurations (lexicographic) and their float64 weights."""
    n, q = model.sites.site_count, model.sites.spin_count
    if q**n > DEFAULT_CONFIG_CAP:
        raise CapExceededError(
            f"{q}^{n} configurations exceed the cap of {DEFAULT_CONFIG_CAP}"
        )
    idx = np.unravel_index(np.arange(q**n), (q,) * n)
    C = np.stack(idx, axis=1).astype(np.int8)
    W = np.ones(len(C), dtype=np.float64)
    if isinstance(model, BinarySymmetricHolant):
        sel = C == 1
        for v in range(model.graph.vertex_count):
            inc = list(model.graph.incident[v])
            counts = sel[:, inc].sum(axis=1) if inc else np.zeros(len(C), dtype=int)
            W *= np.asarray(model.vertex_functions[v], dtype=np.float64)[counts]
        lam = np.asarray(model.edge_fields, dtype=np.float64)
        W *= np.where(sel, lam[None, :], 1.0).prod(axis=1)
    elif isinstance(model, VertexSpinModel):
        for e, (u, v) in enumerate(model.graph.edges):
            A = np.asarray(model.edge_matrices[e], dtype=np.float64)
            W *= A[C[:, u], C[:, v]]
        for v in range(model.graph.vertex_count):
            W *= np.asarray(model.vertex_fields[v], dtype=np.float64)[C[:, v]]
    elif isinstance(model, TensorNetworkModel):
        for v in range(model.graph.vertex_count):
            pos = np.zeros(len(C), dtype=np.int64)
            for e in model.graph.incident[v]:
                pos = pos * q + C[:, e]
            W *= np.asarray(model.vertex_tensors[v], dtype=np.float64)[pos]
        for e in range(model.graph.edge_count):
            W *= np.asarray(model.edge_fields[e], dtype=np.float64)[C[:, e]]
    elif isinstance(model, CubeFourierModel):
        chi = (2.0 * C - 1.0).astype(np.float64)
        expo = np.zeros(len(C))
        for subset, val in model.coefficients:
            term = np.full(len(C), val)
            for i in subset:
                term *= chi[:, i]
            expo += term
        W = np.exp(expo)
    else:
        raise ValidationError(f"unsupported model type {type(model).__name__}")
    C.setflags(write=False)
    W.setflags(write=False)
    return C, W


def _pinning_mask(C: np.ndarray, pinning: Pinning) -> np.ndarray:
    mask = np.ones(len(C), dtype=bool)
    for s, k in pinning.assignments:
        if not (0 <= s < C.shape[1]):
            raise ValidationError(f"pinned site {s} out of range")
        mask &= C[:, s] == k
    return mask


@dataclass(frozen=True)
class GibbsTable:
    """Support, weights and probabilities of a (conditional) Gibbs measure."""

    configs: tuple[tuple[int, ...], ...]
    weights: tuple
    probabilities: tuple
    partition_value: object
    pinning: Pinning

    def probability_of(self, config) -> object:
        cfg = tuple(config)
        for c, p in zip(self.configs, self.probabilities):
            if c == cfg:
                return p
        return 0

    def as_dict(self) -> dict[tuple[int, ...], object]:
        return dict(zip(self.configs, self.probabilities))


def _exact_table(model, configs):
    return [model.weight(cfg) for cfg in configs]


def partition_function(model: ModelSpec, pinning: Pinning = EMPTY_PINNING):
    """Sum of configuration weights extending the pinning (0 if infeasible)."""
    C, W = _model_ensemble(model)
    mask = _pinning_mask(C, pinning)
    feas = mask & (W > 0)
    count = int(feas.sum())
    if model_is_exact(model) and count <= _EXACT_SIZE_CAP:
        configs = [tuple(int(x) for x in row) for row in C[feas]]
        total = 0
        for w in _exact_table(model, configs):
            total = total + w
        return total
    return float(W[feas].sum())


def gibbs_table(model: ModelSpec, pinning: Pinning = EMPTY_PINNING) -> GibbsTable:
    """The conditional Gibbs distribution given the pinning, as an explicit table."""
    C, W = _model_ensemble(model)
    mask = _pinning_mask(C, pinning) & (W > 0)
    count = int(mask.sum())
    if count == 0:
        if pinning.size:
            raise ValidationError(f"infeasible pinning {pinning.as_dict()}")
        raise ValidationError("model weight is identically zero")
    configs = tuple(tuple(int(x) for x in row) for row in C[mask])
    if model_is_exact(model) and count <= _EXACT_SIZE_CAP:
        weights = tuple(_exact_table(model, configs))
        Z = 0
        for w in weights:
            Z = Z + w
        probs = tuple(Fraction(w) / Z for w in weights)
    else:
        warr = W[mask]
        Z = float(warr.sum())
        weights = tuple(float(w) for w in warr)
        probs = tuple(float(w / Z) for w in warr)
    return GibbsTable(configs, weights, probs, Z, pinning)


def marginal(model: ModelSpec, pinning: Pinning, site: int, spin: int):
    """mu^pinning(sigma_site = spin)."""
    n, q = model.sites.site_count, model.sites.spin_count
    if not (0 <= site < n):
        raise ValidationError(f"site {site} out of range")
    if not (0 <= spin < q):
        raise ValidationError(f"spin {spin} out of range")
    table = gibbs_table(model, pinning)
    total = 0
    for cfg, p in zip(table.configs, table.probabilities):
        if cfg[site] == spin:
            total = total + p
    return total


@dataclass(frozen=True)
class InfluenceMatrix:
    """Pairwise influences on the feasible (site, spin) pairs of a pinning.

    entry[(u,j)][(v,k)] = mu(sigma_v=k | sigma_u=j) - mu(sigma_v=k), and 0
    whenever u == v.
    """

    pairs: tuple[tuple[int, int], ...]
    entries: tuple[tuple, ...]
    pinning: Pinning

    @cached_property
    def array(self) -> np.ndarray:
        n = len(self.entries)
        a = np.array(
            [[float(x) for x in row] for row in self.entries], dtype=np.float64
        ).reshape(n, n)
        a.setflags(write=False)
        return a

    @property
    def size(self) -> int:
        return len(self.pairs)

    def entry(self, pair_from: tuple[int, int], pair_to: tuple[int, int]):
        i = self.pairs.index(pair_from)
        j = self.pairs.index(pair_to)
        return self.entries[i][j]


def influence_matrix(
    model: ModelSpec, pinning: Pinning = EMPTY_PINNING, *, exact: bool | None = None
) -> InfluenceMatrix:
    """Influence matrix of the conditional measure given the pinning."""
    pairs = _feasible_pairs(model, pinning).pairs
    if not pairs:
        return InfluenceMatrix((), (), pinning)
    C, W = _model_ensemble(model)
    mask = _pinning_mask(C, pinning) & (W > 0)
    count = int(mask.sum())
    if exact is None:
        exact = model_is_exact(model) and count <= 4096 and len(pairs) <= 128
    sites = np.array([s for s, _ in pairs])
    spins = np.array([k for _, k in pairs])
    if exact:
        configs = [tuple(int(x) for x in row) for row in C[mask]]
        weights = _exact_table(model, configs)
        Z = 0
        for w in weights:
            Z = Z + w
        marg = []
        for s, k in pairs:
            tot = 0
            for cfg, w in zip(configs, weights):
                if cfg[s] == k:
                    tot = tot + w
            marg.append(Fraction(tot) / Z if not isinstance(tot, float) else tot / Z)
        rows = []
        for i, (u, j) in enumerate(pairs):
            row = []
            for t, (v, k) in enumerate(pairs):
                if u == v:
                    row.append(0)
                    continue
                joint = 0
                for cfg, w in zip(configs, weights):
                    if cfg[u] == j and cfg[v] == k:
                        joint = joint + w
                cond = (Fraction(joint) if not isinstance(joint, float) else joint) / (marg[i] * Z)
                row.append(cond - marg[t])
            rows.append(tuple(row))
        return InfluenceMatrix(pairs, tuple(rows), pinning)
    Csub = C[mask]
    w = W[mask]
    Z = w.sum()
    X = (Csub[:, sites] == spins[None, :]).astype(np.float64)
    wX = w @ X
    joint = X.T @ (w[:, None] * X)
    cond = joint / wX[:, None]
    mu = wX / Z
    psi = cond - mu[None, :]
    same_site = sites[:, None] == sites[None, :]
    psi[same_site] = 0.0
    entries = tuple(tuple(float(x) for x in row) for row in psi)
    return InfluenceMatrix(pairs, entries, pinning)


@dataclass(frozen=True)
class EigmaxResult:
    value: float
    inf_norm: float
    iterations: int


def eigmax(
    matrix, *, rayleigh_tol: float = 1e-12, residual_tol: float = 1e-9,
    max_iterations: int = 100_000,
) -> EigmaxResult:
    """Largest eigenvalue of a real matrix with real spectrum.

    Shift-and-power: iterate on M + ||M||_inf * I, whose spectrum is the
    shifted one and nonnegative, so the largest eigenvalue of M dominates.
    Deterministic start vector; converges when the Rayleigh quotient settles
    and the eigen-residual is small.  When the quotient settles but the
    residual will not drop -- nearly tied leading eigenvalues -- the iteration
    widens into an orthonormal block large enough to hold the tied cluster
    and converges the block's largest Ritz value instead.
    """
    M = np.asarray(matrix, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValidationError("eigmax needs a square matrix")
    if max_iterations < 1:
        raise ValidationError("max_iterations must be positive")
    n = M.shape[0]
    if n == 0:
        return EigmaxResult(0.0, 0.0, 0)
    s = float(np.abs(M).sum(axis=1).max())
    if s == 0.0:
        return EigmaxResult(0.0, 0.0, 0)
    A = M + s * np.eye(n)
    rng = np.random.default_rng(0)
    v = np.ones(n) + 0.01 * rng.standard_normal(n)
    v /= np.linalg.norm(v)
    V = None  # orthonormal block, once the iteration has widened
    width = 1
    phase_start = 0  # iteration at which the current width began
    rho_prev = None
    for it in range(1, max_iterations + 1):
        if V is None:
            u = A @ v
            norm_u = np.linalg.norm(u)
            if norm_u < 1e-300:
                # v was (numerically) in the kernel of A: eigenvalue -s attained.
                return EigmaxResult(-s, s, it)
            v = u / norm_u
            rho = float(v @ (A @ v))
            y = v
        else:
            V = np.linalg.qr(A @ V)[0]
            ritz_vals, ritz_vecs = np.linalg.eig(V.T @ (A @ V))
            top = int(np.argmax(ritz_vals.real))
            rho = float(ritz_vals.real[top])
            y = V @ np.real(ritz_vecs[:, top])
            y /= max(float(np.linalg.norm(y)), 1e-300)
        if rho_prev is not None and abs(rho - rho_prev) <= rayleigh_tol * max(1.0, abs(rho)):
            residual = float(np.max(np.abs(A @ y - rho * y)))
            if residual <= residual_tol * max(1.0, s):
                return EigmaxResult(rho - s, s, it)
        rho_prev = rho
        if width < min(n, 16) and it - phase_start >= 400 * width:
            # nearly tied leading eigenvalues starve the single-vector rate;
            # widen to a subspace that can hold the whole tied cluster
            base = v[:, None] if V is None else V
            width = min(n, 2 * width)
            extra = rng.standard_normal((n, width - base.shape[1]))
            V = np.linalg.qr(np.hstack([base, extra]))[0]
            phase_start = it
            rho_prev = None
    residual = float(np.max(np.abs(A @ y - rho * y)))
    raise NonConvergenceError(
        f"power iteration did not converge in {max_iterations} iterations", residual=residual
    )


def influence_eigmax(model: ModelSpec, pinning: Pinning = EMPTY_PINNING) -> EigmaxResult:
    return eigmax(influence_matrix(model, pinning, exact=False).array)


def marginal_bound(model: ModelSpec, max_pinned: int | None = None):
    """min over feasible pinnings tau and pairs (v,k) of mu^tau(sigma_v = k)."""
    best = None
    for pin in enumerate_pinnings(model, max_pinned=max_pinned):
        table = gibbs_table(model, pin)
        pinned = set(pin.sites)
        sums: dict[tuple[int, int], object] = {}
        for cfg, p in zip(table.configs, table.probabilities):
            for s, k in enumerate(cfg):
                if s not in pinned:
                    sums[(s, k)] = sums.get((s, k), 0) + p
        for val in sums.values():
            if best is None or val < best:
                best = val
    if best is None:
        raise ValidationError("model has no unpinned feasible pair")
    return best


def to_multiaffine(
    model: ModelSpec,
    pinning: Pinning = EMPTY_PINNING,
    max_configs: int = DEFAULT_CONFIG_CAP,
) -> MultiAffinePolynomial:
    """Partition function as a multi-affine polynomial in one variable per
    unpinned (site, nonzero spin) pair; coefficients are base weights.

    Pinned sites contribute their local weight but no variable, so a fully
    pinned model maps to a constant.
    """
    C, W = _model_ensemble(model)
    mask = _pinning_mask(C, pinning)
    configs = [tuple(int(x) for x in row) for row in C[mask]]
    if len(configs) > max_configs:
        raise CapExceededError(f"{len(configs)} configurations exceed the cap of {max_configs}")
    pinned = set(pinning.sites)
    terms: dict[frozenset, object] = {}
    for cfg in configs:
        w = model.base_weight(cfg)
        if w == 0:
            continue
        mono = frozenset(
            (s, k) for s, k in enumerate(cfg) if k != SPECIAL_SPIN and s not in pinned
        )
        terms[mono] = terms.get(mono, 0) + w
    return MultiAffinePolynomial(tuple(terms.items()))


def pin_polynomial(
    poly: MultiAffinePolynomial, site: int, spin: int, spin_count: int
) -> MultiAffinePolynomial:
    """Apply the transform that corresponds to pinning a site of the model
    whose partition polynomial this is: spin 0 specializes every variable of
    the site to zero; a nonzero spin differentiates in its variable and
    specializes the siblings."""
    if spin == SPECIAL_SPIN:
        out = poly
        for k in range(1, spin_count):
            out = out.specialize_zero((site, k))
        return out
    out = poly.derivative((site, spin))
    for k in range(1, spin_count):
        if k != spin:
            out = out.specialize_zero((site, k))
    return out


def uniform_field_coefficients(poly: MultiAffinePolynomial) -> list:
    """Coefficients (ascending) of p(z) = poly with every variable set to z."""
    if poly.is_zero():
        return [0]
    degree = max(len(m) for m, _ in poly.terms)
    coeffs = [0] * (degree + 1)
    for mono, c in poly.terms:
        coeffs[len(mono)] = coeffs[len(mono)] + c
    return coeffs


@dataclass(frozen=True)
class ZeroScanReport:
    n_samples: int
    seed: int
    truncation_radius: float
    min_modulus: float
    witness: tuple  # ((variable, complex value), ...) at the argmin point
    zero_found: bool
    polished: bool
    threshold: float = _ZERO_THRESHOLD

    def witness_dict(self) -> dict:
        return dict(self.witness)


def _region_samples(region, count: int, rng, truncation_radius: float) -> np.ndarray:
    """Vectorized rejection sampling of ``count`` points from a region."""
    x0, x1, y0, y1 = region.sample_box(truncation_radius)
    chunks: list[np.ndarray] = []
    got = 0
    attempts = 0
    max_attempts = max(10**6, 200 * count)
    while got < count:
        if attempts >= max_attempts:
            raise NonConvergenceError(
                f"rejection sampling accepted only {got}/{count} points "
                f"after {attempts} proposals"
            )
        batch = min(max(4 * (count - got), 1024), 1 << 18)
        attempts += batch
        zs = rng.uniform(x0, x1, size=batch) + 1j * rng.uniform(y0, y1, size=batch)
        keep = zs[region.contains_many(zs)]
        if len(keep):
            chunks.append(keep[: count - got])
            got += len(chunks[-1])
    return np.concatenate(chunks)


def _evaluate_terms(terms, points: np.ndarray, index: dict) -> np.ndarray:
    """Evaluate a multi-affine polynomial at every row of ``points``."""
    values = np.zeros(points.shape[0], dtype=np.complex128)
    for mono, coeff in terms:
        term = np.full(points.shape[0], complex(coeff))
        for var in mono:
            term = term * points[:, index[var]]
        values += term
    return values


def zero_scan(
    poly: MultiAffinePolynomial,
    regions,
    *,
    n_samples: int,
    seed: int,
    truncation_radius: float = 1e6,
) -> ZeroScanReport:
    """Randomized falsification probe for zero-freeness: evaluate the
    polynomial at ``n_samples`` points with every coordinate drawn
    independently from its region, then sweep each coordinate for an exact
    in-region root (the polynomial is linear in each variable, so an accepted
    sweep point is a true zero — the probe cannot report a false positive).
    """
    if n_samples < 1:
        raise ValidationError("n_samples must be positive")
    if not (truncation_radius > 0 and np.isfinite(truncation_radius)):
        raise ValidationError("truncation_radius must be positive and finite")
    variables = poly.variables
    region_of = regions if hasattr(regions, "get") else {v: regions for v in variables}
    missing = [v for v in variables if region_of.get(v) is None]
    if missing:
        raise ValidationError(f"no region given for variable(s) {missing}")
    rng = np.random.default_rng(seed)
    if not variables:
        value = abs(complex(poly.evaluate({})))
        return ZeroScanReport(
            n_samples, seed, float(truncation_radius), value, (), value < _ZERO_THRESHOLD, False
        )
    cols = [
        _region_samples(region_of[v], n_samples, rng, truncation_radius)
        for v in variables
    ]
    points = np.stack(cols, axis=1)
    index = {v: i for i, v in enumerate(variables)}
    values = _evaluate_terms(poly.terms, points, index)
    mods = np.abs(values)
    best = int(np.argmin(mods))
    min_mod = float(mods[best])
    witness_row = points[best]
    polished = False
    # Coordinate-root sweep: with the other coordinates held at their sampled
    # values, the polynomial is A + B*z_i; accept -A/B only if its region
    # contains it, in which case the assembled point is an exact zero.
    for i, var in enumerate(variables):
        saved = points[:, i].copy()
        points[:, i] = 0.0
        a_vals = _evaluate_terms(poly.terms, points, index)
        points[:, i] = 1.0
        b_vals = _evaluate_terms(poly.terms, points, index) - a_vals
        points[:, i] = saved
        with np.errstate(divide="ignore", invalid="ignore"):
            roots = np.where(b_vals != 0, -a_vals / b_vals, np.inf)
        ok = np.isfinite(roots.real) & np.isfinite(roots.imag)
        if not ok.any():
            continue
        inside = np.zeros(len(roots), dtype=bool)
        inside[ok] = region_of[var].contains_many(roots[ok])
        hits = np.flatnonzero(inside)
        if len(hits) == 0:
            continue
        s = int(hits[0])
        candidate = points[s].copy()
        candidate[i] = roots[s]
        mod = abs(complex(_evaluate_terms(poly.terms, candidate[None, :], index)[0]))
        if mod < min_mod:
            min_mod = mod
            witness_row = candidate
            polished = True
        if mod < _ZERO_THRESHOLD:
            break
    witness = tuple((v, complex(witness_row[index[v]])) for v in variables)
    return ZeroScanReport(
        n_samples=n_samples,
        seed=seed,
        truncation_radius=float(truncation_radius),
        min_modulus=min_mod,
        witness=witness,
        zero_found=min_mod < _ZERO_THRESHOLD,
        polished=polished,
    )


def partition_zero_scan(
    model: ModelSpec,
    region,
    pinning: Pinning = EMPTY_PINNING,
    *,
    n_samples: int,
    seed: int,
    truncation_radius: float = 1e6,
) -> ZeroScanReport:
    """Zero scan of the conditional partition function with one independent
    complex field per unpinned (site, nonzero spin) pair, all drawn from the
    same region (pinned sites keep no variable; their real field is a positive
    constant factor and cannot create zeros)."""
    poly = to_multiaffine(model, pinning)
    return zero_scan(poly, region, n_samples=n_samples, seed=seed,
                     truncation_radius=truncation_radius)
