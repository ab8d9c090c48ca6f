"""Single-site heat-bath (Glauber) dynamics over any model, with exact
mixing diagnostics at desk scale.

Randomness is counter-based: each step of a chain draws from a Philox
generator keyed by the chain seed with the step index as counter, so traces
are reproducible and chains can be evaluated out of order.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from .errors import CapExceededError, InternalError, ValidationError
from .exact import gibbs_table
from .models import EMPTY_PINNING, ModelSpec, Pinning, enumerate_pinnings

TRANSITION_STATE_CAP = 4096


@dataclass(frozen=True)
class ChainState:
    config: tuple[int, ...]
    step_count: int
    seed: int


@dataclass(frozen=True)
class TraceRow:
    step: int
    site: int
    old_spin: int
    new_spin: int
    config_hash: str


@dataclass(frozen=True)
class ChainRun:
    final: tuple[int, ...]
    state: ChainState
    start: tuple[int, ...]
    trace: tuple[TraceRow, ...] | None


def config_hash(config) -> str:
    return hashlib.sha256(bytes(config)).hexdigest()[:12]


def greedy_feasible_start(model: ModelSpec) -> tuple[int, ...]:
    """All-0 if feasible, else all-1 (all edges selected), else the first
    feasible configuration in lexicographic order."""
    n = model.sites.site_count
    for candidate in ((0,) * n, (1,) * n):
        if model.weight(candidate) > 0:
            return candidate
    table = None
    try:
        table = gibbs_table(model)
    except ValidationError:
        pass
    if table is None or not table.configs:
        raise ValidationError("no feasible start found")
    return table.configs[0]


def _step_rng(seed: int, step: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed, counter=[step, 0, 0, 0]))


def _step_detail(model: ModelSpec, state: ChainState) -> tuple[ChainState, int]:
    rng = _step_rng(state.seed, state.step_count)
    n = model.sites.site_count
    site = int(rng.integers(n))
    weights = [float(w) for w in model.local_weights(state.config, site)]
    total = sum(weights)
    if total <= 0:
        raise InternalError(
            "all local spins have zero weight from a feasible state"
        )
    r = rng.random() * total
    acc = 0.0
    new_spin = len(weights) - 1
    for k, w in enumerate(weights):
        acc += w
        if r < acc:
            new_spin = k
            break
    cfg = list(state.config)
    cfg[site] = new_spin
    return ChainState(tuple(cfg), state.step_count + 1, state.seed), site


def glauber_step(model: ModelSpec, state: ChainState) -> ChainState:
    """One heat-bath update: uniform site, exact local conditional resample."""
    return _step_detail(model, state)[0]


def run_chain(
    model: ModelSpec,
    steps: int,
    seed: int,
    start="greedy-feasible",
    record_trace: bool = False,
) -> ChainRun:
    """Run the chain for a fixed number of steps; deterministic in
    (model, steps, seed, start)."""
    if steps < 0:
        raise ValidationError("steps must be nonnegative")
    if isinstance(start, str):
        if start != "greedy-feasible":
            raise ValidationError(f"unknown start {start!r}")
        start_cfg = greedy_feasible_start(model)
    else:
        start_cfg = tuple(int(s) for s in start)
        if model.weight(start_cfg) <= 0:
            raise ValidationError("start configuration has zero weight")
    state = ChainState(start_cfg, 0, seed)
    rows: list[TraceRow] | None = [] if record_trace else None
    for _ in range(steps):
        before = state.config
        state, site = _step_detail(model, state)
        if rows is not None:
            rows.append(
                TraceRow(
                    step=state.step_count - 1,
                    site=site,
                    old_spin=before[site],
                    new_spin=state.config[site],
                    config_hash=config_hash(state.config),
                )
            )
    return ChainRun(
        final=state.config,
        state=state,
        start=start_cfg,
        trace=tuple(rows) if rows is not None else None,
    )


def trace_csv_lines(run: ChainRun):
    yield "step,site,old_spin,new_spin,config_hash"
    for row in run.trace or ():
        yield f"{row.step},{row.site},{row.old_spin},{row.new_spin},{row.config_hash}"


@dataclass(frozen=True)
class TransitionSystem:
    states: tuple[tuple[int, ...], ...]
    matrix: np.ndarray  # row-stochastic
    stationary: np.ndarray

    @property
    def size(self) -> int:
        return len(self.states)


def transition_matrix(
    model: ModelSpec, pinning: Pinning = EMPTY_PINNING, max_states: int = TRANSITION_STATE_CAP
) -> TransitionSystem:
    """Dense heat-bath transition matrix over the positive-weight
    configurations (optionally of a pinned submodel, moving only free sites)."""
    table = gibbs_table(model, pinning)
    states = table.configs
    if len(states) > max_states:
        raise CapExceededError(
            f"{len(states)} states exceed the transition-matrix cap of {max_states}"
        )
    index = {cfg: i for i, cfg in enumerate(states)}
    n = model.sites.site_count
    pinned = set(pinning.sites)
    free = [s for s in range(n) if s not in pinned]
    if not free:
        raise ValidationError("no free sites; the chain has nothing to move")
    P = np.zeros((len(states), len(states)))
    for i, cfg in enumerate(states):
        for site in free:
            weights = [float(w) for w in model.local_weights(cfg, site)]
            total = sum(weights)
            if total <= 0:
                raise InternalError("zero local conditional at a feasible state")
            work = list(cfg)
            for k, w in enumerate(weights):
                if w == 0:
                    continue
                work[site] = k
                j = index.get(tuple(work))
                if j is None:
                    raise InternalError("local move reached an unlisted state")
                P[i, j] += (w / total) / len(free)
    mu = np.array([float(p) for p in table.probabilities])
    return TransitionSystem(states, P, mu)


@dataclass(frozen=True)
class MixingReport:
    tv_curve: tuple[tuple[int, float], ...]
    t_mix_observed: object  # int or "not reached"
    theoretical_bound: float | None

    def as_dict(self) -> dict:
        return {
            "tv_curve": [[t, d] for t, d in self.tv_curve],
            "t_mix_observed": self.t_mix_observed,
            "theoretical_bound": self.theoretical_bound,
        }


def tv_curve(
    model: ModelSpec,
    start,
    horizon: int,
    theoretical_bound: float | None = None,
    max_states: int = TRANSITION_STATE_CAP,
) -> MixingReport:
    """Exact total-variation trajectory of the chain law from a point mass."""
    if horizon < 0:
        raise ValidationError("horizon must be nonnegative")
    system = transition_matrix(model, max_states=max_states)
    if isinstance(start, str):
        start_cfg = greedy_feasible_start(model) if start == "greedy-feasible" else None
        if start_cfg is None:
            raise ValidationError(f"unknown start {start!r}")
    else:
        start_cfg = tuple(int(s) for s in start)
    try:
        i0 = system.states.index(start_cfg)
    except ValueError:
        raise ValidationError("start configuration has zero weight") from None
    dist = np.zeros(system.size)
    dist[i0] = 1.0
    curve = []
    t_mix: object = "not reached"
    for t in range(horizon + 1):
        tv = 0.5 * float(np.abs(dist - system.stationary).sum())
        curve.append((t, tv))
        if t_mix == "not reached" and tv <= 0.25:
            t_mix = t
        if t < horizon:
            dist = dist @ system.matrix
    return MixingReport(tuple(curve), t_mix, theoretical_bound)


@dataclass(frozen=True)
class ErgodicityReport:
    connected: bool
    witness: tuple[tuple[int, ...], tuple[int, ...]] | None
    pinnings_checked: int


def _component_split(states) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
    """BFS on the single-site-move graph; None if connected, else a witness
    pair (first state, first unreachable state)."""
    index = {cfg: i for i, cfg in enumerate(states)}
    seen = [False] * len(states)
    stack = [0]
    seen[0] = True
    sites = len(states[0]) if states else 0
    spin_values: dict[int, set[int]] = {s: set() for s in range(sites)}
    for cfg in states:
        for s, k in enumerate(cfg):
            spin_values[s].add(k)
    while stack:
        i = stack.pop()
        cfg = list(states[i])
        for s in range(sites):
            old = cfg[s]
            for k in spin_values[s]:
                if k == old:
                    continue
                cfg[s] = k
                j = index.get(tuple(cfg))
                if j is not None and not seen[j]:
                    seen[j] = True
                    stack.append(j)
            cfg[s] = old
    if all(seen):
        return None
    bad = next(i for i, s in enumerate(seen) if not s)
    return (states[0], states[bad])


def ergodicity_check(
    model: ModelSpec,
    include_pinnings: bool = False,
    max_states: int = TRANSITION_STATE_CAP,
) -> ErgodicityReport:
    """Connectivity of single-site moves on positive-weight configurations;
    optionally also for every pinned submodel (total connectivity)."""
    table = gibbs_table(model)
    if len(table.configs) > max_states:
        raise CapExceededError(
            f"{len(table.configs)} states exceed the cap of {max_states}"
        )
    witness = _component_split(table.configs)
    checked = 0
    if witness is None and include_pinnings:
        for pin in enumerate_pinnings(model):
            if pin.size == 0 or pin.size == model.sites.site_count:
                continue
            checked += 1
            sub = gibbs_table(model, pin).configs
            w = _component_split(sub)
            if w is not None:
                return ErgodicityReport(False, w, checked)
    return ErgodicityReport(witness is None, witness, checked)


@dataclass(frozen=True)
class EmpiricalTv:
    tv: float
    half_width: float
    n_samples: int
    steps: int
    seed: int


def estimate_tv_empirical(
    model: ModelSpec, steps: int, n_samples: int, seed: int
) -> EmpiricalTv:
    """Empirical TV between the time-``steps`` chain law (sampled i.i.d. per
    chain) and the exact Gibbs table, with a conservative binomial half-width."""
    if n_samples <= 0:
        raise ValidationError("empty sample")
    if steps < 0:
        raise ValidationError("steps must be nonnegative")
    system = transition_matrix(model)
    start = greedy_feasible_start(model)
    i0 = system.states.index(start)
    row = np.zeros(system.size)
    row[i0] = 1.0
    if steps > 0:
        row = row @ np.linalg.matrix_power(system.matrix, steps)
    row = np.clip(row, 0, None)
    row /= row.sum()
    rng = np.random.default_rng(seed)
    draws = rng.choice(system.size, size=n_samples, p=row)
    hist = np.bincount(draws, minlength=system.size).astype(np.float64) / n_samples
    tv = 0.5 * float(np.abs(hist - system.stationary).sum())
    half_width = 1.96 * math.sqrt(0.25 / n_samples)
    return EmpiricalTv(tv, half_width, n_samples, steps, seed)
