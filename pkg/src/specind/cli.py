"""Command-line front end.

Verbs: sample, verify-si, certify, roots, region, region-dist, eta, mix-diag,
zero-scan, admissible, fourier-stats, ising-transform, sweep.  Exit codes:
0 success, 1 unparseable input (CLI or file), 2 validation failure or
numerical non-convergence, 3 cap exceeded.  All stochastic verbs require an
explicit --seed; reports are deterministic given (inputs, seed, version).
"""

from __future__ import annotations

import argparse
import dataclasses
import itertools
import re
import sys
import time
from fractions import Fraction

from . import reports
from .errors import (
    CapExceededError,
    NonConvergenceError,
    ParseError,
    ValidationError,
)
from .exact import (
    eigmax,
    influence_matrix,
    marginal_bound,
    partition_zero_scan,
)
from .extended import (
    FourierPotential,
    fourier_eta,
    fourier_stats,
    hom_admissible,
    tensor_admissible,
)
from .glauber import (
    config_hash,
    ergodicity_check,
    estimate_tv_empirical,
    run_chain,
    tv_curve,
)
from .ising import ising_parameters, ising_sample_batch
from .modelfile import load_model
from .models import (
    EMPTY_PINNING,
    BinarySymmetricHolant,
    CubeFourierModel,
    Pinning,
    TensorNetworkModel,
    VertexSpinModel,
    build_named_model,
    enumerate_pinnings,
)
from .regions import describe, distance_report, parse_region
from .stability import ETA_VARIANTS, certify_model, check_two_spin_roots, eta_bound

STOCHASTIC_VERBS = ("sample", "zero-scan", "ising-transform")


@dataclasses.dataclass
class VerbOutcome:
    results: object
    formula_tags: tuple = ()
    caveats: tuple = ()
    stdout_lines: tuple = ()
    csv_header: tuple | None = None
    csv_rows: tuple | None = None


def _num(text: str):
    try:
        if "/" in text:
            return Fraction(text)
        if re.fullmatch(r"[+-]?\d+", text):
            return int(text)
        return float(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"bad number {text!r}") from None


def _parse_pinning(text: str) -> Pinning:
    if not text.strip():
        return EMPTY_PINNING
    pairs = {}
    for part in text.split(","):
        m = re.fullmatch(r"\s*(\d+)\s*=\s*(\d+)\s*", part)
        if not m:
            raise ParseError(f"bad pinning entry {part!r}; expected SITE=SPIN")
        pairs[int(m.group(1))] = int(m.group(2))
    return Pinning.of(pairs)


def _parse_start(text: str):
    if text == "greedy-feasible":
        return text
    try:
        return tuple(int(s) for s in text.split(","))
    except ValueError:
        raise ParseError(
            f"bad start {text!r}; expected 'greedy-feasible' or comma-separated spins"
        ) from None


def _load(args):
    model = load_model(args.model)
    overrides = getattr(args, "param", None) or []
    if overrides:
        if not isinstance(model, BinarySymmetricHolant) or model.family is None:
            raise ValidationError("--param only applies to named-family holant models")
        params = dict(model.params)
        for item in overrides:
            if "=" not in item:
                raise ParseError(f"bad --param {item!r}; expected NAME=VALUE")
            name, value = item.split("=", 1)
            params[name] = _num(value)
        model = build_named_model(model.family, model.graph, params)
    return model


def _echo_inputs(args) -> dict:
    skip = {"verb", "output", "format"}
    out = {}
    for key, value in vars(args).items():
        if key in skip or value is None:
            continue
        if key == "lam":
            key = "lambda"
        if isinstance(value, (list, tuple)):
            out[key] = [str(v) for v in value]
        elif isinstance(value, (bool, int, float, str, Fraction)):
            out[key] = value
        else:
            out[key] = str(value)
    return out


# ---------------------------------------------------------------- verbs


def _do_sample(args) -> VerbOutcome:
    model = _load(args)
    start = _parse_start(args.start)
    want_trace = args.trace or args.format == "csv"
    run = run_chain(model, args.steps, args.seed, start, record_trace=want_trace)
    results = {
        "final": list(run.final),
        "config_hash": config_hash(run.final),
        "start": list(run.start),
        "steps": args.steps,
        "seed": args.seed,
    }
    csv_header = csv_rows = None
    if want_trace:
        csv_header = ("step", "site", "old_spin", "new_spin", "config_hash")
        csv_rows = tuple(
            (r.step, r.site, r.old_spin, r.new_spin, r.config_hash)
            for r in run.trace
        )
        if args.format != "csv":
            results["trace"] = [list(row) for row in csv_rows]
    return VerbOutcome(
        results,
        formula_tags=("sampler.glauber.heat_bath", "rng.philox.counter_per_step"),
        stdout_lines=(f"final {','.join(str(s) for s in run.final)}",),
        csv_header=csv_header,
        csv_rows=csv_rows,
    )


def _do_verify_si(args) -> VerbOutcome:
    model = _load(args)
    worst = None
    worst_pin = None
    count = 0
    for pin in enumerate_pinnings(model, max_pinned=args.max_pinned):
        count += 1
        value = eigmax(influence_matrix(model, pin, exact=False).array).value
        if worst is None or value > worst:
            worst, worst_pin = value, pin
    results = {
        "eigmax_max": worst,
        "worst_pinning": {str(s): k for s, k in worst_pin.assignments},
        "pinnings_checked": count,
    }
    if not args.skip_b:
        results["marginal_bound"] = float(marginal_bound(model, max_pinned=args.max_pinned))
    return VerbOutcome(
        results,
        formula_tags=(
            "influence.matrix.brute_force",
            "eigmax.shift_power",
            "pinning.enumeration",
        ),
        stdout_lines=(f"eigmax_max {worst!r} over {count} pinnings",),
    )


def _do_certify(args) -> VerbOutcome:
    model = _load(args)
    result = certify_model(model, float(args.lam), slack=args.slack)
    if result.passes is None:
        line = "SKIPPED (comparison not run)"
    else:
        line = "PASS" if result.passes else "FAIL"
    return VerbOutcome(
        result,
        formula_tags=result.formula_tags,
        caveats=result.caveats,
        stdout_lines=(line,),
    )


def _do_roots(args) -> VerbOutcome:
    report = check_two_spin_roots(args.beta, args.gamma, args.d)
    line = (
        f"all_negative_real {str(report.all_negative_real).lower()} "
        f"ratios_ok {str(report.ratios_ok).lower()}"
    )
    return VerbOutcome(
        report,
        formula_tags=("roots.aberth_newton", "two_spin.local_polynomial"),
        stdout_lines=(line,),
    )


def _do_region(args) -> VerbOutcome:
    region = parse_region(args.region)
    results = {"region": describe(region)}
    lines = [describe(region)]
    if args.point is not None:
        try:
            z = complex(args.point)
        except ValueError:
            raise ParseError(f"bad point {args.point!r}") from None
        inside = region.contains(z)
        results["point"] = z
        results["contains"] = inside
        lines.append(f"contains {str(inside).lower()}")
    return VerbOutcome(results, formula_tags=("region.membership",),
                       stdout_lines=tuple(lines))


def _do_region_dist(args) -> VerbOutcome:
    region = parse_region(args.region)
    lam = float(args.lam)
    rep = distance_report(region, lam, method=args.method)
    dv = rep.value / lam
    results = {
        "region": describe(region),
        "lambda": lam,
        "distance": rep.value,
        "delta": dv,
        "method": rep.method,
        "exact_geometry": rep.exact_geometry,
    }
    return VerbOutcome(
        results,
        formula_tags=(rep.method,),
        stdout_lines=(repr(rep.value), f"delta {dv!r}"),
    )


def _do_eta(args) -> VerbOutcome:
    tags = []
    region_desc = None
    if args.region is not None:
        if args.lam is None:
            raise ValidationError("--region needs --lambda to locate the evaluation point")
        region = parse_region(args.region)
        rep = distance_report(region, float(args.lam))
        delta_value = rep.value / float(args.lam)
        region_desc = describe(region)
        tags.append(rep.method)
    elif args.delta is not None:
        delta_value = args.delta
    else:
        raise ValidationError("eta needs either --delta or --region with --lambda")
    extremes = None
    if args.lambda_min is not None or args.lambda_max is not None:
        if args.lambda_min is None or args.lambda_max is None:
            raise ValidationError("--lambda-min and --lambda-max must come together")
        extremes = (args.lambda_min, args.lambda_max)
    cert = eta_bound(
        args.variant,
        delta_value,
        b=args.b,
        lam=None if args.lam is None else float(args.lam),
        lam_star=args.lambda_star,
        lam_extremes=extremes,
        region_description=region_desc,
    )
    tags.append(cert.formula_tag)
    return VerbOutcome(
        cert,
        formula_tags=tuple(tags),
        caveats=cert.caveats,
        stdout_lines=(f"eta {cert.eta!r}",),
    )


def _do_mix_diag(args) -> VerbOutcome:
    model = _load(args)
    start = _parse_start(args.start)
    report = tv_curve(
        model, start, args.horizon,
        theoretical_bound=args.theoretical_bound, max_states=args.max_states,
    )
    ergo = ergodicity_check(model, max_states=args.max_states)
    results = {
        "mixing": report.as_dict(),
        "ergodicity": {
            "connected": ergo.connected,
            "witness": None if ergo.witness is None else [list(c) for c in ergo.witness],
        },
    }
    tags = ["chain.transition_matrix.heat_bath", "tv.exact_evolution"]
    caveats = []
    if args.empirical_samples is not None:
        if args.seed is None:
            raise ValidationError("--empirical-samples requires --seed")
        steps = args.steps if args.steps is not None else args.horizon
        emp = estimate_tv_empirical(model, steps, args.empirical_samples, args.seed)
        results["empirical"] = emp
        tags.append("tv.empirical.binomial_half_width")
        caveats.append("empirical TV is a point estimate; see half_width")
    return VerbOutcome(
        results,
        formula_tags=tuple(tags),
        caveats=tuple(caveats),
        stdout_lines=(f"t_mix {report.t_mix_observed}",),
        csv_header=("step", "tv"),
        csv_rows=tuple(report.tv_curve),
    )


def _do_zero_scan(args) -> VerbOutcome:
    model = _load(args)
    region = parse_region(args.region)
    pin = _parse_pinning(args.pinning) if args.pinning else EMPTY_PINNING
    rep = partition_zero_scan(
        model, region, pin,
        n_samples=args.samples, seed=args.seed,
        truncation_radius=args.truncation_radius,
    )
    return VerbOutcome(
        rep,
        formula_tags=("zero_scan.rejection_sampling", "zero_scan.coordinate_root_sweep"),
        caveats=("a randomized probe can falsify zero-freeness but never prove it",),
        stdout_lines=(
            f"zero_found {str(rep.zero_found).lower()}",
            f"min_modulus {rep.min_modulus!r}",
        ),
    )


def _do_admissible(args) -> VerbOutcome:
    model = _load(args)
    if isinstance(model, VertexSpinModel):
        max_degree = args.max_degree or model.graph.max_degree
        report = hom_admissible(model.edge_matrices, max_degree, args.epsilon)
        kind = "hom"
        tag = "threshold.hom.gamma_over_delta"
    elif isinstance(model, TensorNetworkModel):
        max_degree = args.max_degree or model.graph.max_degree
        report = tensor_admissible(model.vertex_tensors, max_degree, args.epsilon)
        kind = "tensor"
        tag = "threshold.tensor.gamma_over_delta_plus_one"
    else:
        raise ValidationError("admissible needs a vertexspin or tensor model")
    results = {"kind": kind, "max_degree": max_degree, "report": report}
    return VerbOutcome(
        results,
        formula_tags=(tag, "constants.theta_star.bisection"),
        stdout_lines=(
            f"admissible {str(report.admissible).lower()} margin {report.margin!r}",
        ),
    )


def _do_fourier_stats(args) -> VerbOutcome:
    model = _load(args)
    if not isinstance(model, CubeFourierModel):
        raise ValidationError("fourier-stats needs a cube model")
    potential = FourierPotential(model.site_count, model.coefficients)
    stats = fourier_stats(potential)
    results: dict = {"stats": stats, "n": potential.n}
    tags = ["fourier.walsh_basis", "fourier.condition_sqrt_deg_L"]
    if args.b is not None:
        results["eta_certificate"] = fourier_eta(potential, args.b)
        tags.append("eta.generic_region")
    return VerbOutcome(
        results,
        formula_tags=tuple(tags),
        caveats=("dobrushin_value is reported informationally, not certified",),
        stdout_lines=(
            f"L {stats.L!r} deg {stats.deg} condition {stats.condition_value!r}",
        ),
    )


def _do_ising_transform(args) -> VerbOutcome:
    model = _load(args)
    if not isinstance(model, BinarySymmetricHolant) or model.family != "even_subgraph":
        raise ValidationError("ising-transform needs an even_subgraph model")
    rho = model.param("rho")
    params = [ising_parameters(lam_e, rho) for lam_e in model.edge_fields]
    betas = [p.beta for p in params]
    beta = betas[0] if len(set(betas)) == 1 else betas
    draws = ising_sample_batch(model, args.samples, args.seed)
    histogram: dict[str, int] = {}
    for row in draws:
        key = "".join("+" if s > 0 else "-" for s in row)
        histogram[key] = histogram.get(key, 0) + 1
    results = {
        "beta": beta,
        "lambda_ising": params[0].lam,
        "n_draws": args.samples,
        "seed": args.seed,
        "histogram": histogram,
    }
    header = tuple(f"v{i}" for i in range(draws.shape[1]))
    return VerbOutcome(
        results,
        formula_tags=("transform.even_subgraph_to_ising.cluster_coupling",),
        stdout_lines=(f"beta {beta!r} lambda_ising {params[0].lam!r}",),
        csv_header=header,
        csv_rows=tuple(tuple(int(x) for x in row) for row in draws),
    )


_HANDLERS = {
    "sample": _do_sample,
    "verify-si": _do_verify_si,
    "certify": _do_certify,
    "roots": _do_roots,
    "region": _do_region,
    "region-dist": _do_region_dist,
    "eta": _do_eta,
    "mix-diag": _do_mix_diag,
    "zero-scan": _do_zero_scan,
    "admissible": _do_admissible,
    "fourier-stats": _do_fourier_stats,
    "ising-transform": _do_ising_transform,
}


# ---------------------------------------------------------------- parser


def _add_output(p):
    p.add_argument("--output", help="write the report to this path instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default="json")


def _add_model(p):
    p.add_argument("--model", required=True, help="model file path")
    p.add_argument(
        "--param", action="append", metavar="NAME=VALUE",
        help="override a family parameter of a holant model file (repeatable)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="specind",
        description="Exact desk-scale verification of spectral-independence "
        "certificates, stability regions, and chain diagnostics.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("sample", help="run the single-site chain and report the final state")
    _add_model(p)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--start", default="greedy-feasible")
    p.add_argument("--trace", action="store_true", help="record per-step trace rows")
    _add_output(p)

    p = sub.add_parser("verify-si", help="brute-force max influence eigenvalue over pinnings")
    _add_model(p)
    p.add_argument("--max-pinned", type=int, default=None)
    p.add_argument("--skip-b", action="store_true", help="skip the marginal-bound pass")
    _add_output(p)

    p = sub.add_parser("certify", help="certify the spectral bound for a named family")
    _add_model(p)
    p.add_argument("--lambda", dest="lam", type=_num, required=True)
    p.add_argument("--slack", type=float, default=1e-8)
    _add_output(p)

    p = sub.add_parser("roots", help="root structure of the pairwise-interaction local polynomial")
    p.add_argument("--beta", type=_num, required=True)
    p.add_argument("--gamma", type=_num, required=True)
    p.add_argument("--d", type=int, required=True)
    _add_output(p)

    p = sub.add_parser("region", help="parse a region literal; optionally test a point")
    p.add_argument("--region", required=True)
    p.add_argument("--point", default=None)
    _add_output(p)

    p = sub.add_parser("region-dist", help="distance from a positive real point to a region boundary")
    p.add_argument("--region", required=True)
    p.add_argument("--lambda", dest="lam", type=_num, required=True)
    p.add_argument("--method", choices=("auto", "closed_form", "numeric"), default="auto")
    _add_output(p)

    p = sub.add_parser("eta", help="spectral-independence bound from a boundary distance")
    p.add_argument("--variant", choices=ETA_VARIANTS, required=True)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--region", default=None)
    p.add_argument("--lambda", dest="lam", type=_num, default=None)
    p.add_argument("--b", type=float, default=None)
    p.add_argument("--lambda-star", type=float, default=None)
    p.add_argument("--lambda-min", type=float, default=None)
    p.add_argument("--lambda-max", type=float, default=None)
    _add_output(p)

    p = sub.add_parser("mix-diag", help="exact TV curve, observed mixing time, ergodicity")
    _add_model(p)
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--start", default="greedy-feasible")
    p.add_argument("--theoretical-bound", type=float, default=None)
    p.add_argument("--max-states", type=int, default=4096)
    p.add_argument("--empirical-samples", type=int, default=None)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    _add_output(p)

    p = sub.add_parser("zero-scan", help="randomized zero probe of the conditional partition function")
    _add_model(p)
    p.add_argument("--region", required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--pinning", default=None, help="e.g. '0=1,2=0'")
    p.add_argument("--truncation-radius", type=float, default=1e6)
    _add_output(p)

    p = sub.add_parser("admissible", help="entry-deviation admissibility of hom/tensor models")
    _add_model(p)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--max-degree", type=int, default=None)
    _add_output(p)

    p = sub.add_parser("fourier-stats", help="L, degree, and condition value of a cube potential")
    _add_model(p)
    p.add_argument("--b", type=float, default=None,
                   help="marginal bound; adds the eta certificate to the report")
    _add_output(p)

    p = sub.add_parser("ising-transform", help="even-subgraph to Ising sample transform")
    _add_model(p)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    _add_output(p)

    p = sub.add_parser("sweep", help="run a verb over a parameter grid, emitting one CSV row per point")
    p.add_argument("--verb", dest="grid_verb", required=True, choices=sorted(_HANDLERS))
    p.add_argument(
        "--vary", action="append", metavar="KEY=V1,V2,...", default=[],
        help="grid axis; KEY is a long flag of the verb, or param:NAME for "
        "a model-family parameter",
    )
    p.add_argument("--output", help="write the CSV to this path instead of stdout")
    p.add_argument("base", nargs=argparse.REMAINDER,
                   help="arguments passed to the verb at every grid point (after --)")
    return parser


# ---------------------------------------------------------------- driver


def _write(text: str, output: str | None):
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _finish(args, outcome: VerbOutcome, wall: float) -> int:
    for line in outcome.stdout_lines:
        print(line)
    if args.format == "csv":
        if outcome.csv_header is None:
            raise ValidationError(f"{args.verb} has no CSV form; use --format json")
        _write(reports.csv_text(outcome.csv_header, outcome.csv_rows), args.output)
        return 0
    report = reports.make_report(
        args.verb, _echo_inputs(args), outcome.results,
        outcome.formula_tags, outcome.caveats,
    )
    _write(reports.envelope_json(report, wall), args.output)
    return 0


def _grid_rows(parser, args):
    axes = []
    for item in args.vary:
        if "=" not in item:
            raise ParseError(f"bad --vary {item!r}; expected KEY=V1,V2,...")
        key, values = item.split("=", 1)
        vals = [v for v in values.split(",") if v != ""]
        if not vals:
            raise ParseError(f"--vary {item!r} has no values")
        axes.append((key, vals))
    if not axes:
        raise ValidationError("empty grid: provide at least one --vary axis")
    base = list(args.base)
    if base and base[0] == "--":
        base = base[1:]
    keys = [k for k, _ in axes]
    rows = []
    for combo in itertools.product(*(vals for _, vals in axes)):
        argv = [args.grid_verb] + base
        for key, value in zip(keys, combo):
            if key.startswith("param:"):
                argv += ["--param", f"{key[len('param:'):]}={value}"]
            else:
                argv += [f"--{key}", value]
        row = dict(zip(keys, combo))
        try:
            point_args = parser.parse_args(argv)
            outcome = _HANDLERS[args.grid_verb](point_args)
        except SystemExit:
            row["status"], row["message"] = "error:parse", "unparseable arguments"
        except ParseError as exc:
            row["status"], row["message"] = "error:parse", str(exc)
        except ValidationError as exc:
            row["status"], row["message"] = "error:validation", str(exc)
        except CapExceededError as exc:
            row["status"], row["message"] = "error:cap", str(exc)
        except NonConvergenceError as exc:
            row["status"], row["message"] = "error:nonconvergence", str(exc)
        else:
            row["status"], row["message"] = "ok", ""
            row.update(reports.flatten_results(outcome.results))
        rows.append(row)
    return keys, rows


def _do_sweep(parser, args) -> int:
    keys, rows = _grid_rows(parser, args)
    extra = sorted({k for row in rows for k in row} - set(keys) - {"status", "message"})
    header = keys + ["status", "message"] + extra
    table = [[row.get(col) for col in header] for row in rows]
    _write(reports.csv_text(header, table), args.output)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    start = time.perf_counter()
    try:
        if args.verb == "sweep":
            return _do_sweep(parser, args)
        outcome = _HANDLERS[args.verb](args)
        return _finish(args, outcome, time.perf_counter() - start)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NonConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CapExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
