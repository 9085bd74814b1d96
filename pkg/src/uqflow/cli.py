"""Command-line experiment runner for the package.

Subcommands
-----------
solve           nominal power-flow solution report for a case
parse-case      parse/validate a case file, optionally writing canonical text
grid-info       sparse-grid size table for a rule/dims/levels choice
uq-moments      surrogate moments of a power-flow quantity, one row per level
uq-convergence  moment errors against a reference level, one row per level
certify         Kantorovich certificate, analyticity region, and rate bounds

Study commands accept a flat ``key = value`` config file (``--config``);
explicit flags override config entries, which override built-in defaults.
CSV outputs start with a versioned ``# uqflow-csv/1 <command>`` comment so
downstream plotting can detect schema drift.  Exit codes: 0 success, 1 domain
failure (parse, solve, or feasibility), 2 command-line usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .analyticity import (
    EllipseRegion,
    admissible_region_search,
    bound_constants,
    convergence_bound,
    mtilde_bound,
)
from .case_io import load_case, serialize_case, to_network
from .errors import CaseValidationError, UqflowError
from .moments import default_orders, moment_estimates, quadrature_plan, uniform_model
from .newton import NewtonProblem, kantorovich_certificate
from .powerflow import (
    AdmittanceTerm,
    LoadTerm,
    PowerNetwork,
    QuantityOfInterest,
    StochasticPerturbation,
    _pack_state,
    initial_state,
    parametric_problem,
    qoi_sampler,
    solve_power_flow,
)
from .sparse_grid import (
    GridRule,
    build_plan,
    build_surrogate,
    evaluate_surrogate,
    polynomial_space,
    surrogate_from_json,
    surrogate_to_json,
)

CSV_TAG = "uqflow-csv/1"

_FAMILY_ALIASES = {
    "cc": "clenshaw_curtis",
    "gauss": "gauss_legendre",
    "clenshaw_curtis": "clenshaw_curtis",
    "gauss_legendre": "gauss_legendre",
}


def _grid_rule(kind: str, family: str) -> GridRule:
    try:
        family = _FAMILY_ALIASES[family.lower().replace("-", "_")]
    except KeyError:
        raise UqflowError(f"unknown node family {family!r} (use cc or gauss)") from None
    return GridRule(kind=kind, family=family)


def _fmt(x: float) -> str:
    """Shortest exact decimal for a float; keeps CSV output reproducible."""
    return repr(float(x))


def parse_config_text(text: str) -> dict[str, str]:
    """Flat ``key = value`` config: one pair per line, ``#`` comments, blank lines ok.

    Keys are case-insensitive with ``-`` treated as ``_``.  Values keep comma
    syntax for lists (e.g. ``levels = 1,2,3``); interpretation happens at the
    consuming option.
    """
    entries: dict[str, str] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UqflowError(f"config line {line_no}: expected 'key = value', got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key = key.strip().lower().replace("-", "_")
        if not key:
            raise UqflowError(f"config line {line_no}: empty key")
        entries[key] = value.strip()
    return entries


def _parse_levels(text: str) -> tuple[int, ...]:
    try:
        levels = tuple(int(part) for part in text.split(",") if part.strip() != "")
    except ValueError as exc:
        raise UqflowError(f"bad level list {text!r}: {exc}") from None
    if not levels:
        raise UqflowError(f"bad level list {text!r}: no entries")
    return levels


def _parse_int_list(text: str) -> tuple[int, ...]:
    return tuple(int(part) for part in text.split(",") if part.strip() != "")


def _parse_qoi(text: str) -> QuantityOfInterest:
    try:
        return QuantityOfInterest.parse(text)
    except ValueError as exc:
        raise UqflowError(str(exc)) from exc


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a study command needs, resolved from flags + config file."""

    case: str
    rule: GridRule
    levels: tuple[int, ...]
    reference_level: int | None
    dims: int
    qoi: QuantityOfInterest
    study: str
    coefficient: float
    load_buses: tuple[int, ...] | None
    branches: tuple[int, ...] | None
    seed: int
    tol: float
    workers: int
    output: str | None
    cache_dir: str | None

    def __post_init__(self) -> None:
        if self.dims < 1:
            raise UqflowError(f"dims must be >= 1, got {self.dims}")
        if any(w < 0 for w in self.levels):
            raise UqflowError(f"levels must be >= 0, got {self.levels}")
        if self.reference_level is not None and max(self.levels) >= self.reference_level:
            raise UqflowError(
                f"max(levels) = {max(self.levels)} must stay below the reference "
                f"level {self.reference_level}"
            )
        if self.study not in ("load", "admittance"):
            raise UqflowError(f"unknown study {self.study!r} (expected load or admittance)")
        if self.workers < 1:
            raise UqflowError(f"workers must be >= 1, got {self.workers}")


def _experiment_config(args: argparse.Namespace, need_reference: bool) -> ExperimentConfig:
    config = {}
    if args.config is not None:
        config = parse_config_text(Path(args.config).read_text())

    def pick(flag_value, key: str, default, convert):
        if flag_value is not None:
            return flag_value
        if key in config:
            try:
                return convert(config[key])
            except (TypeError, ValueError) as exc:
                raise UqflowError(f"config key {key!r}: {exc}") from exc
        return default

    case = pick(args.case, "case", None, str)
    if case is None:
        raise UqflowError("a case is required (--case or config key 'case')")
    rule = _grid_rule(
        pick(args.rule, "rule", "smolyak", str),
        pick(args.family, "family", "cc", str),
    )
    reference = pick(getattr(args, "ref_level", None), "ref_level", 5, int) if need_reference else None
    qoi = _parse_qoi(pick(args.qoi, "qoi", "voltage:22", str))
    return ExperimentConfig(
        case=case,
        rule=rule,
        levels=pick(args.levels, "levels", (1, 2, 3), _parse_levels),
        reference_level=reference,
        dims=pick(args.dims, "dims", 2, int),
        qoi=qoi,
        study=pick(args.study, "study", "load", str),
        coefficient=pick(args.coefficient, "coefficient", 0.5, float),
        load_buses=pick(None, "load_buses", None, _parse_int_list),
        branches=pick(None, "branches", None, _parse_int_list),
        seed=pick(args.seed, "seed", 0, int),
        tol=pick(args.tol, "tol", 1e-12, float),
        workers=pick(args.workers, "workers", 1, int),
        output=pick(args.out, "out", None, str),
        cache_dir=pick(args.cache, "cache", None, str),
    )


def _study_perturbation(net: PowerNetwork, cfg: ExperimentConfig) -> StochasticPerturbation:
    """Build the perturbation model a study config describes.

    Load study: each parameter dimension scales one load bus's P and Q
    together (explicit ``load_buses`` list, or the first ``dims`` PQ buses
    carrying nonzero load — perturbing a zero load would leave the dimension
    inert).  Admittance study: each dimension scales one branch's series
    conductance and susceptance together (explicit ``branches`` list of
    1-based table rows, or the first ``dims`` rows).
    """
    c = cfg.coefficient
    if cfg.study == "load":
        if cfg.load_buses is not None:
            buses = list(cfg.load_buses)
        else:
            buses = [
                b.id
                for b in net.buses
                if b.kind == "pq" and (b.p_load != 0.0 or b.q_load != 0.0)
            ][: cfg.dims]
        if len(buses) != cfg.dims:
            raise CaseValidationError(
                f"load study needs {cfg.dims} target buses, have {len(buses)} "
                f"(case offers too few nonzero-load PQ buses?)"
            )
        terms = tuple(
            LoadTerm(bus=bus, c_p=c, c_q=c, p_dim=k, q_dim=k) for k, bus in enumerate(buses)
        )
        pert = StochasticPerturbation(dims=cfg.dims, load_terms=terms)
    else:
        if cfg.branches is not None:
            rows = [r - 1 for r in cfg.branches]
        else:
            rows = list(range(min(cfg.dims, len(net.branches))))
        if len(rows) != cfg.dims:
            raise CaseValidationError(
                f"admittance study needs {cfg.dims} branches, have {len(rows)}"
            )
        terms = tuple(
            AdmittanceTerm(branch=row, c_g=c, c_b=c, g_dim=k, b_dim=k)
            for k, row in enumerate(rows)
        )
        pert = StochasticPerturbation(dims=cfg.dims, admittance_terms=terms)
    pert.validate(net)
    return pert


def _cache_key(case_digest: str, cfg: ExperimentConfig, w: int) -> str:
    parts = [
        "uqflow-cache/1",
        case_digest,
        cfg.study,
        str(cfg.dims),
        cfg.rule.kind,
        cfg.rule.family,
        str(w),
        f"{cfg.qoi.kind}:{cfg.qoi.bus}",
        _fmt(cfg.coefficient),
        _fmt(cfg.tol),
        ",".join(map(str, cfg.load_buses or ())),
        ",".join(map(str, cfg.branches or ())),
    ]
    return hashlib.sha256("|".join(parts).encode()).hexdigest()[:32]


@dataclass(frozen=True)
class LevelResult:
    w: int
    knots: int
    mean: float
    variance: float
    wall_ms: float


def _memoized(sample, memo: dict[bytes, float]):
    def wrapped(q: np.ndarray) -> float:
        key = np.asarray(q, dtype=float).tobytes()
        if key not in memo:
            memo[key] = sample(q)
        return memo[key]

    return wrapped


def _level_result(
    cfg: ExperimentConfig,
    net: PowerNetwork,
    pert: StochasticPerturbation,
    w: int,
    memo: dict[bytes, float],
    case_digest: str,
) -> LevelResult:
    start = time.perf_counter()
    plan = build_plan(cfg.rule, w, cfg.dims)
    surrogate = None
    cache_path = None
    if cfg.cache_dir is not None:
        cache_path = Path(cfg.cache_dir) / f"{_cache_key(case_digest, cfg, w)}.json"
        if cache_path.exists():
            surrogate = surrogate_from_json(cache_path.read_text())
    if surrogate is None:
        sampler = _memoized(qoi_sampler(net, pert, cfg.qoi, tol=cfg.tol), memo)
        surrogate = build_surrogate(plan, sampler, workers=cfg.workers)
        if cache_path is not None:
            cache_path.parent.mkdir(parents=True, exist_ok=True)
            cache_path.write_text(surrogate_to_json(surrogate))
    model = uniform_model(cfg.dims)
    q_plan = quadrature_plan(model, default_orders(cfg.rule, w, cfg.dims))
    est = moment_estimates(lambda pts: evaluate_surrogate(surrogate, pts), model, q_plan)
    wall_ms = (time.perf_counter() - start) * 1e3
    return LevelResult(
        w=w,
        knots=len(plan.knots),
        mean=float(est.mean),
        variance=float(est.variance),
        wall_ms=wall_ms,
    )


def _emit_csv(command: str, header: list[str], rows: list[list[str]], out: str | None) -> None:
    lines = [f"# {CSV_TAG} {command}", ",".join(header)]
    lines.extend(",".join(row) for row in rows)
    text = "\n".join(lines) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _load_network(cfg_case: str):
    case = load_case(cfg_case)
    return case, to_network(case)


def _require_qoi_bus(net: PowerNetwork, qoi: QuantityOfInterest) -> None:
    if qoi.bus not in net.position:
        raise CaseValidationError(f"quantity of interest references unknown bus {qoi.bus}")


# ---------------------------------------------------------------------------
# subcommands


def cmd_solve(args: argparse.Namespace) -> int:
    case, net = _load_network(args.case)
    result = solve_power_flow(net, init=args.init, tol=args.tol, max_iter=args.max_iter)
    print(
        f"case {case.name}: {net.n} buses, {len(net.branches)} branches, "
        f"base {net.base_mva:g} MVA"
    )
    status = "converged" if result.converged else "DID NOT CONVERGE"
    print(
        f"{status} in {result.trace.iterations} iterations; "
        f"final mismatch {result.trace.residual_norms[-1]:.3e} (tol {args.tol:g})"
    )
    print(f"{'bus':>5} {'type':>6} {'V (pu)':>12} {'theta (deg)':>13} "
          f"{'P (pu)':>12} {'Q (pu)':>12}")
    for k, bus in enumerate(net.buses):
        print(
            f"{bus.id:>5} {bus.kind:>6} {result.state.v[k]:>12.6f} "
            f"{math.degrees(result.state.theta[k]):>13.6f} "
            f"{result.p_injection[k]:>12.6f} {result.q_injection[k]:>12.6f}"
        )
    if not result.converged:
        print("error: power flow did not converge", file=sys.stderr)
        return 1
    return 0


def cmd_parse_case(args: argparse.Namespace) -> int:
    case = load_case(args.case)
    net = to_network(case)
    print(f"name: {case.name}")
    print(f"version: {case.version}")
    print(f"base_mva: {case.base_mva:g}")
    print(f"rows: bus={case.bus.shape[0]} gen={case.gen.shape[0]} branch={case.branch.shape[0]}")
    print(f"network: {net.n} buses ({len(net.pq)} PQ), {len(net.branches)} in-service branches")
    for warning in case.warnings:
        print(f"warning: {warning}")
    if args.out is not None:
        Path(args.out).write_text(serialize_case(case))
        print(f"canonical case written to {args.out}")
    return 0


def cmd_grid_info(args: argparse.Namespace) -> int:
    rule = _grid_rule(args.rule or "smolyak", args.family or "cc")
    dims = args.dims if args.dims is not None else 2
    levels = args.levels if args.levels is not None else (0, 1, 2, 3, 4)
    rows = []
    for w in levels:
        plan = build_plan(rule, w, dims)
        space = polynomial_space(rule, w, dims)
        rows.append([str(w), str(len(plan.knots)), str(len(plan.terms)), str(len(space))])
    _emit_csv("grid-info", ["w", "knots", "terms", "poly_dim"], rows, args.out)
    return 0


def cmd_uq_moments(args: argparse.Namespace) -> int:
    cfg = _experiment_config(args, need_reference=False)
    case, net = _load_network(cfg.case)
    _require_qoi_bus(net, cfg.qoi)
    pert = _study_perturbation(net, cfg)
    digest = hashlib.sha256(serialize_case(case).encode()).hexdigest()
    memo: dict[bytes, float] = {}
    rows = []
    for w in cfg.levels:
        r = _level_result(cfg, net, pert, w, memo, digest)
        rows.append([str(r.w), str(r.knots), _fmt(r.mean), _fmt(r.variance), f"{r.wall_ms:.3f}"])
    _emit_csv("uq-moments", ["w", "knots", "mean", "var", "wall_ms"], rows, cfg.output)
    return 0


def cmd_uq_convergence(args: argparse.Namespace) -> int:
    cfg = _experiment_config(args, need_reference=True)
    case, net = _load_network(cfg.case)
    _require_qoi_bus(net, cfg.qoi)
    pert = _study_perturbation(net, cfg)
    digest = hashlib.sha256(serialize_case(case).encode()).hexdigest()
    memo: dict[bytes, float] = {}
    # The reference level runs first: with nested node families every lower
    # level then reuses its solves through the memo.
    reference = _level_result(cfg, net, pert, cfg.reference_level, memo, digest)
    rows = []
    for w in cfg.levels:
        r = _level_result(cfg, net, pert, w, memo, digest)
        rows.append(
            [
                str(r.w),
                str(r.knots),
                _fmt(r.mean),
                _fmt(r.variance),
                _fmt(abs(r.mean - reference.mean)),
                _fmt(abs(r.variance - reference.variance)),
                f"{r.wall_ms:.3f}",
            ]
        )
    _emit_csv(
        "uq-convergence",
        ["w", "knots", "mean", "var", "err_mean", "err_var", "wall_ms"],
        rows,
        cfg.output,
    )
    return 0


def _t_star_extended(h_e: float, delta_e: float) -> float:
    if h_e == 0.0:
        return delta_e
    return (2.0 / h_e) * (1.0 - math.sqrt(1.0 - h_e)) * delta_e


def _certificate_lines(cert, label: str) -> list[str]:
    kind = "exact" if cert.lipschitz_is_exact else f"sampled ({cert.probe_count} probes)"
    return [
        f"problem: {label}",
        f"kappa: {_fmt(cert.kappa)}",
        f"delta: {_fmt(cert.delta)}",
        f"lipschitz: {_fmt(cert.lipschitz)} ({kind})",
        f"h: {_fmt(cert.h)}",
        f"t_star: {'nan' if math.isnan(cert.t_star) else _fmt(cert.t_star)}",
        f"kantorovich satisfied: {cert.satisfied}",
    ]


def _bound_schedule_lines(
    region: EllipseRegion,
    m_tilde: float | None,
    rule: GridRule,
    levels: tuple[int, ...],
    dims: int,
) -> list[str]:
    lines = [f"sigma_hat: {', '.join(_fmt(s) for s in region.sigma_hat)}"]
    if min(region.sigma_hat) <= 0.0:
        lines.append("rate bounds: unavailable (degenerate region, sigma_hat = 0)")
        return lines
    if m_tilde is None:
        lines.append("rate bounds: unavailable (no magnitude bound; pass --m-tilde)")
        return lines
    constants = bound_constants(region, m_tilde)
    lines.append(f"m_tilde: {_fmt(m_tilde)}")
    lines.append(f"sigma: {_fmt(constants.sigma)}")
    lines.append(
        f"mu1: {_fmt(constants.mu1)}  mu2: {_fmt(constants.mu2)}  mu3: {_fmt(constants.mu3)}"
    )
    lines.append(f"c1: {_fmt(constants.c1)}")
    for w in levels:
        eta = len(build_plan(rule, w, dims).knots)
        regime, bound = convergence_bound(constants, w, eta)
        lines.append(f"bound w={w} eta={eta} regime={regime} value={_fmt(bound)}")
    return lines


def cmd_certify(args: argparse.Namespace) -> int:
    rule = _grid_rule(args.rule or "smolyak", args.family or "cc")
    levels = args.levels if args.levels is not None else (1, 2, 3)
    seed = args.seed if args.seed is not None else 0
    lines: list[str]

    if args.scalar_demo:
        dims = 1
        problem = NewtonProblem(
            residual=lambda x, p: np.array([x[0] ** 2 - 2.0]),
            jacobian=lambda x, p: np.array([[2.0 * x[0]]]),
        )
        x0 = np.array([1.5])
        cert = kantorovich_certificate(problem, x0, lipschitz=2.0)
        lines = _certificate_lines(cert, "built-in scalar x^2 - 2 at x0 = 1.5")
        # Parameter-coupled variant drives the region search and rate bounds.
        coupled = NewtonProblem(
            residual=lambda x, p: np.array([x[0] ** 2 - (2.0 + 0.1 * p[0])]),
            jacobian=lambda x, p: np.array(
                [[2.0 * x[0]]], dtype=np.result_type(np.asarray(x).dtype, np.asarray(p).dtype)
            ),
        )
        search_problem, search_x0 = coupled, x0
        lines.append("region problem: x^2 - (2 + 0.1 q)")
    else:
        if args.case is None:
            raise UqflowError("certify needs --case or --scalar-demo")
        dims = args.dims if args.dims is not None else 2
        case, net = _load_network(args.case)
        study_cfg = ExperimentConfig(
            case=args.case,
            rule=rule,
            levels=levels,
            reference_level=None,
            dims=dims,
            qoi=_parse_qoi(args.qoi or "voltage:22"),
            study=args.study or "load",
            coefficient=args.coefficient if args.coefficient is not None else 0.5,
            load_buses=None,
            branches=None,
            seed=seed,
            tol=args.tol if args.tol is not None else 1e-12,
            workers=1,
            output=None,
            cache_dir=None,
        )
        pert = _study_perturbation(net, study_cfg)
        problem = parametric_problem(net, pert)
        x0 = _pack_state(net, initial_state(net, "flat"))
        cert = kantorovich_certificate(
            problem,
            x0,
            params=np.zeros(dims),
            radius=args.radius,
            lipschitz=args.lipschitz,
            probe_count=args.probes,
            seed=seed,
        )
        lines = _certificate_lines(
            cert, f"{case.name} ({study_cfg.study} study, {dims} dims) from flat start"
        )
        search_problem, search_x0 = problem, x0

    kappa_e = args.kappa_e if args.kappa_e is not None else 2.0 * cert.kappa
    delta_e = (
        args.delta_e
        if args.delta_e is not None
        else (2.0 * kappa_e * cert.delta / cert.kappa if cert.delta > 0 else kappa_e)
    )
    lines.append(f"kappa_e: {_fmt(kappa_e)}")
    lines.append(f"delta_e: {_fmt(delta_e)}")

    if args.sigma_hat is not None:
        values = [float(s) for s in args.sigma_hat.split(",")]
        if len(values) == 1:
            values = values * dims
        region = EllipseRegion(tuple(values))
        lines.append("region: supplied via --sigma-hat (search skipped)")
    else:
        region = admissible_region_search(
            search_problem,
            search_x0,
            cert.kappa,
            cert.delta,
            kappa_e=kappa_e,
            delta_e=delta_e,
            dims=dims,
            sigma_cap=args.sigma_cap,
            sample_count=args.samples,
            seed=seed,
        )
        lines.append("region: certified by boundary-probe bisection")

    m_tilde = args.m_tilde
    h_e = 2.0 * kappa_e * cert.lipschitz * delta_e
    lines.append(f"h_e: {_fmt(h_e)}")
    if h_e <= 1.0:
        t_star_e = _t_star_extended(h_e, delta_e)
        lines.append(f"t_star_e: {_fmt(t_star_e)}")
        if m_tilde is None:
            m_tilde = mtilde_bound(t_star_e, search_x0)
    else:
        lines.append("t_star_e: unavailable (h_e > 1)")
    lines.extend(_bound_schedule_lines(region, m_tilde, rule, levels, dims))

    text = "\n".join(lines) + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)
    return 0


# ---------------------------------------------------------------------------
# parser assembly


def _levels_argument(text: str) -> tuple[int, ...]:
    try:
        return _parse_levels(text)
    except UqflowError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _add_common_study_arguments(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--case", help="case path or bundled:<name>")
    sub.add_argument("--config", help="flat key=value config file")
    sub.add_argument("--rule", choices=["smolyak", "td", "hc"], help="index-set rule")
    sub.add_argument("--family", choices=["cc", "gauss"], help="1-D node family")
    sub.add_argument("--levels", type=_levels_argument, help="comma-separated levels, e.g. 1,2,3")
    sub.add_argument("--dims", type=int, help="stochastic dimension count")
    sub.add_argument("--qoi", help="quantity of interest, e.g. voltage:22")
    sub.add_argument("--study", choices=["load", "admittance"], help="perturbation family")
    sub.add_argument("--coefficient", type=float, help="perturbation coefficient (default 0.5)")
    sub.add_argument("--seed", type=int, help="random seed for sampled estimates")
    sub.add_argument("--tol", type=float, help="knot-solve mismatch tolerance (default 1e-12)")
    sub.add_argument("--workers", type=int, help="concurrent knot solves (default 1)")
    sub.add_argument("--cache", help="directory for surrogate JSON caching")
    sub.add_argument("--out", help="output file (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uqflow",
        description="Sparse-grid uncertainty quantification for Newton-solved power flow.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve a case and print the operating point")
    p_solve.add_argument("--case", required=True, help="case path or bundled:<name>")
    p_solve.add_argument("--init", choices=["flat", "from-case"], default="flat")
    p_solve.add_argument("--tol", type=float, default=1e-10)
    p_solve.add_argument("--max-iter", type=int, default=20)
    p_solve.set_defaults(func=cmd_solve)

    p_parse = sub.add_parser("parse-case", help="parse and validate a case file")
    p_parse.add_argument("--case", required=True, help="case path or bundled:<name>")
    p_parse.add_argument("--out", help="write canonical serialization here")
    p_parse.set_defaults(func=cmd_parse_case)

    p_grid = sub.add_parser("grid-info", help="sparse-grid size table")
    p_grid.add_argument("--rule", choices=["smolyak", "td", "hc"])
    p_grid.add_argument("--family", choices=["cc", "gauss"])
    p_grid.add_argument("--dims", type=int)
    p_grid.add_argument("--levels", type=_levels_argument)
    p_grid.add_argument("--out")
    p_grid.set_defaults(func=cmd_grid_info)

    p_mom = sub.add_parser("uq-moments", help="surrogate moments per level")
    _add_common_study_arguments(p_mom)
    p_mom.set_defaults(func=cmd_uq_moments)

    p_conv = sub.add_parser("uq-convergence", help="moment errors against a reference level")
    _add_common_study_arguments(p_conv)
    p_conv.add_argument("--ref-level", dest="ref_level", type=int, help="reference level (default 5)")
    p_conv.set_defaults(func=cmd_uq_convergence)

    p_cert = sub.add_parser("certify", help="Kantorovich certificate + analyticity report")
    p_cert.add_argument("--case", help="case path or bundled:<name>")
    p_cert.add_argument("--scalar-demo", action="store_true", help="run the built-in scalar example")
    p_cert.add_argument("--rule", choices=["smolyak", "td", "hc"])
    p_cert.add_argument("--family", choices=["cc", "gauss"])
    p_cert.add_argument("--levels", type=_levels_argument, help="levels for the bound schedule")
    p_cert.add_argument("--dims", type=int)
    p_cert.add_argument("--qoi")
    p_cert.add_argument("--study", choices=["load", "admittance"])
    p_cert.add_argument("--coefficient", type=float)
    p_cert.add_argument("--tol", type=float)
    p_cert.add_argument("--seed", type=int)
    p_cert.add_argument("--lipschitz", type=float, help="exact Lipschitz constant, skips sampling")
    p_cert.add_argument("--radius", type=float, default=1.0, help="Lipschitz probe ball radius")
    p_cert.add_argument("--probes", type=int, default=64, help="Lipschitz probe pair count")
    p_cert.add_argument("--kappa-e", dest="kappa_e", type=float, help="target extended kappa")
    p_cert.add_argument("--delta-e", dest="delta_e", type=float, help="target extended delta")
    p_cert.add_argument("--sigma-cap", dest="sigma_cap", type=float, default=2.0)
    p_cert.add_argument("--samples", type=int, default=32, help="random t-probes per estimate")
    p_cert.add_argument(
        "--sigma-hat",
        dest="sigma_hat",
        help="fixed region radii (comma list or single value), skips the search",
    )
    p_cert.add_argument("--m-tilde", dest="m_tilde", type=float, help="magnitude bound override")
    p_cert.add_argument("--out")
    p_cert.set_defaults(func=cmd_certify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UqflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
