"""Verification suites run by ``drinfeld_cli.py verify``.

Each suite takes a RunConfig and returns a SuiteReport.  Work that is
independent per sample point goes through a map-like callable; with more
than one thread that is ThreadPoolExecutor.map, which yields results in
input order, so reports do not depend on the thread count.  Anything random
is drawn from Random(cfg.seed) before the work is handed out.
"""

from __future__ import annotations

import dataclasses
import logging
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from fractions import Fraction
from random import Random

from drinfeld.carlitz import carlitz_period, theta
from drinfeld.config import RunConfig
from drinfeld.drinfeld_module import (
    REL_GUARD,
    DrinfeldModule,
    entire_eval,
    exp_coeffs,
    exp_residuals,
    log_coeffs,
    log_exp_residuals,
    min_residual,
    phi_of_a,
    quasi_period_coeffs,
    quasi_residuals,
)
from drinfeld.eisenstein import GUARD, EisensteinSpec, eisenstein_rel
from drinfeld.errors import ConfigError, InconclusiveRelation, NotInOmega
from drinfeld.finite_field import FieldContext
from drinfeld.lattice import DEFAULT_TEST_DEGREE, UpperHalfPoint, cm_point, omega_r_check
from drinfeld.modular import (
    GLrMatrix,
    SlashContext,
    automorphy_check,
    cocycle_residual,
    eisenstein_expansion_check,
    level_change_check,
    logder_check,
    sample_gamma_N,
)
from drinfeld.period_matrix import PeriodMatrix, exp_for_points, legendre_check, period_matrix
from drinfeld.relations import (
    RelationQuery,
    cm_value_certify,
    detect_relation,
    independence_probe,
)
from drinfeld.report import CheckResult, SuiteReport, judge
from drinfeld.samples import sample_points
from drinfeld.series import RamifiedSeries, to_T
from drinfeld.theta_poly import ThetaPoly, random_poly
from drinfeld.tseries import TSeries, frobenius_twist, omega_series
from drinfeld.twisted_poly import ore_mul

_logger = logging.getLogger(__name__)

SUITE_NAMES = (
    "exp", "quasi", "omega", "automorphy", "levelchange", "expansion", "legendre", "cm", "independence",
)
LEGENDRE_D = 4
INDEPENDENCE_DEGREE = 3


@contextmanager
def worker_map(threads: int):
    """map, or an order-preserving thread-pool map."""
    if threads <= 1:
        yield map
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        yield pool.map


def _bar(cfg: RunConfig):
    return cfg.threshold * cfg.prec


def _v_t(cfg: RunConfig) -> Fraction:
    return Fraction(cfg.prec, 2)


def _flatten(chunks) -> list:
    out = []
    for chunk in chunks:
        out.extend(chunk)
    return out


# ==================== Carlitz ====================


def carlitz_report(cfg: RunConfig) -> SuiteReport:
    """pi~ and val(exp_C(pi~))."""
    ctx = cfg.context()
    report = SuiteReport("carlitz", cfg.to_json())
    pi = carlitz_period(ctx, cfg.prec)
    carlitz = DrinfeldModule.carlitz(ctx)
    exp = exp_for_points(carlitz, [pi], cfg.kmax, cfg.prec)
    residual = entire_eval(exp, pi, cfg.prec).val_bound()
    detail = {"abs_exponent": pi.abs_exponent(), "pi": pi.to_text()}
    report.add(judge("carlitz", 0, residual, _bar(cfg), detail))
    report.informational.append({"pi": pi.to_json(), "abs_exponent": pi.abs_exponent()})
    return report


# ==================== Drinfeld module series ====================


def random_modules(ctx: FieldContext, count: int, rng: Random, ranks=(1, 2, 3),
                   degree: int = 2) -> list[DrinfeldModule]:
    """Carlitz first, then modules with random polynomial coefficients."""
    modules = [DrinfeldModule.carlitz(ctx)] if 1 in ranks else []
    while len(modules) < count:
        r = ranks[len(modules) % len(ranks)]
        polys = [random_poly(ctx, rng.randint(0, degree), rng) if rng.random() < 0.8 else ThetaPoly(ctx, ())
                 for _ in range(r - 1)]
        polys.append(random_poly(ctx, rng.randint(0, degree), rng))
        modules.append(DrinfeldModule.from_polys(ctx, polys))
    return modules[:count]


def suite_exp(cfg: RunConfig, ctx: FieldContext, mapper) -> SuiteReport:
    report = SuiteReport("exp", cfg.to_json())
    rng = Random(cfg.seed)
    modules = random_modules(ctx, cfg.samples, rng)
    pairs = [(random_poly(ctx, rng.randint(0, 3), rng), random_poly(ctx, rng.randint(0, 3), rng))
             for _ in modules]
    rel = cfg.prec + REL_GUARD
    bar = _bar(cfg)

    def run(item):
        index, (phi, (a, b)) = item
        detail = {"rank": phi.rank}
        exp = exp_coeffs(phi, cfg.kmax, rel)
        log = log_coeffs(phi, cfg.kmax, rel)
        product = ore_mul(phi_of_a(phi, a, rel), phi_of_a(phi, b, rel), to_T(ctx, rel))
        return [
            judge("exp", index, min_residual(exp_residuals(phi, exp, rel)), bar, detail),
            judge("log", index, min_residual(log_exp_residuals(exp, log, rel)), bar, detail),
            judge("phi_mul", index, phi_of_a(phi, a * b, rel).relative_residual(product), bar, detail),
        ]

    for result in _flatten(mapper(run, list(enumerate(zip(modules, pairs))))):
        report.add(result)
    return report


def suite_quasi(cfg: RunConfig, ctx: FieldContext, mapper) -> SuiteReport:
    report = SuiteReport("quasi", cfg.to_json())
    modules = random_modules(ctx, cfg.samples, Random(cfg.seed), ranks=(2, 3))
    rel = cfg.prec + REL_GUARD
    bar = _bar(cfg)

    def run(item):
        index, phi = item
        exp = exp_coeffs(phi, cfg.kmax, rel)
        out = []
        for i in range(phi.rank):
            quasi = quasi_period_coeffs(phi, i, cfg.kmax, exp=exp, rel_prec=rel)
            residual = min_residual(quasi_residuals(phi, i, quasi, exp, rel))
            out.append(judge(f"quasi:{i}", index, residual, bar, {"rank": phi.rank}))
        return out

    for result in _flatten(mapper(run, list(enumerate(modules)))):
        report.add(result)
    return report


# ==================== Omega(t) and Omega^r ====================


def suite_omega(cfg: RunConfig, ctx: FieldContext, mapper) -> SuiteReport:
    report = SuiteReport("omega", cfg.to_json())
    bar = _bar(cfg)
    q = ctx.q
    prec = cfg.prec + cfg.t_order
    om = omega_series(ctx, cfg.t_order, prec)
    # the inverse twist divides precision by q
    twisted = frobenius_twist(omega_series(ctx, cfg.t_order, q * prec), -1)
    t_minus_theta = TSeries.t(ctx, cfg.t_order) - TSeries.from_list(ctx, [theta(ctx)], cfg.t_order)
    report.add(judge("omega_twist", 0, twisted.residual_valuation(t_minus_theta * om), bar))
    pi = carlitz_period(ctx, prec)
    at_theta = om.evaluate(theta(ctx))
    report.add(judge("omega_at_theta", 0, (at_theta * pi + 1).val_bound(), bar))

    def run(item):
        index, omega = item
        cert = omega_r_check(omega, DEFAULT_TEST_DEGREE, cfg.enum_budget)
        return CheckResult("omega_r", index, None, True, cert.to_json())

    points = sample_points(ctx, 2, cfg.samples, cfg.seed)
    for result in mapper(run, list(enumerate(points))):
        report.add(result)
    rational = UpperHalfPoint.from_coords(ctx, [theta(ctx)])
    try:
        omega_r_check(rational, DEFAULT_TEST_DEGREE, cfg.enum_budget)
        report.add(CheckResult("omega_r:rejects_K_inf", 0, None, False))
    except NotInOmega as e:
        report.add(CheckResult("omega_r:rejects_K_inf", 0, None, True, {"reason": str(e)}))
    return report


# ==================== Modular layer ====================


def _level_theta_spec(ctx: FieldContext, v) -> EisensteinSpec:
    one, zero = ThetaPoly.constant(ctx, 1), ThetaPoly(ctx, ())
    return EisensteinSpec(ThetaPoly.theta(ctx), tuple(one if x else zero for x in v))


def suite_automorphy(cfg: RunConfig, ctx: FieldContext, mapper) -> SuiteReport:
    report = SuiteReport("automorphy", cfg.to_json())
    rng = Random(cfg.seed)
    N = ThetaPoly.theta(ctx)
    spec = _level_theta_spec(ctx, (1, 0))
    pi = carlitz_period(ctx, cfg.prec + 8 * GUARD)
    gammas = [GLrMatrix.identity(ctx, 2)]
    gammas += [sample_gamma_N(ctx, N, 2, rng) for _ in range(cfg.gammas)]
    points = sample_points(ctx, 2, cfg.samples, cfg.seed)

    def evaluator(omega):
        return eisenstein_rel(spec, omega, cfg.prec + GUARD, cfg.deg_budget, pi).value

    for result in automorphy_check(evaluator, SlashContext(1, 0), gammas, points, cfg.prec,
                                   cfg.threshold, mapper=mapper):
        report.add(result)

    # weight 2 must fail; bottom-left N makes j non-constant
    control = GLrMatrix.elementary(ctx, 2, 1, 0, N)
    for result in automorphy_check(evaluator, SlashContext(2, 0), [control], points[:1], cfg.prec,
                                   cfg.threshold, check="automorphy:k=2 control"):
        report.add(dataclasses.replace(result, passed=not result.passed))

    for index, omega in enumerate(points):
        g, h = gammas[1 + index % cfg.gammas], gammas[1 + (index + 1) % cfg.gammas]
        report.add(judge("cocycle", index, cocycle_residual(g, h, omega, cfg.prec), _bar(cfg)))
    report.certificates.extend({"gamma": i, "matrix": g.describe()} for i, g in enumerate(gammas))
    return report


def suite_levelchange(cfg: RunConfig, ctx: FieldContext, mapper) -> SuiteReport:
    report = SuiteReport("levelchange", cfg.to_json())
    N2 = ThetaPoly.theta(ctx)
    N1 = N2 * N2
    pi = carlitz_period(ctx, cfg.prec + 8 * GUARD)
    points = sample_points(ctx, 2, cfg.samples, cfg.seed)

    def run(item):
        index, omega = item
        return level_change_check(N1, N2, omega, cfg.prec, cfg.threshold, cfg.deg_budget, pi, index)

    for result in mapper(run, list(enumerate(points))):
        report.add(result)
    report.add(level_change_check(N2, N2, points[0], cfg.prec, cfg.threshold, cfg.deg_budget, pi))
    if ctx.p > 2:
        scaled = N2.scale(ctx.minus_one)
        report.add(level_change_check(scaled, N2, points[0], cfg.prec, cfg.threshold, cfg.deg_budget, pi))
    return report


def suite_expansion(cfg: RunConfig, ctx: FieldContext, mapper) -> SuiteReport:
    report = SuiteReport("expansion", cfg.to_json())
    spec = _level_theta_spec(ctx, (1, 0))
    pi = carlitz_period(ctx, cfg.prec + 8 * GUARD)
    points = sample_points(ctx, 2, cfg.samples, cfg.seed)

    def run(item):
        index, omega = item
        return eisenstein_expansion_check(spec, omega, cfg.prec, cfg.threshold, cfg.deg_budget, pi,
                                          index, budget=cfg.enum_budget)

    for result in mapper(run, list(enumerate(points))):
        report.add(result)
    both = _level_theta_spec(ctx, (1, 1))
    result = eisenstein_expansion_check(both, points[0], cfg.prec, cfg.threshold, cfg.deg_budget, pi,
                                        budget=cfg.enum_budget)
    report.add(dataclasses.replace(result, check="expansion:u~!=0"))
    z = spec.u_dot(points[0], cfg.prec + GUARD)
    report.add(logder_check(points[0].lattice(), z, 2, cfg.prec, cfg.threshold, budget=cfg.enum_budget))
    return report


# ==================== Periods and relations ====================


def _found(check: str, index: int, cert, detail: dict | None = None) -> CheckResult:
    if cert is None:
        return CheckResult(check, index, None, False, detail or {})
    return CheckResult(check, index, cert.achieved, True, dict(detail or {}, relation=cert.describe()))


def suite_legendre(cfg: RunConfig, ctx: FieldContext, mapper) -> SuiteReport:
    report = SuiteReport("legendre", cfg.to_json())
    d = min(LEGENDRE_D, cfg.detector_d)
    pi = carlitz_period(ctx, cfg.prec + 2 * GUARD)

    carlitz = DrinfeldModule.carlitz(ctx)
    P = period_matrix(carlitz, [pi], cfg.kmax, cfg.prec)
    cert = legendre_check(P, pi, d, cfg.detector_h, _v_t(cfg))
    report.add(_found("legendre:carlitz", 0, cert))
    report.certificates.append({"label": "carlitz", "certificate": cert})

    cm = cm_point("sqrt_theta", ctx, cfg.prec)
    P = period_matrix(cm.drinfeld_module(), cm.period_basis(cfg.prec + 2 * GUARD), cfg.kmax, cfg.prec)
    try:
        cert = legendre_check(P, pi, d, cfg.detector_h, _v_t(cfg))
    except InconclusiveRelation as e:
        _logger.warning("Legendre determinant at sqrt_theta: %s", e)
        cert = None
    report.add(_found("legendre:sqrt_theta", 0, cert))
    report.certificates.append({"label": "sqrt_theta", "certificate": cert})

    # not a period matrix: det/pi~ = pi~ - theta^(1/m)/pi~
    root = RamifiedSeries.theta_power(ctx, Fraction(1, ctx.m))
    bogus = PeriodMatrix(((pi, RamifiedSeries.one(ctx)), (root, pi)), (pi, root), Fraction(cfg.prec))
    try:
        legendre_check(bogus, pi, d, cfg.detector_h, _v_t(cfg))
        report.add(CheckResult("legendre:control", 0, None, False))
    except InconclusiveRelation:
        report.add(CheckResult("legendre:control", 0, None, True, {"inconclusive": True}))
    return report


def _cm_values(cfg: RunConfig, ctx: FieldContext, prec, pi):
    cm = cm_point("sqrt_theta", ctx, prec)
    omega = cm.point
    e1 = eisenstein_rel(_level_theta_spec(ctx, (1, 0)), omega, prec + GUARD, cfg.deg_budget, pi).value
    e2 = eisenstein_rel(_level_theta_spec(ctx, (0, 1)), omega, prec + GUARD, cfg.deg_budget, pi).value
    return cm, e1, e2


def suite_cm(cfg: RunConfig, ctx: FieldContext, mapper) -> SuiteReport:
    report = SuiteReport("cm", cfg.to_json())
    v_t = _v_t(cfg)
    d, h = cfg.detector_d, cfg.detector_h
    pi = carlitz_period(ctx, cfg.prec + 8 * GUARD)
    cm, e1, e2 = _cm_values(cfg, ctx, cfg.prec, pi)
    lam = cm.lam(cfg.prec + 2 * GUARD)

    ratio = cm_value_certify([("E_v1/E_v2", e1)], e2, d, h, v_t, cfg.system_budget)[0]
    over_lam = cm_value_certify([("E_v1/lambda", e1)], lam, d, h, v_t, cfg.system_budget)[0]
    unit = cm_value_certify([("lambda/lambda", lam)], lam, 1, 0, v_t, cfg.system_budget)[0]
    for index, item in enumerate((ratio, over_lam, unit)):
        report.add(_found(f"cm:{item.label}", index, item.certificate))
        report.certificates.append(item)

    # same relation two steps up in precision
    _, e1_hi, e2_hi = _cm_values(cfg, ctx, cfg.prec + 20, carlitz_period(ctx, cfg.prec + 20 + 8 * GUARD))
    again = cm_value_certify([("E_v1/E_v2", e1_hi)], e2_hi, d, h, v_t, cfg.system_budget)[0]
    stable = ratio.found and again.found and ratio.certificate.same_up_to_scalar(again.certificate)
    report.add(CheckResult("cm:stable", 0, None, bool(stable), {"prec": cfg.prec + 20}))

    bad = cm_value_certify([("lambda^2/pi", lam * lam)], pi, d, h, v_t, cfg.system_budget)[0]
    report.informational.append(bad)
    return report


def suite_independence(cfg: RunConfig, ctx: FieldContext, mapper) -> SuiteReport:
    if ctx.p == 2:
        raise ConfigError("the independence probe uses square roots and needs odd p")
    report = SuiteReport("independence", cfg.to_json())
    v_t = _v_t(cfg)
    pi = carlitz_period(ctx, cfg.prec + 2 * GUARD)
    kinds = ("sqrt_theta", "quadratic:0,θ+1")
    values = [cm_point(kind, ctx, cfg.prec).lam(cfg.prec + 2 * GUARD).div(pi) for kind in kinds]

    probe = independence_probe(values, INDEPENDENCE_DEGREE, cfg.detector_h, v_t, cfg.system_budget)
    report.add(CheckResult("independence", 0, None, True, {
        "values": [f"lambda({k})/pi" for k in kinds],
        "cross_relations": probe.cross_relations,
        "independent_at_bounds": probe.independent,
        "evidence": "bounded negative evidence, not a proof",
    }))
    report.informational.append(probe)

    xi = values[0]
    control = independence_probe([xi, xi * xi], 2, 0, v_t, cfg.system_budget)
    report.add(CheckResult("independence:dependent_control", 1, None, control.cross_relations > 0,
                           {"cross_relations": control.cross_relations}))
    return report


SUITES = {
    "exp": suite_exp,
    "quasi": suite_quasi,
    "omega": suite_omega,
    "automorphy": suite_automorphy,
    "levelchange": suite_levelchange,
    "expansion": suite_expansion,
    "legendre": suite_legendre,
    "cm": suite_cm,
    "independence": suite_independence,
}


def run_suite(name: str, cfg: RunConfig) -> SuiteReport:
    if name not in SUITES:
        raise ConfigError(f"unknown suite {name!r}; choose from {', '.join(SUITE_NAMES)}")
    ctx = cfg.context()
    _logger.info("suite %s: q=%d m=%d prec=%d threads=%d", name, ctx.q, ctx.m, cfg.prec, cfg.threads)
    with worker_map(cfg.threads) as mapper:
        report = SUITES[name](cfg, ctx, mapper)
    _logger.info("suite %s: %d passed, %d failed", name, report.passed, report.failed)
    return report


# ==================== Named quantities for the detector ====================


NAMED_VALUES = ("pi", "omega_at_theta", "sqrt_theta", "theta_ratio", "cm_ratio", "cm_lambda")


def named_value(name: str, cfg: RunConfig) -> RamifiedSeries:
    ctx = cfg.context()
    prec = cfg.prec
    if name == "pi":
        return carlitz_period(ctx, prec)
    if name == "omega_at_theta":
        return omega_series(ctx, cfg.t_order, prec + cfg.t_order).evaluate(theta(ctx))
    if name == "sqrt_theta":
        return RamifiedSeries.theta_power(ctx, Fraction(1, 2))
    if name == "theta_ratio":
        th = theta(ctx)
        return (th + 1).div(th, prec)
    if name in ("cm_ratio", "cm_lambda"):
        pi = carlitz_period(ctx, prec + 8 * GUARD)
        cm, e1, e2 = _cm_values(cfg, ctx, prec, pi)
        if name == "cm_ratio":
            return e1.div(e2)
        return cm.lam(prec + 2 * GUARD).div(pi)
    raise ConfigError(f"unknown quantity {name!r}; choose from {', '.join(NAMED_VALUES)}")


def relation_search(name: str, cfg: RunConfig, d: int | None = None, h: int | None = None, v_t=None):
    """Run the detector on a named quantity; returns (value, certificate or None)."""
    value = named_value(name, cfg)
    query = RelationQuery(value, d or cfg.detector_d, cfg.detector_h if h is None else h,
                          _v_t(cfg) if v_t is None else Fraction(v_t))
    return value, detect_relation(query, cfg.system_budget)
