"""Certified inequalities: both sides, signed margins, graded verdicts.

Every check returns RelationReport records with margin = lhs - rhs, where the
sides are arranged so that a nonnegative margin (within tolerance) certifies
the inequality.  Checks that need finite moments downgrade to a
not-applicable verdict on heavy-tailed states instead of failing; the
entropic bounds are exactly the statements that survive infinite variance.

The pass threshold is -(base tolerance + 4 x propagated grid-error estimate);
numerical certification needs graded evidence rather than a boolean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import (DensityFn, DiscreteDist, MixedState, OrderPair, PureState,
                   as_mixed, moment, rebuild_state)
from .entropy import (alpha_log, alpha_norm, bin_density, diff_renyi,
                      diff_shannon, discrete_norm, discrete_renyi,
                      discrete_tsallis)
from .errors import (InvalidParameterError, MomentDivergenceError,
                     NormDivergenceError)
from .measurement import AcceptanceFn, s_f, smear
from .transform import RepresentationBundle, bundle

LN_E_PI = 1.0 + math.log(math.pi)
BASE_TOLERANCE = 1e-8


@dataclass(frozen=True)
class RelationReport:
    relation_id: str
    lhs: float
    rhs: float
    margin: float
    tolerance: float
    est_error: float
    verdict: str          # "pass" | "fail" | "not_applicable"
    inputs_digest: str


def _fmt(x) -> str:
    if x is None:
        return "-"
    return format(float(x), ".17g")


def _digest(relation_id: str, label: str, beta: float, sigma=None,
            alpha=None, gamma=None, delta_k=None, delta_x=None) -> str:
    return (f"relation={relation_id};state={label};beta={_fmt(beta)};"
            f"sigma={_fmt(sigma)};alpha={_fmt(alpha)};gamma={_fmt(gamma)};"
            f"delta_k={_fmt(delta_k)};delta_x={_fmt(delta_x)}")


def _report(relation_id: str, lhs: float, rhs: float, est_error: float,
            digest: str, base_tol: float = BASE_TOLERANCE) -> RelationReport:
    margin = lhs - rhs
    tol = base_tol + 4.0 * est_error
    verdict = "pass" if margin >= -tol else "fail"
    return RelationReport(relation_id=relation_id, lhs=lhs, rhs=rhs,
                          margin=margin, tolerance=tol, est_error=est_error,
                          verdict=verdict, inputs_digest=digest)


def _not_applicable(relation_id: str, digest: str) -> RelationReport:
    return RelationReport(relation_id=relation_id, lhs=math.nan, rhs=math.nan,
                          margin=math.nan, tolerance=BASE_TOLERANCE,
                          est_error=0.0, verdict="not_applicable",
                          inputs_digest=digest)


def _rep(state: PureState | MixedState,
         rep: Optional[RepresentationBundle]) -> RepresentationBundle:
    return rep if rep is not None else bundle(state)


# ---------------------------------------------------------------------------
# conjugate orders and the Beckner constant
# ---------------------------------------------------------------------------

def _order_log_term(t: float) -> float:
    """ln(t) / (t - 1) extended by continuity: 1 at t = 1, 0 at infinity."""
    if t == 1.0:
        return 1.0
    if math.isinf(t):
        return 0.0
    return math.log(t) / (t - 1.0)


def kappa(pair: OrderPair) -> float:
    """Beckner constant: kappa^2 = alpha^(1/(alpha-1)) gamma^(1/(gamma-1)).

    Continuous limits give kappa = 2 at gamma = 1/2 and kappa = e at the
    degenerate pair (1, 1).
    """
    return math.exp(0.5 * (_order_log_term(pair.alpha)
                           + _order_log_term(pair.gamma)))


def conjugate_order(alpha: float) -> OrderPair:
    """Pair alpha with gamma = alpha / (2 alpha - 1); alpha = 1 degenerates."""
    if alpha == 1.0:
        return OrderPair(1.0, 1.0)
    if not alpha > 1.0:
        raise InvalidParameterError("need alpha > 1 (or exactly 1)")
    if math.isinf(alpha):
        return OrderPair(math.inf, 0.5)
    return OrderPair(float(alpha), float(alpha / (2.0 * alpha - 1.0)))


# ---------------------------------------------------------------------------
# the correction term and its bounds
# ---------------------------------------------------------------------------

def correction_term(state: PureState | MixedState,
                    rep: Optional[RepresentationBundle] = None) -> float:
    """Mean of ln(1 + beta k^2) under the physical wavenumber density.

    Nonnegative, zero for beta = 0, and equal to H(K) - H(Q) by the exact
    density pushforward; the image-grid construction realizes that identity
    at the quadrature level.
    """
    mixed = as_mixed(state)
    if not mixed.params.deformed:
        return 0.0
    u = _rep(mixed, rep).u_k
    k = u.grid.nodes
    return float(u.grid.integrate(u.values * np.log1p(mixed.params.beta * k * k)))


@dataclass(frozen=True)
class LinearizationPoint:
    beta: float
    residual: float       # <ln(1 + beta k^2)> - beta <k^2>
    ratio: float          # residual / beta^2
    expected: float       # -<k^4>/2 at this beta


@dataclass(frozen=True)
class LinearizationReport:
    applicable: bool
    points: tuple[LinearizationPoint, ...]
    reason: str = ""


def correction_linearization_check(state: PureState,
                                   beta_list: Sequence[float]) -> LinearizationReport:
    """Small-beta check: the correction is beta <k^2> minus (beta^2/2) <k^4>.

    The state is rebuilt at every requested beta through its profile; states
    whose wavenumber density lacks a fourth moment get a not-applicable
    verdict rather than a number.
    """
    points = []
    for beta in beta_list:
        if beta == 0.0:
            points.append(LinearizationPoint(0.0, 0.0, 0.0, 0.0))
            continue
        st = rebuild_state(state, beta)
        rep = bundle(st)
        u = rep.u_k
        try:
            moment(u, 2)  # both moments must exist for the expansion
            k4 = moment(u, 4).value
        except MomentDivergenceError as exc:
            return LinearizationReport(applicable=False, points=(),
                                       reason=str(exc))
        k = u.grid.nodes
        integrand = np.log1p(beta * k * k) - beta * k * k
        residual = float(u.grid.integrate(u.values * integrand))
        points.append(LinearizationPoint(beta=beta, residual=residual,
                                         ratio=residual / beta ** 2,
                                         expected=-0.5 * k4))
    return LinearizationReport(applicable=True, points=tuple(points))


def check_jensen(state: PureState | MixedState,
                 rep: Optional[RepresentationBundle] = None,
                 label: str = "state") -> RelationReport:
    """Concavity bound: correction <= ln(1 + beta <k^2>) when <k^2> exists."""
    mixed = as_mixed(state)
    rep = _rep(mixed, rep)
    digest = _digest("correction_jensen", label, mixed.params.beta)
    try:
        k2 = moment(rep.u_k, 2)
    except MomentDivergenceError:
        return _not_applicable("correction_jensen", digest)
    corr = correction_term(mixed, rep)
    lhs = math.log1p(mixed.params.beta * k2.value)
    return _report("correction_jensen", lhs, corr,
                   k2.est_error * mixed.params.beta / (1.0 + mixed.params.beta * k2.value),
                   digest)


# ---------------------------------------------------------------------------
# variance-based bound
# ---------------------------------------------------------------------------

def robertson_margin(state: PureState | MixedState,
                     rep: Optional[RepresentationBundle] = None,
                     label: str = "state") -> RelationReport:
    """Deformed variance bound: dx dk >= (1 + beta <k^2>) / 2.

    Downgrades to not-applicable when either standard deviation diverges,
    which genuinely happens for Cauchy-type wavenumber densities.
    """
    mixed = as_mixed(state)
    rep = _rep(mixed, rep)
    digest = _digest("robertson_product", label, mixed.params.beta)
    try:
        k1, k2 = moment(rep.u_k, 1), moment(rep.u_k, 2)
        x1, x2 = moment(rep.w_x, 1), moment(rep.w_x, 2)
    except MomentDivergenceError:
        return _not_applicable("robertson_product", digest)
    var_k = k2.value - k1.value ** 2
    var_x = x2.value - x1.value ** 2
    if var_k <= 0.0 or var_x <= 0.0:
        return _not_applicable("robertson_product", digest)
    dk, dx = math.sqrt(var_k), math.sqrt(var_x)
    err = (x2.est_error + 2.0 * abs(x1.value) * x1.est_error) / (2.0 * dx) * dk \
        + (k2.est_error + 2.0 * abs(k1.value) * k1.est_error) / (2.0 * dk) * dx \
        + 0.5 * mixed.params.beta * k2.est_error
    lhs = dx * dk
    rhs = 0.5 * (1.0 + mixed.params.beta * k2.value)
    return _report("robertson_product", lhs, rhs, err, digest)


# ---------------------------------------------------------------------------
# Shannon relations
# ---------------------------------------------------------------------------

def check_bbm_corrected(state: PureState | MixedState,
                        rep: Optional[RepresentationBundle] = None,
                        label: str = "state") -> list[RelationReport]:
    """Fourier-pair bound and its minimal-length corrected form.

    The base relation is H(Q) + H(X) >= ln(e pi); replacing the auxiliary
    entropy by the physical one adds the correction term to the bound.
    """
    mixed = as_mixed(state)
    rep = _rep(mixed, rep)
    beta = mixed.params.beta
    hq = diff_shannon(rep.v_q)
    hx = diff_shannon(rep.w_x)
    hk = diff_shannon(rep.u_k)
    corr = correction_term(mixed, rep)
    base = _report("shannon_sum_base", hq.value + hx.value, LN_E_PI,
                   hq.est_error + hx.est_error,
                   _digest("shannon_sum_base", label, beta))
    corrected = _report("shannon_sum_corrected", hk.value + hx.value,
                        LN_E_PI + corr, hk.est_error + hx.est_error,
                        _digest("shannon_sum_corrected", label, beta))
    return [base, corrected]


def check_smeared_shannon(state: PureState | MixedState, f: AcceptanceFn,
                          g: AcceptanceFn,
                          rep: Optional[RepresentationBundle] = None,
                          smeared: Optional[tuple[DensityFn, DensityFn]] = None,
                          sf_value: Optional[float] = None,
                          label: str = "state") -> list[RelationReport]:
    """Smeared Shannon sums against the corrected and resolution bounds.

    The corrected bound survives smearing unchanged; the resolution bound
    replaces it by ln(e pi / S_f), which exceeds ln(e pi) once the momentum
    acceptance is wide enough that S_f < 1.
    """
    mixed = as_mixed(state)
    rep = _rep(mixed, rep)
    beta = mixed.params.beta
    if smeared is None:
        smeared = (smear(rep.u_k, f), smear(rep.w_x, g))
    u_s, w_s = smeared
    hm = diff_shannon(u_s)
    hn = diff_shannon(w_s)
    corr = correction_term(mixed, rep)
    sf = s_f(f, mixed.params) if sf_value is None else sf_value
    err = hm.est_error + hn.est_error
    lhs = hm.value + hn.value
    sig = f.width
    out = [
        _report("shannon_sum_smeared", lhs, LN_E_PI + corr, err,
                _digest("shannon_sum_smeared", label, beta, sigma=sig)),
        _report("shannon_sum_smeared_resolution", lhs, LN_E_PI - math.log(sf),
                err, _digest("shannon_sum_smeared_resolution", label, beta,
                             sigma=sig)),
    ]
    return out


def check_binning_lemma(density: DensityFn, edges: np.ndarray,
                        beta: float, label: str = "state",
                        axis: str = "k") -> RelationReport:
    """Discretization lemma: H(p) >= H(density) - ln(max bin width)."""
    dist = bin_density(density, edges)
    h_cont = diff_shannon(density)
    h_disc = discrete_renyi(dist, 1.0)
    rid = f"binning_lemma_{axis}"
    kw = {"delta_k" if axis == "k" else "delta_x": dist.delta_max}
    return _report(rid, h_disc.value, h_cont.value - math.log(dist.delta_max),
                   h_cont.est_error, _digest(rid, label, beta, **kw))


def check_binned_shannon(state: PureState | MixedState, bins_k: np.ndarray,
                         bins_x: np.ndarray,
                         rep: Optional[RepresentationBundle] = None,
                         label: str = "state") -> RelationReport:
    """Binned Shannon sum against ln(e pi / (dk dx)) plus the correction."""
    mixed = as_mixed(state)
    rep = _rep(mixed, rep)
    beta = mixed.params.beta
    pk = bin_density(rep.u_k, bins_k)
    px = bin_density(rep.w_x, bins_x)
    corr = correction_term(mixed, rep)
    lhs = discrete_renyi(pk, 1.0).value + discrete_renyi(px, 1.0).value
    rhs = LN_E_PI - math.log(pk.delta_max * px.delta_max) + corr
    return _report("shannon_sum_binned", lhs, rhs, 1e-10,
                   _digest("shannon_sum_binned", label, beta,
                           delta_k=pk.delta_max, delta_x=px.delta_max))


# ---------------------------------------------------------------------------
# Renyi and Tsallis relations
# ---------------------------------------------------------------------------

def check_beckner(state: PureState | MixedState, pair: OrderPair,
                  rep: Optional[RepresentationBundle] = None,
                  label: str = "state") -> list[RelationReport]:
    """Conjugate-norm inequalities between the auxiliary and position pair.

    In log form: ln ||w||_gamma - ((1-gamma)/gamma) ln(kappa pi) >= ln ||v||_alpha
    together with the twin obtained by swapping the two densities.  The
    degenerate (1, 1) pair dispatches to the base Shannon relation.
    """
    mixed = as_mixed(state)
    rep = _rep(mixed, rep)
    beta = mixed.params.beta
    if pair.degenerate:
        return [check_bbm_corrected(mixed, rep, label)[0]]
    kp = kappa(pair)
    expo = (1.0 - pair.gamma) / pair.gamma
    out = []
    for rid, big, small in (("beckner_qx", rep.w_x, rep.v_q),
                            ("beckner_xq", rep.v_q, rep.w_x)):
        digest = _digest(rid, label, beta, alpha=pair.alpha, gamma=pair.gamma)
        try:
            lhs = math.log(alpha_norm(big, pair.gamma)) - expo * math.log(kp * math.pi)
            rhs = math.log(alpha_norm(small, pair.alpha))
        except NormDivergenceError:
            out.append(_not_applicable(rid, digest))
            continue
        out.append(_report(rid, lhs, rhs, 1e-9, digest))
    return out


def _renyi_pair_reports(rid_prefix: str, label: str, beta: float, sigma,
                        pair: OrderPair, dens_m, dens_n, rhs: float,
                        renyi_fn, delta_k=None, delta_x=None) -> list[RelationReport]:
    """Entropy-sum reports for (alpha on M, gamma on N) and the swap."""
    out = []
    for rid, first, second in ((f"{rid_prefix}", dens_m, dens_n),
                               (f"{rid_prefix}_swapped", dens_n, dens_m)):
        digest = _digest(rid, label, beta, sigma=sigma, alpha=pair.alpha,
                         gamma=pair.gamma, delta_k=delta_k, delta_x=delta_x)
        try:
            ra = renyi_fn(first, pair.alpha)
            rg = renyi_fn(second, pair.gamma)
        except NormDivergenceError:
            out.append(_not_applicable(rid, digest))
            continue
        out.append(_report(rid, ra.value + rg.value, rhs,
                           ra.est_error + rg.est_error, digest))
    return out


def check_renyi_smeared(state: PureState | MixedState, f: AcceptanceFn,
                        g: AcceptanceFn, pair: OrderPair,
                        rep: Optional[RepresentationBundle] = None,
                        smeared: Optional[tuple[DensityFn, DensityFn]] = None,
                        sf_value: Optional[float] = None,
                        label: str = "state") -> list[RelationReport]:
    """Smeared Renyi sums and the norm-level forms they come from.

    R_alpha(M) + R_gamma(N) >= ln(kappa pi / S_f) for conjugate orders, the
    swapped assignment, and the two norm inequalities
    ||U||_alpha <= (S_f/(kappa pi))^((1-gamma)/gamma) ||W||_gamma (and twin).
    """
    mixed = as_mixed(state)
    rep = _rep(mixed, rep)
    beta = mixed.params.beta
    if smeared is None:
        smeared = (smear(rep.u_k, f), smear(rep.w_x, g))
    u_s, w_s = smeared
    sf = s_f(f, mixed.params) if sf_value is None else sf_value
    if pair.degenerate:
        return check_smeared_shannon(mixed, f, g, rep, smeared, sf, label)
    kp = kappa(pair)
    rhs = math.log(kp * math.pi / sf)
    out = _renyi_pair_reports("renyi_sum_smeared", label, beta, f.width, pair,
                              u_s, w_s, rhs, diff_renyi)
    expo = (1.0 - pair.gamma) / pair.gamma
    shift = expo * math.log(sf / (kp * math.pi))
    for rid, big, small in (("renyi_norm_smeared_uw", w_s, u_s),
                            ("renyi_norm_smeared_wu", u_s, w_s)):
        digest = _digest(rid, label, beta, sigma=f.width, alpha=pair.alpha,
                         gamma=pair.gamma)
        try:
            lhs = shift + math.log(alpha_norm(big, pair.gamma))
            rhs_n = math.log(alpha_norm(small, pair.alpha))
        except NormDivergenceError:
            out.append(_not_applicable(rid, digest))
            continue
        out.append(_report(rid, lhs, rhs_n, 1e-9, digest))
    return out


def check_renyi_binned(state: PureState | MixedState, f: AcceptanceFn,
                       g: AcceptanceFn, pair: OrderPair,
                       bins_zeta: np.ndarray, bins_xi: np.ndarray,
                       rep: Optional[RepresentationBundle] = None,
                       smeared: Optional[tuple[DensityFn, DensityFn]] = None,
                       sf_value: Optional[float] = None,
                       label: str = "state") -> list[RelationReport]:
    """Binned Renyi sums against ln(kappa pi / (S_f dzeta dxi)) plus norms."""
    mixed = as_mixed(state)
    rep = _rep(mixed, rep)
    beta = mixed.params.beta
    if smeared is None:
        smeared = (smear(rep.u_k, f), smear(rep.w_x, g))
    p_m = bin_density(smeared[0], bins_zeta)
    p_n = bin_density(smeared[1], bins_xi)
    sf = s_f(f, mixed.params) if sf_value is None else sf_value
    if pair.degenerate:
        lhs = discrete_renyi(p_m, 1.0).value + discrete_renyi(p_n, 1.0).value
        rhs = LN_E_PI - math.log(sf * p_m.delta_max * p_n.delta_max)
        return [_report("renyi_sum_binned", lhs, rhs, 1e-10,
                        _digest("renyi_sum_binned", label, beta, sigma=f.width,
                                alpha=1.0, gamma=1.0, delta_k=p_m.delta_max,
                                delta_x=p_n.delta_max))]
    kp = kappa(pair)
    rhs = math.log(kp * math.pi / (sf * p_m.delta_max * p_n.delta_max))
    out = _renyi_pair_reports("renyi_sum_binned", label, beta, f.width, pair,
                              p_m, p_n, rhs, discrete_renyi,
                              delta_k=p_m.delta_max, delta_x=p_n.delta_max)
    expo = (1.0 - pair.gamma) / pair.gamma
    shift = expo * math.log(sf * p_m.delta_max * p_n.delta_max / (kp * math.pi))
    for rid, big, small in (("renyi_norm_binned_mn", p_n, p_m),
                            ("renyi_norm_binned_nm", p_m, p_n)):
        digest = _digest(rid, label, beta, sigma=f.width, alpha=pair.alpha,
                         gamma=pair.gamma, delta_k=p_m.delta_max,
                         delta_x=p_n.delta_max)
        lhs = shift + math.log(discrete_norm(big, pair.gamma))
        rhs_n = math.log(discrete_norm(small, pair.alpha))
        out.append(_report(rid, lhs, rhs_n, 1e-12, digest))
    return out


def check_tsallis_binned(state: PureState | MixedState, f: AcceptanceFn,
                         g: AcceptanceFn, pair: OrderPair,
                         bins_zeta: np.ndarray, bins_xi: np.ndarray,
                         rep: Optional[RepresentationBundle] = None,
                         smeared: Optional[tuple[DensityFn, DensityFn]] = None,
                         sf_value: Optional[float] = None,
                         label: str = "state") -> list[RelationReport]:
    """Binned Tsallis sums against the deformed-log bound with nu = max order."""
    mixed = as_mixed(state)
    rep = _rep(mixed, rep)
    beta = mixed.params.beta
    if smeared is None:
        smeared = (smear(rep.u_k, f), smear(rep.w_x, g))
    p_m = bin_density(smeared[0], bins_zeta)
    p_n = bin_density(smeared[1], bins_xi)
    sf = s_f(f, mixed.params) if sf_value is None else sf_value
    kp = kappa(pair)
    nu = max(pair.alpha, pair.gamma)
    rhs = alpha_log(kp * math.pi / (sf * p_m.delta_max * p_n.delta_max), nu)
    out = []
    for rid, first, second in (("tsallis_sum_binned", p_m, p_n),
                               ("tsallis_sum_binned_swapped", p_n, p_m)):
        digest = _digest(rid, label, beta, sigma=f.width, alpha=pair.alpha,
                         gamma=pair.gamma, delta_k=p_m.delta_max,
                         delta_x=p_n.delta_max)
        lhs = discrete_tsallis(first, pair.alpha).value \
            + discrete_tsallis(second, pair.gamma).value
        out.append(_report(rid, lhs, rhs, 1e-12, digest))
    return out


def check_norm_ordering(dist: DiscreteDist, pair: OrderPair, beta: float,
                        label: str = "state") -> RelationReport:
    """Discrete norm ordering ||p||_alpha <= 1 <= ||p||_gamma for alpha>1>gamma.

    Both inequalities fold into one report: lhs is the smaller slack of the
    two, rhs is zero.
    """
    digest = _digest("discrete_norm_ordering", label, beta,
                     alpha=pair.alpha, gamma=pair.gamma,
                     delta_k=dist.delta_max)
    if pair.degenerate:
        return _report("discrete_norm_ordering", 0.0, 0.0, 0.0, digest)
    na = discrete_norm(dist, pair.alpha)
    ng = discrete_norm(dist, pair.gamma)
    slack = min(1.0 - na, ng - 1.0)
    return _report("discrete_norm_ordering", slack, 0.0, 1e-13, digest)
