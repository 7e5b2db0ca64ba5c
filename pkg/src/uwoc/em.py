"""Expectation-Maximization fitting of the two-lobe irradiance mixtures.

Alternates posterior responsibilities for the hidden component labels with
weighted maximum-likelihood updates of the component parameters.  The
Generalized Gamma M-step is derived directly from the expected complete-data
log-likelihood: with theta = b^c, the stationarity conditions eliminate the
shape a and scale theta, leaving a single root-solve in the power shape c.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy import optimize
from scipy import special as sp

from .distributions import (
    EggParams,
    EgParams,
    ExpLognormalParams,
    MixtureModel,
    WEIGHT_EPS,
)
from .errors import DataError, DegenerateComponentError, FitFailureError, MStepError

__all__ = [
    "EmConfig",
    "FitReport",
    "e_step",
    "m_step_gg",
    "m_step_exp",
    "update_omega",
    "log_likelihood",
    "fit",
]

# per-step slack on the ascent property, absorbing root-solve noise
ASCENT_SLACK = 1e-9

# responsibility mass below this (relative to n) freezes a component
_MASS_EPS = 1e-10

_C_BRACKET = (1e-2, 1e3)
_C_LIMITS = (1e-3, 2e4)


@dataclass(frozen=True)
class EmConfig:
    """Knobs of the EM driver.

    ``epsilon`` bounds the largest absolute parameter change at convergence;
    ``init_strategy`` is one of ``quantile_split`` (default: the exponential
    lobe seeds from the lowest-intensity quintile, matching its physical role
    as the blockage component), ``moments``, or ``user_supplied`` (requires
    ``init_params``).  ``lambda_update='literal'`` reproduces a published
    variant of the exponential-scale update that divides by the sum of
    intensities instead of the responsibility mass; it breaks the likelihood
    ascent guarantee and exists for comparison only.
    """

    epsilon: float = 1e-6
    max_iters: int = 500
    restarts: int = 3
    init_strategy: str = "quantile_split"
    seed: int = 0
    init_params: Optional[MixtureModel] = None
    lambda_update: str = "qmax"

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.max_iters < 1 or self.restarts < 1:
            raise ValueError("max_iters and restarts must be >= 1")
        if self.init_strategy not in ("quantile_split", "moments", "user_supplied"):
            raise ValueError(f"unknown init_strategy {self.init_strategy!r}")
        if self.init_strategy == "user_supplied" and self.init_params is None:
            raise ValueError("user_supplied initialization requires init_params")
        if self.lambda_update not in ("qmax", "literal"):
            raise ValueError("lambda_update must be 'qmax' or 'literal'")


@dataclass
class FitReport:
    """Result of one EM fit: the selected model plus convergence diagnostics."""

    model: MixtureModel
    loglik_trace: list[float]
    iterations: int
    converged: bool
    responsibilities_summary: dict
    scintillation_index: float
    restart_index: int = 0

    @property
    def loglik(self):
        return self.loglik_trace[-1]

    def to_dict(self):
        out = self.model.to_dict()
        out.update(
            loglik=self.loglik,
            iterations=self.iterations,
            converged=self.converged,
            scintillation_index=self.scintillation_index,
            responsibilities_summary=self.responsibilities_summary,
        )
        return out


def validate_samples(samples):
    """Samples as a float array; positive and finite or DataError with index."""
    arr = np.asarray(samples, dtype=float).ravel()
    if arr.size == 0:
        raise DataError("no samples given")
    bad = ~(np.isfinite(arr) & (arr > 0))
    if np.any(bad):
        idx = int(np.argmax(bad))
        raise DataError(
            f"sample {idx} is not a positive finite value ({arr[idx]!r})", index=idx
        )
    return arr


def log_likelihood(samples, model: MixtureModel):
    """Observed-data log-likelihood sum_i ln f(I_i)."""
    arr = validate_samples(samples)
    return float(np.sum(model.log_pdf(arr)))


def _resp_and_loglik(arr, params):
    """Responsibilities and observed-data log-likelihood in one density pass."""
    log_exp, log_second = params.component_log_pdfs(arr)
    log_mix = np.logaddexp(log_exp, log_second)
    if params.omega < WEIGHT_EPS:
        resp = np.zeros(arr.size)
    elif 1.0 - params.omega < WEIGHT_EPS:
        resp = np.ones(arr.size)
    else:
        resp = np.exp(log_exp - log_mix)
    return resp, float(log_mix.sum())


def e_step(samples, params: MixtureModel):
    """Posterior probability gamma_i that each sample came from the exponential lobe."""
    arr = validate_samples(samples)
    return _resp_and_loglik(arr, params)[0]


def update_omega(responsibilities):
    """Mixing weight as the mean responsibility."""
    resp = np.asarray(responsibilities, dtype=float)
    if resp.size == 0:
        raise DataError("no responsibilities given")
    return float(resp.mean())


def m_step_exp(samples, responsibilities, literal=False):
    """Weighted ML update of the exponential scale.

    The maximizer of the expected complete-data log-likelihood divides the
    responsibility-weighted intensity sum by the responsibility mass;
    ``literal=True`` divides by the plain intensity sum instead (comparison
    mode, not an ascent step).
    """
    arr = validate_samples(samples)
    resp = np.asarray(responsibilities, dtype=float)
    mass = resp.sum()
    if mass <= _MASS_EPS * arr.size:
        raise DegenerateComponentError("exponential component has no responsibility mass")
    denom = arr.sum() if literal else mass
    return float(np.dot(resp, arr) / denom)


def _gg_weighted_stats(log_i, weights, c):
    """(T_c/S_c, log S_c) for S_c = sum w I^c and T_c = sum w I^c ln I."""
    with np.errstate(divide="ignore"):
        t = c * log_i + np.log(weights)
    m = t.max()
    if not np.isfinite(m):
        raise DegenerateComponentError("second component has no responsibility mass")
    e = np.exp(t - m)
    s = e.sum()
    return float(np.dot(e, log_i) / s), float(m + math.log(s))


def _gg_profile(log_i, weights, w_total, lbar, c):
    """Joint-stationarity (a, log_theta, h) at a given power shape c."""
    ratio, log_s = _gg_weighted_stats(log_i, weights, c)
    spread = ratio - lbar
    if spread <= 0.0:
        raise DegenerateComponentError("samples are degenerate for the GG component")
    a = 1.0 / (c * spread)
    log_theta = log_s - math.log(a) - math.log(w_total)
    h = sp.digamma(a) + log_theta - c * lbar
    return a, log_theta, h


def m_step_gg(samples, responsibilities, c_hint=None):
    """Weighted Generalized Gamma ML update, returned as (a, b, c).

    Maximizes sum_i (1 - gamma_i) ln g(I_i; a, b, c).  The stationarity
    conditions give a and theta = b^c in terms of c, reducing the M-step to
    the root of a scalar function of c, bracketed around ``c_hint`` (or a
    default window) and expanded geometrically on failure.
    """
    arr = validate_samples(samples)
    weights = 1.0 - np.asarray(responsibilities, dtype=float)
    w_total = float(weights.sum())
    if w_total <= _MASS_EPS * arr.size:
        raise DegenerateComponentError("second component has no responsibility mass")
    log_i = np.log(arr)
    lbar = float(np.dot(weights, log_i) / w_total)

    def h(c):
        return _gg_profile(log_i, weights, w_total, lbar, c)[2]

    lo, hi = _C_BRACKET
    if c_hint is not None and np.isfinite(c_hint):
        lo = min(max(c_hint / 3.0, _C_LIMITS[0]), lo)
        hi = max(min(c_hint * 3.0, _C_LIMITS[1]), hi)
    h_lo, h_hi = h(lo), h(hi)
    while h_lo * h_hi > 0.0:
        grown = False
        if lo > _C_LIMITS[0]:
            lo = max(lo / 10.0, _C_LIMITS[0])
            h_lo = h(lo)
            grown = True
        if h_lo * h_hi > 0.0 and hi < _C_LIMITS[1]:
            hi = min(hi * 10.0, _C_LIMITS[1])
            h_hi = h(hi)
            grown = True
        if not grown:
            raise MStepError(
                f"could not bracket the power-shape root in [{_C_LIMITS[0]}, {_C_LIMITS[1]}]"
            )
    c = float(optimize.brentq(h, lo, hi, xtol=1e-11, rtol=1e-10))
    a, log_theta, _ = _gg_profile(log_i, weights, w_total, lbar, c)
    b = math.exp(min(max(log_theta / c, -700.0), 700.0))
    return a, b, c


def _gg_expected_loglik(log_i, weights, a, log_theta, c):
    """sum_i w_i ln g(I_i; a, theta^{1/c}, c), the Q contribution of the GG lobe."""
    t = c * log_i - log_theta
    power = np.exp(np.minimum(t, 700.0))
    terms = (
        math.log(c)
        + (a * c - 1.0) * log_i
        - a * log_theta
        - power
        - sp.gammaln(a)
    )
    return float(np.dot(weights, terms))


def _m_step_gg_bounded(samples, responsibilities):
    """Fallback GG M-step: bounded maximization of the profile Q over c.

    For each c the inner (a, theta) problem is the weighted Gamma ML in
    I^c, solved through the digamma equation; the outer search is a bounded
    scalar maximization.
    """
    arr = validate_samples(samples)
    weights = 1.0 - np.asarray(responsibilities, dtype=float)
    w_total = float(weights.sum())
    if w_total <= _MASS_EPS * arr.size:
        raise DegenerateComponentError("second component has no responsibility mass")
    log_i = np.log(arr)
    lbar = float(np.dot(weights, log_i) / w_total)

    def inner(c):
        _, log_s = _gg_weighted_stats(log_i, weights, c)
        spread = log_s - math.log(w_total) - c * lbar  # ln(mean I^c) - mean ln I^c >= 0
        if spread <= 0.0:
            raise DegenerateComponentError("samples are degenerate for the GG component")
        a = _solve_gamma_shape(spread)
        log_theta = log_s - math.log(a) - math.log(w_total)
        return a, log_theta

    def neg_q(log_c):
        c = math.exp(log_c)
        a, log_theta = inner(c)
        return -_gg_expected_loglik(log_i, weights, a, log_theta, c)

    res = optimize.minimize_scalar(
        neg_q, bounds=(math.log(_C_LIMITS[0]), math.log(_C_LIMITS[1])), method="bounded",
        options={"xatol": 1e-10},
    )
    c = math.exp(float(res.x))
    a, log_theta = inner(c)
    return a, math.exp(min(max(log_theta / c, -700.0), 700.0)), c


def _solve_gamma_shape(spread):
    """Shape a with ln a - digamma(a) = spread (> 0), the weighted Gamma ML equation."""
    if spread <= 0.0:
        raise DegenerateComponentError("zero spread in the Gamma shape equation")
    if spread < 1e-12:
        return 0.5 / spread  # ln a - psi(a) = 1/(2a) + O(1/a^2)
    # Minka's closed-form start, then a safeguarded bracketed polish;
    # ln a - psi(a) decreases from +inf to 0, so grow hi / shrink lo as needed
    a = (3.0 - spread + math.sqrt((spread - 3.0) ** 2 + 24.0 * spread)) / (12.0 * spread)
    a = min(max(a, 1e-12), 1e14)
    lo, hi = a, a
    for _ in range(200):
        if math.log(lo) - sp.digamma(lo) - spread >= 0.0:
            break
        lo /= 4.0
    for _ in range(200):
        if math.log(hi) - sp.digamma(hi) - spread <= 0.0:
            break
        hi *= 4.0
    return float(optimize.brentq(
        lambda x: math.log(x) - sp.digamma(x) - spread, lo, hi, xtol=1e-300, rtol=1e-13
    ))


def _m_step_gamma(samples, responsibilities):
    """Weighted Gamma ML update (shape via the digamma equation, scale closed form)."""
    arr = validate_samples(samples)
    weights = 1.0 - np.asarray(responsibilities, dtype=float)
    w_total = float(weights.sum())
    if w_total <= _MASS_EPS * arr.size:
        raise DegenerateComponentError("second component has no responsibility mass")
    mean = float(np.dot(weights, arr) / w_total)
    mean_log = float(np.dot(weights, np.log(arr)) / w_total)
    spread = math.log(mean) - mean_log
    alpha = _solve_gamma_shape(spread)
    return alpha, mean / alpha


def _m_step_lognormal(samples, responsibilities):
    """Weighted ML update of the Lognormal lobe: mean/variance of ln I."""
    arr = validate_samples(samples)
    weights = 1.0 - np.asarray(responsibilities, dtype=float)
    w_total = float(weights.sum())
    if w_total <= _MASS_EPS * arr.size:
        raise DegenerateComponentError("second component has no responsibility mass")
    log_i = np.log(arr)
    mu = float(np.dot(weights, log_i) / w_total)
    sigma2 = float(np.dot(weights, (log_i - mu) ** 2) / w_total)
    if sigma2 <= 0.0:
        raise DegenerateComponentError("zero log-variance in the Lognormal lobe")
    return mu, sigma2


# ---------------------------------------------------------------------------
# Initialization
# ---------------------------------------------------------------------------

def _gg_moment_init(values):
    """Method-of-moments (a, b) at fixed c = 2: values^2 is then Gamma(a, b^2)."""
    squared = values**2
    mean = float(squared.mean())
    var = float(squared.var())
    if var <= 0.0 or mean <= 0.0:
        return 1.0, math.sqrt(max(mean, 1e-12))
    a = min(max(mean**2 / var, 1e-3), 1e4)
    return a, math.sqrt(mean / a)


def _initial_params(samples, variant, cfg: EmConfig):
    if cfg.init_strategy == "user_supplied":
        if cfg.init_params.variant != variant:
            raise ValueError(
                f"init_params is a {cfg.init_params.variant!r} model, expected {variant!r}"
            )
        return cfg.init_params

    if cfg.init_strategy == "quantile_split":
        split = np.quantile(samples, 0.2)
        low = samples[samples <= split]
        high = samples[samples > split]
        if low.size == 0 or high.size == 0:
            low = high = samples
        omega, lam = 0.2, float(low.mean())
    else:  # moments
        high = samples
        omega, lam = 0.5, float(samples.mean())

    if variant == "egg":
        a, b = _gg_moment_init(high)
        return EggParams(omega, lam, a, b, 2.0)
    if variant == "eg":
        mean = float(high.mean())
        var = float(high.var())
        alpha = min(max(mean**2 / var, 1e-3), 1e6) if var > 0 else 1.0
        return EgParams(omega, lam, alpha, mean / alpha)
    log_high = np.log(high)
    mu = float(log_high.mean())
    sigma2 = max(float(log_high.var()), 1e-6)
    return ExpLognormalParams(omega, lam, mu, sigma2)


def _perturb(params, rng):
    """Multiplicative log-normal jitter for restart diversification."""
    factor = lambda: float(rng.lognormal(0.0, 0.3))
    omega = min(max(params.omega * factor(), 1e-3), 1.0 - 1e-3)
    if isinstance(params, EggParams):
        return EggParams(
            omega, params.lam * factor(), params.a * factor(),
            params.b * factor(), params.c * factor(),
        )
    if isinstance(params, EgParams):
        return EgParams(omega, params.lam * factor(), params.alpha * factor(),
                        params.beta * factor())
    return ExpLognormalParams(
        omega, params.lam * factor(),
        params.mu + float(rng.normal(0.0, 0.3 * (abs(params.mu) + 0.1))),
        params.sigma2 * factor(),
    )


def _param_vector(params):
    if isinstance(params, EggParams):
        return np.array([params.a, params.b, params.c, params.lam, params.omega])
    if isinstance(params, EgParams):
        return np.array([params.alpha, params.beta, params.lam, params.omega])
    return np.array([params.mu, params.sigma2, params.lam, params.omega])


# ---------------------------------------------------------------------------
# Driver
# ---------------------------------------------------------------------------

def _gg_update(samples, resp, params: EggParams):
    """GG lobe M-step with the Q-ascent guarantee.

    Tries the scalar root-solve first, falls back to the bounded profile
    search, and keeps the previous (a, b, c) when neither candidate improves
    the lobe's expected log-likelihood (the root function can pick up
    spurious roots on near-degenerate data).
    """
    log_i = np.log(samples)
    weights = 1.0 - resp

    def q_of(triple):
        a, b, c = triple
        return _gg_expected_loglik(log_i, weights, a, c * math.log(b), c)

    q_prev = q_of((params.a, params.b, params.c))
    root = None
    try:
        root = m_step_gg(samples, resp, c_hint=params.c)
    except MStepError:
        pass
    if root is not None:
        q_root = q_of(root)
        if q_root >= q_prev:
            return replace(params, a=root[0], b=root[1], c=root[2])
        if q_root >= q_prev - ASCENT_SLACK:
            return params  # converged plateau; nothing to gain
    # bracketing failed or the root was spurious: bounded profile search
    triple = _m_step_gg_bounded(samples, resp)
    if q_of(triple) > q_prev:
        return replace(params, a=triple[0], b=triple[1], c=triple[2])
    return params


def _second_lobe_update(samples, resp, params, variant):
    """M-step of the non-exponential lobe; returns an updated params object."""
    if variant == "egg":
        return _gg_update(samples, resp, params)
    if variant == "eg":
        alpha, beta = _m_step_gamma(samples, resp)
        return replace(params, alpha=alpha, beta=beta)
    mu, sigma2 = _m_step_lognormal(samples, resp)
    return replace(params, mu=mu, sigma2=sigma2)


def _em_once(samples, variant, cfg: EmConfig, params):
    """One EM run from the given initial parameters."""
    literal = cfg.lambda_update == "literal"
    resp, ll = _resp_and_loglik(samples, params)
    trace = [ll]
    converged = False
    iterations = 0

    for iterations in range(1, cfg.max_iters + 1):
        prev_vec = _param_vector(params)
        prev_ll = trace[-1]

        candidate = params
        # exponential lobe and weight
        try:
            lam = m_step_exp(samples, resp, literal=literal)
            candidate = replace(candidate, lam=lam)
        except DegenerateComponentError:
            pass  # lobe frozen; omega decides its weight
        omega = min(max(update_omega(resp), 0.0), 1.0)
        candidate = replace(candidate, omega=omega)
        # second lobe (per-component Q acceptance keeps this an ascent step)
        try:
            candidate = _second_lobe_update(samples, resp, candidate, variant)
        except DegenerateComponentError:
            pass

        new_resp, ll = _resp_and_loglik(samples, candidate)
        if not literal and ll < prev_ll - ASCENT_SLACK:
            # should not happen with per-component acceptance; stop cleanly
            iterations -= 1
            converged = True
            break

        params, resp = candidate, new_resp
        trace.append(ll)
        if float(np.max(np.abs(_param_vector(params) - prev_vec))) <= cfg.epsilon:
            converged = True
            break

    return params, trace, iterations, converged, resp


def fit(samples, variant="egg", cfg: EmConfig = EmConfig()):
    """Fit one mixture variant by EM with random restarts.

    Runs ``cfg.restarts`` independent EM chains (the first from the plain
    initialization, later ones from jittered copies), and returns the
    :class:`FitReport` with the highest final log-likelihood, ties broken by
    the lowest restart index.
    """
    if variant not in ("egg", "eg", "explognormal"):
        raise ValueError(f"unknown variant {variant!r}")
    arr = validate_samples(samples)
    if arr.size < 100:
        warnings.warn(
            f"only {arr.size} samples; mixture estimates will be unstable",
            UserWarning,
            stacklevel=2,
        )

    base_init = _initial_params(arr, variant, cfg)
    best = None
    diagnostics = []
    for k in range(cfg.restarts):
        rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(k,)))
        init = base_init if k == 0 else _perturb(base_init, rng)
        try:
            params, trace, iterations, converged, resp = _em_once(arr, variant, cfg, init)
        except (DegenerateComponentError, MStepError) as exc:
            diagnostics.append(f"restart {k}: {exc}")
            continue
        final_ll = trace[-1]
        if not math.isfinite(final_ll):
            diagnostics.append(f"restart {k}: non-finite log-likelihood")
            continue
        report = FitReport(
            model=params,
            loglik_trace=trace,
            iterations=iterations,
            converged=converged,
            responsibilities_summary={
                "mean": float(resp.mean()),
                "min": float(resp.min()),
                "max": float(resp.max()),
            },
            scintillation_index=float(params.scintillation_index()),
            restart_index=k,
        )
        if best is None or report.loglik > best.loglik:
            best = report
    if best is None:
        raise FitFailureError("every EM restart ended degenerate", diagnostics=diagnostics)
    return best
