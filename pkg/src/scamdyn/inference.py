"""Bayesian calibration of the model rates against monthly victim counts.

The sampler is delayed-rejection adaptive Metropolis: a multivariate
Gaussian random walk whose covariance is re-estimated from the chain
history every adapt_interval sweeps (scaled by 2.38^2/d), with an
optional second-stage proposal shrunk by a fixed factor after a first
rejection. The likelihood is the Gaussian sum-of-squares error between
observed and simulated victim counts; the observation error variance is
either fixed or given a conjugate inverse-gamma update each sweep.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyChain
from .integrators import Scheme, StepConfig, simulate
from .model import PARAM_NAMES, Parameters, State
from .observe import LIKELIHOOD_STEP, PREVALENCE, simulate_observable

PROPOSAL_SCALE = 2.38 ** 2 / 7.0       # optimal random-walk scaling, d = 7
DR_SHRINK = 0.2                        # second-stage proposal shrink factor

# Default 95% posterior interval for each rate, used to build prior bounds.
_QUANTILES_95 = np.array([
    [0.005, 0.012],        # beta
    [0.015, 0.035],        # sigma
    [0.035, 0.090],        # gamma
    [0.000001, 0.00001],   # psi
    [0.015, 0.040],        # delta
    [0.010, 0.025],        # mu
    [0.009, 0.025],        # lambda
])


class AllRejectedWarning(UserWarning):
    """Acceptance rate below 1%: the initial proposal scale is likely off."""


@dataclass(frozen=True)
class PriorBounds:
    """Componentwise uniform prior box over the seven rates."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo, hi = np.asarray(self.lower, float), np.asarray(self.upper, float)
        if lo.shape != (7,) or hi.shape != (7,):
            raise ValueError("bounds must have 7 entries")
        if np.any(lo < 0) or np.any(lo >= hi):
            raise ValueError("need 0 <= lower < upper per parameter")

    @classmethod
    def default(cls) -> "PriorBounds":
        # fitted 95% intervals widened by x0.5 / x2
        return cls(lower=0.5 * _QUANTILES_95[:, 0],
                   upper=2.0 * _QUANTILES_95[:, 1])

    def contains(self, x: np.ndarray) -> bool:
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))


@dataclass(frozen=True)
class FixedSigma:
    sigma2: float


@dataclass(frozen=True)
class SampledSigma:
    """Conjugate inverse-gamma error variance: prior IG(n0/2, n0*s20/2)."""

    n0: float = 1.0
    s20: float = 1.0


@dataclass(frozen=True)
class FitConfig:
    init_params: Parameters
    init_state: State
    obs_times: np.ndarray
    iterations: int = 10000
    adapt_interval: int = 100
    dr_stages: int = 2
    seed: int = 0
    error_model: FixedSigma | SampledSigma = field(default_factory=SampledSigma)
    observable: str = PREVALENCE
    h: float = LIKELIHOOD_STEP
    record_decisions: bool = False

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be positive")
        if self.dr_stages not in (1, 2):
            raise ValueError("dr_stages must be 1 or 2")
        times = np.asarray(self.obs_times, float)
        if np.any(np.diff(times) <= 0):
            raise ValueError("obs_times must be strictly increasing")


@dataclass
class Chain:
    samples: np.ndarray                   # (iterations, 7)
    log_posteriors: np.ndarray            # (iterations,)
    sigma2_samples: np.ndarray            # (iterations,)
    accept_count: int
    proposal_covariance_final: np.ndarray  # (7, 7)
    decisions: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def acceptance_rate(self) -> float:
        return self.accept_count / len(self.samples)


@dataclass(frozen=True)
class PosteriorSummary:
    """Per-parameter mean and central 95% interval (linear-interp quantiles)."""

    means: np.ndarray
    q025: np.ndarray
    q975: np.ndarray


def sum_of_squares(params: Parameters, init: State, obs_times, obs_values,
                   observable: str = PREVALENCE,
                   h: float = LIKELIHOOD_STEP) -> float:
    """SSE between observed counts and the simulated observable."""
    predicted = simulate_observable(params, init, obs_times, observable, h)
    resid = np.asarray(obs_values, float) - predicted
    return float(resid @ resid)


def log_posterior(params: Parameters, sigma2: float, init: State,
                  obs_times, obs_values, bounds: PriorBounds,
                  observable: str = PREVALENCE,
                  h: float = LIKELIHOOD_STEP) -> float:
    """-SSE/(2 sigma2) - (m/2) ln sigma2, or -inf outside the prior box."""
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    if not bounds.contains(params.as_array()):
        return -np.inf
    sse = sum_of_squares(params, init, obs_times, obs_values, observable, h)
    m = len(np.asarray(obs_values))
    return -sse / (2.0 * sigma2) - 0.5 * m * np.log(sigma2)


def _lp(sse: float, sigma2: float, m: int) -> float:
    return -sse / (2.0 * sigma2) - 0.5 * m * np.log(sigma2)


def run_dram(cfg: FitConfig, obs_values, bounds: PriorBounds) -> Chain:
    """Sample the posterior; fully deterministic given cfg.seed."""
    obs_values = np.asarray(obs_values, float)
    obs_times = np.asarray(cfg.obs_times, float)
    m = len(obs_values)
    if m == 0:
        raise ValueError("empty observation vector")
    rng = np.random.default_rng(cfg.seed)
    width = bounds.upper - bounds.lower

    def sse_of(x: np.ndarray) -> float:
        return sum_of_squares(Parameters.from_array(x), cfg.init_state,
                              obs_times, obs_values, cfg.observable, cfg.h)

    x = cfg.init_params.as_array()
    if not bounds.contains(x):
        raise ValueError("init_params outside prior bounds")
    sse_x = sse_of(x)

    if isinstance(cfg.error_model, FixedSigma):
        sigma2 = cfg.error_model.sigma2
    else:
        sigma2 = cfg.error_model.s20
    lp_x = _lp(sse_x, sigma2, m)

    cov = np.diag((width / 50.0) ** 2)
    chol = np.linalg.cholesky(cov)

    samples = np.empty((cfg.iterations, 7))
    log_posts = np.empty(cfg.iterations)
    sigma2s = np.empty(cfg.iterations)
    decisions = []
    accept_count = 0

    def eval_point(y: np.ndarray):
        """(sse, log-posterior) with -inf outside the prior box."""
        if not bounds.contains(y):
            return np.inf, -np.inf
        s = sse_of(y)
        return s, _lp(s, sigma2, m)

    for i in range(cfg.iterations):
        z = rng.standard_normal(7)
        y1 = x + chol @ z
        sse_y1, lp_y1 = eval_point(y1)
        log_u = np.log(rng.random())
        log_a1 = lp_y1 - lp_x
        accepted = log_u < log_a1
        if cfg.record_decisions:
            decisions.append((lp_x, lp_y1, log_u, bool(accepted)))
        if accepted:
            x, sse_x, lp_x = y1, sse_y1, lp_y1
            accept_count += 1
        elif cfg.dr_stages == 2:
            # second-stage try with a shrunk proposal; the acceptance
            # probability keeps the composite kernel reversible
            z2 = rng.standard_normal(7)
            y2 = x + DR_SHRINK * (chol @ z2)
            sse_y2, lp_y2 = eval_point(y2)
            if np.isfinite(lp_y2):
                cov_inv = np.linalg.inv(cov)

                def q1(a, b):
                    d = b - a
                    return -0.5 * d @ cov_inv @ d

                a_y2_y1 = min(0.0, lp_y1 - lp_y2)   # log alpha1(y2 -> y1)
                a_x_y1 = min(0.0, lp_y1 - lp_x)     # log alpha1(x -> y1)
                with np.errstate(divide="ignore"):
                    log_num = lp_y2 + q1(y2, y1) + np.log1p(-np.exp(a_y2_y1))
                    log_den = lp_x + q1(x, y1) + np.log1p(-np.exp(a_x_y1))
                log_a2 = log_num - log_den
                if np.isfinite(log_a2) and np.log(rng.random()) < log_a2:
                    x, sse_x, lp_x = y2, sse_y2, lp_y2
                    accept_count += 1

        if isinstance(cfg.error_model, SampledSigma):
            em = cfg.error_model
            shape = 0.5 * (em.n0 + m)
            scale = 0.5 * (em.n0 * em.s20 + sse_x)
            sigma2 = scale / rng.gamma(shape)
            lp_x = _lp(sse_x, sigma2, m)

        samples[i] = x
        log_posts[i] = lp_x
        sigma2s[i] = sigma2

        if (i + 1) % cfg.adapt_interval == 0 and i >= 9:
            hist = samples[: i + 1]
            emp = np.cov(hist.T) if len(hist) > 1 else np.zeros((7, 7))
            cand = PROPOSAL_SCALE * (emp + 1e-12 * np.diag(width ** 2))
            try:
                chol_new = np.linalg.cholesky(cand)
            except np.linalg.LinAlgError:
                chol_new = None
            if chol_new is not None:
                cov, chol = cand, chol_new

    if accept_count < 0.01 * cfg.iterations:
        warnings.warn("acceptance rate below 1%; initial proposal scale "
                      "is likely mis-set", AllRejectedWarning)
    return Chain(samples=samples, log_posteriors=log_posts,
                 sigma2_samples=sigma2s, accept_count=accept_count,
                 proposal_covariance_final=cov, decisions=decisions)


def summarize(chain: Chain, burn_in_fraction: float = 0.0) -> PosteriorSummary:
    """Mean and 2.5/97.5% quantiles over post-burn-in samples."""
    if not 0.0 <= burn_in_fraction < 1.0:
        raise ValueError("burn_in_fraction must be in [0, 1)")
    start = int(burn_in_fraction * len(chain))
    kept = chain.samples[start:]
    if len(kept) == 0:
        raise EmptyChain("no samples after burn-in")
    return PosteriorSummary(
        means=kept.mean(axis=0),
        q025=np.quantile(kept, 0.025, axis=0, method="linear"),
        q975=np.quantile(kept, 0.975, axis=0, method="linear"),
    )


@dataclass(frozen=True)
class PredictiveBand:
    """Pointwise 2.5%/mean/97.5% of simulated victim counts."""

    times: np.ndarray
    lower: np.ndarray
    mean: np.ndarray
    upper: np.ndarray


def posterior_predictive(chain: Chain, n_draws: int, init: State,
                         horizon: float, seed: int = 0,
                         burn_in_fraction: float = 0.0,
                         h: float = 1.0) -> PredictiveBand:
    """Simulate V(t) for parameter rows drawn uniformly from the chain."""
    start = int(burn_in_fraction * len(chain))
    kept = chain.samples[start:]
    if len(kept) == 0:
        raise EmptyChain("no samples after burn-in")
    if n_draws > len(kept):
        raise ValueError("n_draws exceeds post-burn-in chain length")
    rng = np.random.default_rng(seed)
    rows = rng.integers(0, len(kept), size=n_draws)
    cfg = StepConfig(h=h, t_end=horizon, scheme=Scheme.NSFD)
    curves = []
    times = None
    for row in rows:
        traj = simulate(init, Parameters.from_array(kept[row]), cfg)
        times = traj.times
        curves.append(traj.v)
    curves = np.array(curves)
    return PredictiveBand(
        times=times,
        lower=np.quantile(curves, 0.025, axis=0, method="linear"),
        mean=curves.mean(axis=0),
        upper=np.quantile(curves, 0.975, axis=0, method="linear"),
    )


def chain_to_csv(chain: Chain, path) -> None:
    header = "iter," + ",".join(PARAM_NAMES) + ",sigma2,log_post"
    with open(path, "w", newline="\n") as fh:
        fh.write(header + "\n")
        for i in range(len(chain)):
            cells = ",".join(f"{x:.17g}" for x in chain.samples[i])
            fh.write(f"{i},{cells},{chain.sigma2_samples[i]:.17g},"
                     f"{chain.log_posteriors[i]:.17g}\n")


def summary_to_csv(summary: PosteriorSummary, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write("parameter,mean,q025,q975\n")
        for j, name in enumerate(PARAM_NAMES):
            fh.write(f"{name},{summary.means[j]:.17g},"
                     f"{summary.q025[j]:.17g},{summary.q975[j]:.17g}\n")


def band_to_csv(band: PredictiveBand, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write("t,lower,mean,upper\n")
        for i in range(len(band.times)):
            fh.write(f"{band.times[i]:.17g},{band.lower[i]:.17g},"
                     f"{band.mean[i]:.17g},{band.upper[i]:.17g}\n")
