"""Continuous five-compartment scam-propagation model.

Compartments: susceptible (S), victims (V), recovered victims (R),
active scammers (As), removed scammers (Rs). The vector field is

    dS/dt  = -beta*S*As + sigma*R
    dV/dt  =  beta*S*As - gamma*V - psi*V
    dR/dt  =  gamma*V - sigma*R
    dAs/dt =  delta*As - mu*As - lambda*As + psi*V
    dRs/dt =  lambda*As

so that dN/dt = (delta - mu)*As. This module holds the vector field and
its scheme-independent derived quantities: the basic reproduction number,
next-generation matrices, scam-free-equilibrium stability, and the two
Lyapunov functions used for stability certification.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDenominator, NonPositiveComponent, SingularV

PARAM_NAMES = ("beta", "sigma", "gamma", "psi", "delta", "mu", "lambda")


@dataclass(frozen=True)
class Parameters:
    """The seven nonnegative model rates (per day; beta per individual*day)."""

    beta: float       # susceptible -> victim, per active scammer
    sigma: float      # recovered -> susceptible
    gamma: float      # victim -> recovered
    psi: float        # victim -> active scammer
    delta: float      # scammer recruitment
    mu: float         # scammer voluntary quit
    lam: float        # scammer arrest

    def __post_init__(self):
        for name in PARAM_NAMES:
            if self._field(name) < 0:
                raise ValueError(f"parameter {name} must be nonnegative")

    def _field(self, name: str) -> float:
        return getattr(self, "lam" if name == "lambda" else name)

    def as_array(self) -> np.ndarray:
        """(beta, sigma, gamma, psi, delta, mu, lambda) as a float vector."""
        return np.array([self.beta, self.sigma, self.gamma, self.psi,
                         self.delta, self.mu, self.lam], dtype=float)

    @classmethod
    def from_array(cls, a) -> "Parameters":
        b, s, g, p, d, m, l = (float(x) for x in a)
        return cls(beta=b, sigma=s, gamma=g, psi=p, delta=d, mu=m, lam=l)

    @property
    def net_removal(self) -> float:
        """mu + lambda - delta: net per-capita decay rate of scammers."""
        return self.mu + self.lam - self.delta


# Posterior-mean rates from the Canadian fraud-report calibration; the
# toolkit's nominal operating point.
NOMINAL_PARAMS = Parameters(
    beta=0.008425,
    sigma=0.023868,
    gamma=0.059366,
    psi=0.000004,
    delta=0.026109,
    mu=0.016590,
    lam=0.016003,
)


@dataclass(frozen=True)
class State:
    """Compartment counts at one instant; all components nonnegative."""

    s: float
    v: float
    r: float
    a_s: float
    r_s: float

    def __post_init__(self):
        for name in ("s", "v", "r", "a_s", "r_s"):
            if getattr(self, name) < 0:
                raise ValueError(f"compartment {name} must be nonnegative")

    def as_array(self) -> np.ndarray:
        return np.array([self.s, self.v, self.r, self.a_s, self.r_s], dtype=float)

    @classmethod
    def from_array(cls, a) -> "State":
        s, v, r, a_s, r_s = (float(x) for x in a)
        return cls(s=s, v=v, r=r, a_s=a_s, r_s=r_s)

    @property
    def total(self) -> float:
        return self.s + self.v + self.r + self.a_s + self.r_s


def sfe(n: float) -> State:
    """Scam-free equilibrium (N, 0, 0, 0, 0)."""
    return State(s=n, v=0.0, r=0.0, a_s=0.0, r_s=0.0)


class StabilityClass(enum.Enum):
    STABLE_SFE = "StableSFE"
    UNSTABLE_SFE = "UnstableSFE"
    THRESHOLD = "Threshold"


@dataclass(frozen=True)
class StabilityReport:
    r0: float
    p1: float                     # -(gamma + psi)
    p2: float                     # delta - mu - lambda
    discriminant: float
    eigenvalue_pair: tuple[float, float]
    classification: StabilityClass


@dataclass(frozen=True)
class NextGenMatrices:
    f: np.ndarray                 # 2x2 new-scam-appearance matrix
    v: np.ndarray                 # 2x2 transition matrix
    k: np.ndarray                 # F V^{-1}
    spectral_radius: float


def rhs(state: State, params: Parameters) -> np.ndarray:
    """Vector field of the model; components sum to (delta - mu)*As."""
    s, v, r, a_s, _ = state.s, state.v, state.r, state.a_s, state.r_s
    p = params
    infection = p.beta * s * a_s
    return np.array([
        -infection + p.sigma * r,
        infection - p.gamma * v - p.psi * v,
        p.gamma * v - p.sigma * r,
        p.delta * a_s - p.mu * a_s - p.lam * a_s + p.psi * v,
        p.lam * a_s,
    ])


def reproduction_number(params: Parameters, n: float) -> float:
    """Closed-form R0 = beta*psi*N / ((gamma+psi)(mu+lambda-delta)).

    The value is returned signed when mu+lambda < delta (supercritical
    scammer recruitment); only the zero denominators are errors.
    """
    gp = params.gamma + params.psi
    net = params.net_removal
    if gp == 0.0 or net == 0.0:
        raise DegenerateDenominator(
            "R0 undefined: gamma+psi and mu+lambda-delta must be nonzero")
    return params.beta * params.psi * n / (gp * net)


def next_generation_matrix(params: Parameters, n: float) -> NextGenMatrices:
    """F, V and K = F V^{-1} for the (V, As) scammed block at the SFE."""
    gp = params.gamma + params.psi
    net = params.net_removal
    f = np.array([[0.0, params.beta * n],
                  [0.0, 0.0]])
    v = np.array([[gp, 0.0],
                  [-params.psi, net]])
    det = gp * net
    if det == 0.0:
        raise SingularV("transition matrix V is singular")
    k = f @ np.linalg.inv(v)
    spectral_radius = max(abs(np.linalg.eigvals(k)))
    return NextGenMatrices(f=f, v=v, k=k, spectral_radius=float(spectral_radius))


def classify_sfe_stability(params: Parameters, n: float,
                           tol: float = 1e-9) -> StabilityReport:
    """Linear stability of the SFE from the nontrivial 2x2 Jacobian block.

    The characteristic quadratic is e^2 - (p1+p2)e + (p1*p2 - beta*N*psi) = 0
    with p1 = -(gamma+psi), p2 = delta-mu-lambda; its discriminant
    (p1-p2)^2 + 4*beta*N*psi is never negative, so both roots are real.
    """
    gp = params.gamma + params.psi
    if gp <= 0.0:
        raise DegenerateDenominator("classification requires gamma+psi > 0")
    p1 = -gp
    p2 = params.delta - params.mu - params.lam
    bnp = params.beta * n * params.psi
    disc = (p1 - p2) ** 2 + 4.0 * bnp
    sq = math.sqrt(disc)
    roots = ((p1 + p2 - sq) / 2.0, (p1 + p2 + sq) / 2.0)
    r0 = reproduction_number(params, n)
    if abs(r0 - 1.0) <= tol * max(1.0, abs(r0)):
        cls = StabilityClass.THRESHOLD
    elif roots[1] < 0.0:
        cls = StabilityClass.STABLE_SFE
    else:
        cls = StabilityClass.UNSTABLE_SFE
    return StabilityReport(r0=r0, p1=p1, p2=p2, discriminant=disc,
                           eigenvalue_pair=roots, classification=cls)


def lyapunov_L(state: State, params: Parameters, a2: float = 1.0) -> float:
    """Linear Lyapunov function a1*V + a2*As with a1 = a2*psi/(gamma+psi).

    Nonnegative, zero exactly when V = As = 0; non-increasing along
    trajectories in the subcritical regime.
    """
    gp = params.gamma + params.psi
    if gp <= 0.0:
        raise DegenerateDenominator("lyapunov_L requires gamma+psi > 0")
    if a2 <= 0.0:
        raise ValueError("a2 must be positive")
    a1 = a2 * params.psi / gp
    return a1 * state.v + a2 * state.a_s


def lyapunov_M(state: State, reference: State) -> float:
    """Volterra-type function sum_i (C_i/C_i* - ln(C_i/C_i*) - 1).

    Both states must be strictly positive componentwise; the value is
    nonnegative and vanishes only at state == reference.
    """
    x = state.as_array()
    x_star = reference.as_array()
    if np.any(x <= 0.0) or np.any(x_star <= 0.0):
        raise NonPositiveComponent(
            "lyapunov_M requires strictly positive compartments")
    ratio = x / x_star
    return float(np.sum(ratio - np.log(ratio) - 1.0))


def see_condition(params: Parameters, n: float) -> float:
    """R0 - 1: negative in the scam-free regime, positive in the endemic one."""
    return reproduction_number(params, n) - 1.0
