"""Time stepping for the scam model.

Two schemes: the positivity-preserving compact scheme with the
nonstandard denominator theta(h), and a classical fixed-step RK4
reference integrator for cross-validation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import NonFiniteState
from .model import Parameters, State

MAX_STORED_POINTS = 1_000_000


class Scheme(enum.Enum):
    NSFD = "nsfd"
    REFERENCE_RK = "reference"


@dataclass(frozen=True)
class StepConfig:
    """Fixed-step integration settings.

    rs_from_next selects the removed-scammer update variant: True uses
    As_{k+1} (the compact form, positivity-proven default), False uses
    As_k.
    """

    h: float
    t_end: float
    scheme: Scheme = Scheme.NSFD
    rs_from_next: bool = True

    def __post_init__(self):
        if self.h <= 0:
            raise ValueError("step size h must be positive")
        if self.t_end < self.h:
            raise ValueError("t_end must be at least one step")


@dataclass(frozen=True)
class Trajectory:
    """Discrete orbit: times (uniform grid from 0) and states row-per-time."""

    times: np.ndarray             # (n,) strictly increasing, starts at 0
    states: np.ndarray            # (n, 5) columns S, V, R, As, Rs
    scheme: Scheme
    params: Parameters

    def __len__(self) -> int:
        return len(self.times)

    def state_at(self, i: int) -> State:
        return State.from_array(self.states[i])

    @property
    def s(self) -> np.ndarray:
        return self.states[:, 0]

    @property
    def v(self) -> np.ndarray:
        return self.states[:, 1]

    @property
    def r(self) -> np.ndarray:
        return self.states[:, 2]

    @property
    def a_s(self) -> np.ndarray:
        return self.states[:, 3]

    @property
    def r_s(self) -> np.ndarray:
        return self.states[:, 4]

    @property
    def totals(self) -> np.ndarray:
        return self.states.sum(axis=1)

    def sample(self, times) -> np.ndarray:
        """States linearly interpolated at the requested times, shape (m, 5)."""
        times = np.asarray(times, dtype=float)
        if times.min() < self.times[0] or times.max() > self.times[-1] + 1e-12:
            raise ValueError("requested times outside the simulated horizon")
        out = np.empty((len(times), 5))
        for j in range(5):
            out[:, j] = np.interp(times, self.times, self.states[:, j])
        return out

    def to_csv(self, path) -> None:
        """Write `t,S,V,R,As,Rs` rows at full double precision, LF endings."""
        with open(path, "w", newline="\n") as fh:
            fh.write("t,S,V,R,As,Rs\n")
            for t, row in zip(self.times, self.states):
                cells = ",".join(f"{x:.17g}" for x in row)
                fh.write(f"{t:.17g},{cells}\n")


def denominator(h: float, params: Parameters) -> float:
    """Nonstandard denominator theta(h) = (1 - exp(-rho*h)) / rho.

    rho is the combined rate sigma+mu+gamma+lambda+psi; the rho -> 0 limit
    is h. The value always lies in (0, h].
    """
    if h <= 0:
        raise ValueError("h must be positive")
    rho = params.sigma + params.mu + params.gamma + params.lam + params.psi
    if rho == 0.0:
        return h
    return -math.expm1(-rho * h) / rho


def nsfd_step(state_k: State, params: Parameters, h: float,
              rs_from_next: bool = True) -> State:
    """One step of the compact positivity-preserving scheme."""
    theta = denominator(h, params)
    orbit = _kernels.nsfd_orbit(state_k.as_array(), params.as_array(),
                                theta, 1, rs_from_next)
    return State.from_array(orbit[1])


def simulate(init: State, params: Parameters, cfg: StepConfig) -> Trajectory:
    """Integrate from t=0 over ceil(t_end/h) steps with the chosen scheme.

    Raises NonFiniteState if any component becomes NaN/inf; that only
    happens for the reference scheme at overly large steps. Orbits longer
    than MAX_STORED_POINTS are uniformly thinned for storage.
    """
    n_steps = math.ceil(cfg.t_end / cfg.h)
    y0 = init.as_array()
    p = params.as_array()
    if cfg.scheme is Scheme.NSFD:
        theta = denominator(cfg.h, params)
        orbit = _kernels.nsfd_orbit(y0, p, theta, n_steps, cfg.rs_from_next)
    else:
        orbit = _kernels.rk4_orbit(y0, p, cfg.h, n_steps)
    if not np.all(np.isfinite(orbit)):
        raise NonFiniteState(
            f"non-finite state produced by {cfg.scheme.value} at h={cfg.h}")
    times = np.arange(n_steps + 1) * cfg.h
    if len(times) > MAX_STORED_POINTS:
        keep = np.linspace(0, len(times) - 1, MAX_STORED_POINTS).round().astype(int)
        keep = np.unique(keep)
        times = times[keep]
        orbit = orbit[keep]
    return Trajectory(times=times, states=orbit, scheme=cfg.scheme, params=params)


def total_population_bound_check(traj: Trajectory, rtol: float = 1e-9) -> bool:
    """True iff N(t_k) <= N(0) * exp(delta * t_k) * (1 + rtol) for all k."""
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    n = traj.totals
    # exp may overflow to inf on long horizons; an infinite bound is fine
    with np.errstate(over="ignore"):
        bound = n[0] * np.exp(traj.params.delta * traj.times) * (1.0 + rtol)
    return bool(np.all(n <= bound))
