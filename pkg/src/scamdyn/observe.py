"""Mapping from simulated trajectories to monthly observations.

Months are mapped to the ODE clock at a constant 30.44 days. Two
observables are supported: prevalence (victim count V at each month
start) and incidence (the victimization flow beta*S*As integrated over
each month).
"""

from __future__ import annotations

import numpy as np

from .errors import SimulationFailure
from .integrators import Scheme, StepConfig, Trajectory, simulate
from .model import Parameters, State

MONTH_DAYS = 30.44

PREVALENCE = "prevalence"
INCIDENCE = "incidence"

LIKELIHOOD_STEP = 0.25  # days; fixed step used inside likelihood evaluations


def month_times(months: int) -> np.ndarray:
    """ODE times of the month starts: k * 30.44 for k = 0..months-1."""
    return np.arange(months) * MONTH_DAYS


def observe(traj: Trajectory, obs_times: np.ndarray, observable: str) -> np.ndarray:
    """Evaluate the observable at each obs_time on a simulated trajectory.

    Prevalence reads V(t) by linear interpolation. Incidence integrates
    beta*S*As over [t, t + 30.44] for each month start t (trapezoid on
    the trajectory grid plus interpolated endpoints).
    """
    obs_times = np.asarray(obs_times, dtype=float)
    if observable == PREVALENCE:
        return traj.sample(obs_times)[:, 1]
    if observable == INCIDENCE:
        flow = traj.params.beta * traj.s * traj.a_s
        out = np.empty(len(obs_times))
        for i, t0 in enumerate(obs_times):
            t1 = t0 + MONTH_DAYS
            grid = traj.times[(traj.times > t0) & (traj.times < t1)]
            pts = np.concatenate(([t0], grid, [t1]))
            vals = np.interp(pts, traj.times, flow)
            out[i] = np.trapezoid(vals, pts)
        return out
    raise ValueError(f"unknown observable {observable!r}")


def simulate_observable(params: Parameters, init: State, obs_times,
                        observable: str = PREVALENCE,
                        h: float = LIKELIHOOD_STEP) -> np.ndarray:
    """Run the positivity-preserving scheme and read off the observable."""
    obs_times = np.asarray(obs_times, dtype=float)
    horizon = float(obs_times.max())
    if observable == INCIDENCE:
        horizon += MONTH_DAYS
    horizon = max(horizon, h)
    try:
        traj = simulate(init, params, StepConfig(h=h, t_end=horizon,
                                                 scheme=Scheme.NSFD))
    except Exception as exc:  # noqa: BLE001 - wrap for the likelihood layer
        raise SimulationFailure(str(exc)) from exc
    return observe(traj, obs_times, observable)
