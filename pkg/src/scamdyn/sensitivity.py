"""Sensitivity analysis: closed-form normalized indices of R0 and a
global Latin-hypercube sweep scored by partial rank correlation of the
time-integrated victim and scammer burdens.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import (DegenerateDenominator, DegenerateDesign,
                     HorizonExceedsTrajectory, InvalidRange)
from .integrators import Scheme, StepConfig, Trajectory, simulate
from .model import PARAM_NAMES, Parameters, State

# (low, high) per parameter in canonical order; lambda spans a wider
# band than the other rates
DEFAULT_RANGES = np.array([
    [0.0, 0.1],    # beta
    [0.0, 0.2],    # sigma
    [0.0, 0.1],    # gamma
    [0.0, 0.1],    # psi
    [0.0, 0.1],    # delta
    [0.0, 0.1],    # mu
    [0.0, 1.0],    # lambda
])

DEFAULT_HORIZON = 1520.0   # days
SWEEP_STEP = 1.0           # days, per-row simulation step in the sweep


@dataclass(frozen=True)
class LocalIndexSet:
    """Normalized indices: relative change of R0 per relative parameter change."""

    s_beta: float
    s_psi: float
    s_gamma: float
    s_mu: float
    s_lambda: float
    s_delta: float

    def as_dict(self) -> dict[str, float]:
        return {"beta": self.s_beta, "psi": self.s_psi, "gamma": self.s_gamma,
                "mu": self.s_mu, "lambda": self.s_lambda, "delta": self.s_delta}


@dataclass(frozen=True)
class SampleDesign:
    """Latin hypercube: one point per equal-probability stratum per column."""

    n: int
    ranges: np.ndarray         # (7, 2)
    seed: int
    matrix: np.ndarray         # (n, 7)


@dataclass(frozen=True)
class PrccReport:
    output: str                       # "AsBurden" or "VBurden"
    parameters: tuple[str, ...]
    coefficients: np.ndarray
    p_values: np.ndarray

    @property
    def significant(self) -> np.ndarray:
        return self.p_values < 0.05


@dataclass(frozen=True)
class GlobalSensitivityReport:
    design: SampleDesign
    as_report: PrccReport
    v_report: PrccReport
    dropped_rows: int


def local_indices(params: Parameters) -> LocalIndexSet:
    """The six closed-form indices of R0; independent of N.

    s_beta is identically 1; s_psi = -s_gamma = gamma/(gamma+psi);
    s_mu, s_lambda, s_delta share the denominator mu+lambda-delta and
    sum with s_delta to -1.
    """
    gp = params.gamma + params.psi
    net = params.net_removal
    if gp == 0.0 or net == 0.0:
        raise DegenerateDenominator(
            "indices undefined: gamma+psi and mu+lambda-delta must be nonzero")
    return LocalIndexSet(
        s_beta=1.0,
        s_psi=params.gamma / gp,
        s_gamma=-params.gamma / gp,
        s_mu=-params.mu / net,
        s_lambda=-params.lam / net,
        s_delta=params.delta / net,
    )


def lhs_sample(n: int, ranges=DEFAULT_RANGES, seed: int = 0) -> SampleDesign:
    """Stratified design: per column, one uniform draw in each of n strata."""
    ranges = np.asarray(ranges, float)
    if n < 2:
        raise InvalidRange("need n >= 2")
    if ranges.shape != (7, 2) or np.any(ranges[:, 0] >= ranges[:, 1]):
        raise InvalidRange("each range needs low < high")
    rng = np.random.default_rng(seed)
    matrix = np.empty((n, 7))
    for j in range(7):
        strata = (rng.permutation(n) + rng.random(n)) / n
        lo, hi = ranges[j]
        matrix[:, j] = lo + strata * (hi - lo)
    return SampleDesign(n=n, ranges=ranges, seed=seed, matrix=matrix)


def integrate_burden(traj: Trajectory, horizon: float) -> tuple[float, float]:
    """Trapezoidal integrals of As(t) and V(t) over [0, horizon]."""
    if horizon > traj.times[-1] + 1e-9:
        raise HorizonExceedsTrajectory(
            f"horizon {horizon} beyond simulated {traj.times[-1]}")
    inside = traj.times <= horizon
    t = traj.times[inside]
    a_s = traj.a_s[inside]
    v = traj.v[inside]
    if t[-1] < horizon:
        end = traj.sample([horizon])[0]
        t = np.append(t, horizon)
        a_s = np.append(a_s, end[3])
        v = np.append(v, end[1])
    return float(np.trapezoid(a_s, t)), float(np.trapezoid(v, t))


def _residualize(col: np.ndarray, others: np.ndarray) -> np.ndarray:
    design = np.column_stack([np.ones(len(col)), others])
    coef, *_ = np.linalg.lstsq(design, col, rcond=None)
    return col - design @ coef


def prcc(design: SampleDesign | np.ndarray, outputs,
         output_label: str = "output",
         parameters: tuple[str, ...] = PARAM_NAMES) -> PrccReport:
    """Partial rank correlation of each column against the output.

    Ranks every column and the output (average ranks on ties), regresses
    the target column and the output on the remaining columns (with
    intercept), and correlates the residuals. Two-sided p-values use a
    Student-t with n - 2 - (k-1) degrees of freedom for k columns.
    """
    matrix = design.matrix if isinstance(design, SampleDesign) else np.asarray(design)
    outputs = np.asarray(outputs, float)
    n, k = matrix.shape
    if len(outputs) != n:
        raise ValueError("outputs length must match the design")
    df = n - 2 - (k - 1)
    if df <= 0:
        raise InvalidRange(f"need more than {k + 1} rows, got {n}")
    rank_x = np.column_stack([stats.rankdata(matrix[:, j]) for j in range(k)])
    rank_y = stats.rankdata(outputs)
    coefs = np.empty(k)
    pvals = np.empty(k)
    for j in range(k):
        others = np.delete(rank_x, j, axis=1)
        rx = _residualize(rank_x[:, j], others)
        ry = _residualize(rank_y, others)
        nx, ny = np.linalg.norm(rx), np.linalg.norm(ry)
        if nx < 1e-12 * n or ny < 1e-12 * n:
            raise DegenerateDesign(f"zero residual for column {j}")
        r = float(np.clip(rx @ ry / (nx * ny), -1.0, 1.0))
        coefs[j] = r
        if abs(r) >= 1.0:
            pvals[j] = 0.0
        else:
            t = r * np.sqrt(df / (1.0 - r * r))
            pvals[j] = 2.0 * stats.t.sf(abs(t), df)
    return PrccReport(output=output_label, parameters=tuple(parameters[:k]),
                      coefficients=coefs, p_values=pvals)


def global_analysis(n: int, ranges=DEFAULT_RANGES, init: State | None = None,
                    horizon: float = DEFAULT_HORIZON, seed: int = 0,
                    h: float = SWEEP_STEP) -> GlobalSensitivityReport:
    """LHS sweep -> per-row burdens -> PRCC reports for both burdens.

    Rows whose simulation fails are dropped and counted.
    """
    if init is None:
        init = State(s=1000.0, v=100.0, r=0.0, a_s=200.0, r_s=0.0)
    design = lhs_sample(n, ranges, seed)
    cfg = StepConfig(h=h, t_end=horizon, scheme=Scheme.NSFD)
    kept_rows = []
    burdens = []
    for row in design.matrix:
        try:
            traj = simulate(init, Parameters.from_array(row), cfg)
            burdens.append(integrate_burden(traj, horizon))
            kept_rows.append(row)
        except Exception:  # noqa: BLE001 - failed rows are dropped, counted
            continue
    dropped = n - len(kept_rows)
    kept = np.array(kept_rows)
    burdens = np.array(burdens)
    as_report = prcc(kept, burdens[:, 0], "AsBurden")
    v_report = prcc(kept, burdens[:, 1], "VBurden")
    return GlobalSensitivityReport(design=design, as_report=as_report,
                                   v_report=v_report, dropped_rows=dropped)


def local_indices_to_csv(indices: LocalIndexSet, path) -> None:
    order = ("beta", "psi", "gamma", "mu", "lambda", "delta")
    vals = indices.as_dict()
    with open(path, "w", newline="\n") as fh:
        fh.write("parameter,index\n")
        for name in order:
            fh.write(f"{name},{vals[name]:.17g}\n")


def global_report_to_csv(report: GlobalSensitivityReport, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write("parameter,range_low,range_high,prcc_As,p_As,prcc_V,p_V,"
                 "significant_As,significant_V\n")
        for j, name in enumerate(report.as_report.parameters):
            lo, hi = report.design.ranges[j]
            fh.write(
                f"{name},{lo:.17g},{hi:.17g},"
                f"{report.as_report.coefficients[j]:.17g},"
                f"{report.as_report.p_values[j]:.17g},"
                f"{report.v_report.coefficients[j]:.17g},"
                f"{report.v_report.p_values[j]:.17g},"
                f"{str(bool(report.as_report.significant[j])).lower()},"
                f"{str(bool(report.v_report.significant[j])).lower()}\n")
