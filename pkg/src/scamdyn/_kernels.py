"""Compiled inner loops for the time steppers.

Parameter vectors follow the canonical order
(beta, sigma, gamma, psi, delta, mu, lambda); state vectors are
(S, V, R, As, Rs). Both kernels return the full orbit including the
initial row, shape (n_steps + 1, 5).
"""

import numpy as np
from numba import njit


@njit(cache=True)
def nsfd_orbit(y0, p, theta, n_steps, rs_from_next):
    """Positivity-preserving scheme in its explicit compact form.

    When rs_from_next is True the removed-scammer update uses the freshly
    computed As_{k+1}; otherwise it uses As_k.
    """
    beta, sigma, gamma, psi, delta, mu, lam = p
    out = np.empty((n_steps + 1, 5))
    out[0] = y0
    s, v, r, a_s, r_s = y0[0], y0[1], y0[2], y0[3], y0[4]
    for k in range(n_steps):
        s_new = (s + theta * sigma * r) / (1.0 + theta * beta * a_s)
        v_new = (v + theta * beta * s * a_s) / (1.0 + theta * gamma + theta * psi)
        r_new = (r + theta * gamma * v) / (1.0 + theta * sigma)
        a_new = (a_s * (1.0 + theta * delta) + theta * psi * v) / (
            1.0 + theta * (mu + lam))
        if rs_from_next:
            rs_new = r_s + theta * lam * a_new
        else:
            rs_new = r_s + theta * lam * a_s
        s, v, r, a_s, r_s = s_new, v_new, r_new, a_new, rs_new
        out[k + 1, 0] = s
        out[k + 1, 1] = v
        out[k + 1, 2] = r
        out[k + 1, 3] = a_s
        out[k + 1, 4] = r_s
    return out


@njit(cache=True)
def _rhs(y, beta, sigma, gamma, psi, delta, mu, lam):
    s, v, r, a_s = y[0], y[1], y[2], y[3]
    d = np.empty(5)
    infection = beta * s * a_s
    d[0] = -infection + sigma * r
    d[1] = infection - gamma * v - psi * v
    d[2] = gamma * v - sigma * r
    d[3] = delta * a_s - mu * a_s - lam * a_s + psi * v
    d[4] = lam * a_s
    return d


@njit(cache=True)
def rk4_orbit(y0, p, h, n_steps):
    """Classical fixed-step fourth-order Runge-Kutta reference orbit."""
    beta, sigma, gamma, psi, delta, mu, lam = p
    out = np.empty((n_steps + 1, 5))
    out[0] = y0
    y = y0.copy()
    for k in range(n_steps):
        k1 = _rhs(y, beta, sigma, gamma, psi, delta, mu, lam)
        k2 = _rhs(y + 0.5 * h * k1, beta, sigma, gamma, psi, delta, mu, lam)
        k3 = _rhs(y + 0.5 * h * k2, beta, sigma, gamma, psi, delta, mu, lam)
        k4 = _rhs(y + h * k3, beta, sigma, gamma, psi, delta, mu, lam)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[k + 1] = y
    return out
