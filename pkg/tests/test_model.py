import math

import numpy as np
import pytest

from scamdyn.errors import DegenerateDenominator, NonPositiveComponent, SingularV
from scamdyn.integrators import Scheme, StepConfig, simulate
from scamdyn.model import (NOMINAL_PARAMS, Parameters, StabilityClass, State,
                           classify_sfe_stability, lyapunov_L, lyapunov_M,
                           next_generation_matrix, reproduction_number, rhs,
                           see_condition, sfe)

# N at which R0 = 1 for the nominal rates
N_CRITICAL = 11422.999406528186


def random_params(rng, subcritical=False):
    beta, sigma, gamma, psi, delta, mu, lam = rng.uniform(0.001, 0.1, 7)
    if subcritical:
        delta = rng.uniform(0.0, 0.9) * (mu + lam)
    return Parameters(beta=beta, sigma=sigma, gamma=gamma, psi=psi,
                      delta=delta, mu=mu, lam=lam)


def random_state(rng, scale=1000.0):
    return State(*rng.uniform(0.0, scale, 5))


class TestInvariants:
    def test_negative_parameter_rejected(self):
        with pytest.raises(ValueError):
            Parameters(beta=-0.01, sigma=0, gamma=0, psi=0, delta=0, mu=0, lam=0)

    def test_negative_compartment_rejected(self):
        with pytest.raises(ValueError):
            State(1.0, -1.0, 0.0, 0.0, 0.0)


class TestRhs:
    def test_origin_is_fixed_point(self):
        zero = State(0, 0, 0, 0, 0)
        assert np.all(rhs(zero, NOMINAL_PARAMS) == 0.0)

    def test_sfe_is_fixed_point(self):
        assert np.all(rhs(sfe(1000.0), NOMINAL_PARAMS) == 0.0)

    def test_hand_evaluated_point(self):
        # componentwise independent arithmetic at (100,10,5,2,0)
        d = rhs(State(100, 10, 5, 2, 0), NOMINAL_PARAMS)
        expected = [-1.5656600000000001, 1.0912999999999999,
                    0.47432000000000007, -0.012928, 0.032006]
        np.testing.assert_allclose(d, expected, rtol=1e-14)
        assert math.isclose(d.sum(), 0.019038, rel_tol=1e-12)

    def test_sum_identity_random(self):
        rng = np.random.default_rng(1)
        for _ in range(1000):
            p = random_params(rng)
            st = random_state(rng)
            total = rhs(st, p).sum()
            expected = (p.delta - p.mu) * st.a_s
            # the sum cancels flow terms as large as beta*S*As, so the
            # roundoff floor scales with that magnitude
            scale = max(1.0, abs(expected), p.beta * st.s * st.a_s)
            assert abs(total - expected) <= 1e-12 * scale

    def test_boundary_flux_nonnegative(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            p = random_params(rng)
            base = random_state(rng).as_array()
            for i in range(5):
                x = base.copy()
                x[i] = 0.0
                d = rhs(State.from_array(x), p)
                assert d[i] >= 0.0


class TestReproductionNumber:
    def test_zero_psi(self):
        p = Parameters(beta=0.01, sigma=0.02, gamma=0.05, psi=0.0,
                       delta=0.01, mu=0.02, lam=0.02)
        assert reproduction_number(p, 1000.0) == 0.0

    def test_zero_beta(self):
        p = Parameters(beta=0.0, sigma=0.02, gamma=0.05, psi=0.001,
                       delta=0.01, mu=0.02, lam=0.02)
        assert reproduction_number(p, 1000.0) == 0.0

    def test_nominal_value(self):
        assert math.isclose(reproduction_number(NOMINAL_PARAMS, 1000.0),
                            0.087542681603266587, rel_tol=1e-14)

    def test_degenerate_denominator(self):
        p = Parameters(beta=0.01, sigma=0.02, gamma=0.0, psi=0.0,
                       delta=0.01, mu=0.02, lam=0.02)
        with pytest.raises(DegenerateDenominator):
            reproduction_number(p, 1000.0)
        q = Parameters(beta=0.01, sigma=0.02, gamma=0.05, psi=0.001,
                       delta=0.04, mu=0.02, lam=0.02)
        with pytest.raises(DegenerateDenominator):
            reproduction_number(q, 1000.0)


class TestNextGenerationMatrix:
    def test_zero_psi(self):
        p = Parameters(beta=0.01, sigma=0.02, gamma=0.05, psi=0.0,
                       delta=0.01, mu=0.02, lam=0.02)
        m = next_generation_matrix(p, 1000.0)
        assert m.spectral_radius == 0.0
        assert m.k[0, 0] == 0.0

    def test_second_rows_zero(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            m = next_generation_matrix(random_params(rng, subcritical=True), 500.0)
            assert np.all(m.f[1] == 0.0)
            assert np.all(m.k[1] == 0.0)

    def test_spectral_radius_matches_closed_form(self):
        rng = np.random.default_rng(4)
        for _ in range(1000):
            p = random_params(rng, subcritical=True)
            n = rng.uniform(10.0, 1e5)
            r0 = reproduction_number(p, n)
            rho = next_generation_matrix(p, n).spectral_radius
            assert abs(rho - r0) <= 1e-10 * max(1.0, abs(r0))

    def test_singular_v(self):
        p = Parameters(beta=0.01, sigma=0.02, gamma=0.05, psi=0.001,
                       delta=0.04, mu=0.02, lam=0.02)
        with pytest.raises(SingularV):
            next_generation_matrix(p, 1000.0)


class TestStability:
    def test_quadratic_factors_when_psi_zero(self):
        p = Parameters(beta=0.01, sigma=0.02, gamma=0.05, psi=0.0,
                       delta=0.01, mu=0.02, lam=0.02)
        rep = classify_sfe_stability(p, 1000.0)
        assert rep.classification is StabilityClass.STABLE_SFE
        np.testing.assert_allclose(sorted(rep.eigenvalue_pair),
                                   sorted([rep.p1, rep.p2]), rtol=1e-12)
        assert all(e < 0 for e in rep.eigenvalue_pair)

    def test_nominal_is_stable(self):
        rep = classify_sfe_stability(NOMINAL_PARAMS, 1000.0)
        assert rep.classification is StabilityClass.STABLE_SFE
        assert math.isclose(rep.r0, 0.087542681603266587, rel_tol=1e-12)
        assert rep.discriminant >= 0.0

    def test_threshold_at_critical_population(self):
        rep = classify_sfe_stability(NOMINAL_PARAMS, N_CRITICAL)
        assert rep.classification is StabilityClass.THRESHOLD

    def test_supercritical_recruitment_is_unstable(self):
        p = Parameters(beta=0.01, sigma=0.02, gamma=0.05, psi=0.001,
                       delta=0.08, mu=0.02, lam=0.02)
        rep = classify_sfe_stability(p, 1000.0)
        assert rep.classification is StabilityClass.UNSTABLE_SFE

    def test_discriminant_nonnegative_random(self):
        rng = np.random.default_rng(5)
        for _ in range(500):
            rep = classify_sfe_stability(random_params(rng), 1000.0)
            assert rep.discriminant >= 0.0


class TestLyapunovL:
    def test_zero_at_scam_free_state(self):
        assert lyapunov_L(State(500, 0, 300, 0, 100), NOMINAL_PARAMS) == 0.0

    def test_psi_zero_drops_victim_term(self):
        p = Parameters(beta=0.01, sigma=0.02, gamma=0.06, psi=0.0,
                       delta=0.01, mu=0.02, lam=0.02)
        assert lyapunov_L(State(0, 10, 0, 5, 0), p, a2=1.0) == 5.0

    def test_nominal_arithmetic(self):
        val = lyapunov_L(State(0, 10, 0, 5, 0), NOMINAL_PARAMS, a2=2.0)
        assert math.isclose(val, 10.001347481893212, rel_tol=1e-14)

    def test_non_increasing_along_subcritical_trajectory(self):
        traj = simulate(State(1000, 100, 0, 200, 0), NOMINAL_PARAMS,
                        StepConfig(h=1.0, t_end=800.0))
        vals = [lyapunov_L(traj.state_at(i), NOMINAL_PARAMS)
                for i in range(len(traj))]
        assert all(b <= a + 1e-9 for a, b in zip(vals, vals[1:]))


class TestLyapunovM:
    def test_zero_at_reference(self):
        x = State(10, 20, 30, 40, 50)
        assert lyapunov_M(x, x) == 0.0

    def test_single_doubled_component(self):
        x = State(10, 20, 30, 80, 50)
        ref = State(10, 20, 30, 40, 50)
        assert math.isclose(lyapunov_M(x, ref), 0.3068528194400546,
                            rel_tol=1e-14)

    def test_nonnegative_random(self):
        rng = np.random.default_rng(6)
        for _ in range(200):
            x = State(*rng.uniform(0.1, 100.0, 5))
            ref = State(*rng.uniform(0.1, 100.0, 5))
            assert lyapunov_M(x, ref) >= 0.0

    def test_rejects_nonpositive(self):
        with pytest.raises(NonPositiveComponent):
            lyapunov_M(State(0, 1, 1, 1, 1), State(1, 1, 1, 1, 1))


class TestSeeCondition:
    def test_psi_zero(self):
        p = Parameters(beta=0.01, sigma=0.02, gamma=0.05, psi=0.0,
                       delta=0.01, mu=0.02, lam=0.02)
        assert see_condition(p, 1000.0) == -1.0

    def test_nominal(self):
        assert math.isclose(see_condition(NOMINAL_PARAMS, 1000.0),
                            0.087542681603266587 - 1.0, rel_tol=1e-12)

    def test_zero_at_critical_population(self):
        assert abs(see_condition(NOMINAL_PARAMS, N_CRITICAL)) < 1e-12
