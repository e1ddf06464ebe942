"""Dunkl coefficient and q-exponential checks.

The series values are checked against 60-digit mpmath partial sums (the
independent oracle); the continued parity components are checked against the
direct series inside the radius and against an mpmath ladder beyond it.
"""

import math

import mpmath as mp
import numpy as np
import pytest

from qdunkl import (DunklKernel, E_mu_q, GammaTable, QContext, QDomainError,
                    e_mu_q, e_series, gamma_classical, gamma_q, q_bracket,
                    theta)

mp.mp.dps = 60


def gamma_mp(mu, q, K):
    g = [mp.mpf(1)]
    for k in range(K):
        th = (k + 1) % 2
        g.append(g[-1] * (1 - mp.mpf(q) ** (2 * mu * th + k + 1)) / (1 - mp.mpf(q)))
    return g


def e_mp(x, mu, q, K=400):
    g = gamma_mp(mu, q, K)
    return float(sum(mp.mpf(x) ** n / g[n] for n in range(K + 1)))


class TestTheta:
    def test_values(self):
        assert theta(0) == 0
        assert theta(7) == 1
        assert theta(12) == 0

    def test_domain(self):
        with pytest.raises(QDomainError):
            theta(-1)


class TestGammaTable:
    def test_printed_special_cases(self):
        # gamma(0)=1, gamma(1)=(1-q^{2mu+1})/(1-q), gamma(2)=gamma(1)[2]_q, ...
        for mu in (0.75, 1.0, 2.0):
            for q in (0.3, 0.5, 0.9):
                tab = GammaTable(QContext(q=q, mu=mu))
                b = lambda t: (1 - q**t) / (1 - q)
                printed = [1.0, b(2 * mu + 1), b(2 * mu + 1) * b(2),
                           b(2 * mu + 1) * b(2) * b(2 * mu + 3),
                           b(2 * mu + 1) * b(2) * b(2 * mu + 3) * b(4)]
                for k in range(5):
                    assert gamma_q(k, tab) == pytest.approx(printed[k], rel=1e-12)

    def test_frozen_examples(self):
        tab = GammaTable(QContext(q=0.5, mu=1.0))
        assert gamma_q(0, tab) == 1.0
        assert gamma_q(1, tab) == pytest.approx(1.75, rel=1e-14)
        assert gamma_q(2, tab) == pytest.approx(2.625, rel=1e-14)

    def test_recursion_ratio_invariant(self):
        for mu in (0.75, 1.0):
            for q in (0.5, 0.9):
                c = QContext(q=q, mu=mu)
                tab = GammaTable(c)
                for k in range(60):
                    step = q_bracket(2 * mu * theta(k + 1) + k + 1, c)
                    ratio = gamma_q(k + 1, tab) / gamma_q(k, tab)
                    assert ratio == pytest.approx(step, rel=1e-13)

    def test_positive_and_eventually_increasing(self):
        tab = GammaTable(QContext(q=0.9, mu=1.0))
        vals = [gamma_q(k, tab) for k in range(40)]
        assert all(v > 0 for v in vals)
        assert all(b > a for a, b in zip(vals[1:], vals[2:]))

    def test_explicit_formula_cross_check(self):
        tab = GammaTable(QContext(q=0.7, mu=0.8))
        for k in range(12):
            assert tab.explicit_check(k) == pytest.approx(gamma_q(k, tab), rel=1e-11)

    def test_auto_extends(self):
        tab = GammaTable(QContext(q=0.5, mu=1.0), k_max=4)
        assert gamma_q(50, tab) > 0
        assert tab.k_max >= 50


class TestGammaClassical:
    def test_values(self):
        assert gamma_classical(0, 1.0) == 1.0
        assert gamma_classical(1, 1.0) == pytest.approx(3.0, rel=1e-14)
        assert gamma_classical(2, 1.0) == pytest.approx(6.0, rel=1e-14)

    def test_q_to_1_bridge(self):
        for mu in (0.75, 1.0, 2.0):
            tab = GammaTable(QContext(q=1 - 1e-7, mu=mu))
            for k in range(21):
                want = gamma_classical(k, mu)
                assert gamma_q(k, tab) == pytest.approx(want, rel=1e-4)


class TestDunklExponentials:
    def test_at_zero(self):
        tab = GammaTable(QContext(q=0.5, mu=1.0))
        assert e_mu_q(0.0, tab) == pytest.approx(1.0, rel=1e-14)
        assert E_mu_q(0.0, tab) == pytest.approx(1.0, rel=1e-14)

    def test_frozen_mpmath_oracles(self):
        # 60-digit partial-sum oracle values (K = 200..400)
        tab = GammaTable(QContext(q=0.5, mu=1.0))
        assert e_mu_q(1.0, tab) == pytest.approx(2.3605069724201932, rel=1e-12)
        assert E_mu_q(1.0, tab) == pytest.approx(1.7881732717735288, rel=1e-12)
        tab2 = GammaTable(QContext(q=0.9, mu=0.75))
        assert e_mu_q(3.0, tab2) == pytest.approx(9.3334428610878644, rel=1e-12)
        assert E_mu_q(3.0, tab2) == pytest.approx(6.5270311014186410, rel=1e-12)

    def test_monotone_and_ordering(self):
        # positive terms: strictly increasing on the domain [0, 2) at q=0.5
        tab = GammaTable(QContext(q=0.5, mu=1.0))
        assert e_mu_q(1.5, tab) > e_mu_q(1.0, tab) > 1.0
        for x in (0.5, 1.0, 1.9):
            assert E_mu_q(x, tab) <= e_mu_q(x, tab)

    def test_series_reports_terms(self):
        tab = GammaTable(QContext(q=0.5, mu=1.0))
        val, n_terms = e_series(1.0, tab)
        assert val == pytest.approx(2.3605069724201932, rel=1e-12)
        assert n_terms > 5

    def test_series_domain_error(self):
        tab = GammaTable(QContext(q=0.5, mu=1.0))
        with pytest.raises(QDomainError):
            e_mu_q(2.0, tab)  # radius 1/(1-q) = 2


class TestDunklKernelContinuation:
    def test_matches_series_inside_radius(self):
        for q, mu in ((0.5, 1.0), (0.9, 0.75), (0.9, 1.0), (0.995, 1.0)):
            c = QContext(q=q, mu=mu)
            tab = GammaTable(c)
            ker = DunklKernel(c)
            for frac in (0.1, 0.5, 0.9):
                x = frac * c.radius
                assert ker.e(x) == pytest.approx(e_mu_q(x, tab), rel=1e-11)

    def test_parity_components_sum(self):
        c = QContext(q=0.9, mu=0.75)
        ker = DunklKernel(c)
        comp = ker.components(2.0)
        assert comp.even + comp.odd == pytest.approx(ker.e(2.0), rel=1e-14)
        # parity halves against mpmath split sums
        g = gamma_mp(0.75, 0.9, 400)
        even = float(sum(mp.mpf(2.0) ** n / g[n] for n in range(0, 401, 2)))
        odd = float(sum(mp.mpf(2.0) ** n / g[n] for n in range(1, 401, 2)))
        assert comp.even == pytest.approx(even, rel=1e-11)
        assert comp.odd == pytest.approx(odd, rel=1e-11)

    def test_continuation_against_mpmath_ladder(self):
        # high-precision reference for the continued value beyond the radius
        def phi_mp(w, Q, B):
            s, cterm = mp.mpf(0), mp.mpf(1)
            m = 0
            while abs(cterm) > mp.mpf(10) ** (-50) * max(abs(s), 1):
                s += cterm
                m += 1
                cterm *= w / ((1 - Q**m) * (1 - B * Q ** (m - 1)))
            return s

        def phi_mp_ladder(w, Q, B):
            w = mp.mpf(w)
            if abs(w) <= mp.mpf("0.25"):
                return phi_mp(w, Q, B)
            steps = int(mp.ceil(mp.log(abs(w) / mp.mpf("0.25")) / mp.log(1 / mp.mpf(Q))))
            f2 = phi_mp(w * mp.mpf(Q) ** (steps + 1), Q, B)
            f1 = phi_mp(w * mp.mpf(Q) ** steps, Q, B)
            for j in range(steps - 1, -1, -1):
                wj = w * mp.mpf(Q) ** j
                f0 = ((1 + mp.mpf(B) / Q) * f1 - (mp.mpf(B) / Q) * f2) / (1 - wj)
                f2, f1 = f1, f0
            return f1

        for q, mu in ((0.5, 1.0), (0.9, 1.0), (0.995, 1.0)):
            c = QContext(q=q, mu=mu)
            ker = DunklKernel(c)
            Q, B = q * q, q ** (2 * mu + 1)
            for mult in (1.7, 4.3, 12.9):
                x = mult * c.radius
                w = ((1 - q) * x) ** 2
                ref_even = float(phi_mp_ladder(w, Q, B))
                ref_odd = float(x / q_bracket(1 + 2 * mu, c) * phi_mp_ladder(w, Q, B * Q))
                comp = ker.components(x)
                assert comp.even == pytest.approx(ref_even, rel=5e-12)
                assert comp.odd == pytest.approx(ref_odd, rel=5e-12)

    def test_no_real_zeros_between_poles(self):
        # e continued flips sign only across its poles x = radius/q^j
        for q, mu in ((0.5, 0.75), (0.9, 1.0)):
            c = QContext(q=q, mu=mu)
            ker = DunklKernel(c)
            rho = c.radius
            poles = []
            p = rho
            while p < 30 * rho:
                poles.append(p)
                p /= q
            xs = np.linspace(0.01, 29 * rho, 4001)
            vals = np.array([ker.e(float(x)) for x in xs])
            flips = np.where(np.sign(vals[1:]) * np.sign(vals[:-1]) < 0)[0]
            for i in flips:
                gap = min(abs(0.5 * (xs[i] + xs[i + 1]) - p) for p in poles)
                assert gap < (xs[1] - xs[0]), "sign flip away from pole ladder"


class TestOperatorSeedIdentities:
    def test_normalization_seed(self):
        # (1/e(y)) sum y^k/gamma(k) = 1 by construction, via independent sums
        c = QContext(q=0.9, mu=1.0)
        tab = GammaTable(c)
        for y in (0.5, 3.0, 9.0):
            s = 0.0
            t = 1.0
            k = 0
            while t > 1e-17 * max(s, 1.0) or k < 10:
                s += t
                k += 1
                t *= y / q_bracket(2 * c.mu * theta(k) + k, c)
                if k > 100000:
                    break
            assert s / e_mu_q(y, tab) == pytest.approx(1.0, abs=1e-11)

    def test_first_node_moment_identity(self):
        # (1/([n]_q e([n]_q x))) sum ([n]_q x)^k [k+2mu theta_k]_q/gamma(k) = x
        # series route on a configuration whose domain covers [0,4]
        q, n = 0.99, 25  # x_rad = 1/(1-q^n) ~ 4.5
        for mu in (0.75, 1.0):
            c = QContext(q=q, mu=mu)
            tab = GammaTable(c)
            bn = q_bracket(n, c)
            for x in np.linspace(0.0, 4.0, 9):
                x = float(x)
                y = bn * x
                num = 0.0
                t = 1.0
                k = 0
                while True:
                    A = q_bracket(k + 2 * mu * theta(k), c)
                    num += t * A
                    k += 1
                    t *= y / q_bracket(2 * mu * theta(k) + k, c)
                    if t < 1e-17 and k > 10:
                        break
                if x == 0.0:
                    assert num == 0.0
                    continue
                val = num / (bn * e_mu_q(y, tab))
                assert abs(val - x) <= 1e-9 * max(1.0, x)
