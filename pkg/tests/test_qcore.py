"""q-calculus primitive checks: frozen oracle values and the stated
invariants (bracket additivity, binomial symmetry, e*E product identity,
q->1 continuity)."""

import math

import pytest

from qdunkl import (QContext, QDomainError, q_binomial, q_bracket, q_exp_big,
                    q_exp_small, q_factorial, q_pochhammer)


def ctx(q=0.5, mu=1.0):
    return QContext(q=q, mu=mu)


class TestQContext:
    def test_q_range_enforced(self):
        for bad in (0.0, 1.0, -0.3, 1.7):
            with pytest.raises(QDomainError):
                QContext(q=bad, mu=1.0)

    def test_mu_range_enforced(self):
        with pytest.raises(QDomainError):
            QContext(q=0.5, mu=-0.5)

    def test_mu_warning_zone(self):
        with pytest.warns(UserWarning):
            c = QContext(q=0.5, mu=0.4)
        assert c.mu_warning
        assert not QContext(q=0.5, mu=0.75).mu_warning


class TestQBracket:
    def test_zero(self):
        assert q_bracket(0, ctx()) == 0.0

    def test_geometric_sum_oracle(self):
        # [3]_0.5 = 1 + 0.5 + 0.25
        assert q_bracket(3, ctx()) == pytest.approx(1.75, rel=1e-14)
        # integer agreement with the partial geometric sum, several points
        for q in (0.3, 0.5, 0.9):
            c = ctx(q)
            for n in (1, 2, 5, 13):
                ref = sum(q**j for j in range(n))
                assert q_bracket(n, c) == pytest.approx(ref, rel=1e-14)

    def test_q_to_1_probe(self):
        c = QContext(q=1 - 1e-9, mu=1.0)
        assert q_bracket(5, c) == pytest.approx(5.0, abs=1e-6)

    def test_q_to_1_continuity_rate(self):
        eps = 1e-8
        c = QContext(q=1 - eps, mu=1.0)
        for n in range(1, 51):
            assert abs(q_bracket(n, c) - n) <= 10 * eps * n * n

    def test_monotone_in_x(self):
        c = ctx(0.7)
        vals = [q_bracket(x / 4, c) for x in range(0, 40)]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_additivity_identity(self):
        # [x+1]_q = q [x]_q + 1 (the cell-width identity in general form)
        for q in (0.3, 0.5, 0.9, 0.99):
            c = ctx(q)
            for x in (0.0, 0.37, 1.0, 2.5, 7.0, 30.1):
                lhs = q_bracket(x + 1, c)
                rhs = q * q_bracket(x, c) + 1.0
                assert abs(lhs - rhs) <= 1e-13 * max(1.0, abs(rhs))

    def test_negative_rejected(self):
        with pytest.raises(QDomainError):
            q_bracket(-0.1, ctx())


class TestQFactorialBinomial:
    def test_factorial_values(self):
        c = ctx()
        assert q_factorial(0, c) == 1.0
        assert q_factorial(2, c) == pytest.approx(1.5, rel=1e-14)
        assert q_factorial(3, c) == pytest.approx(2.625, rel=1e-14)

    def test_binomial_values(self):
        c = ctx()
        assert q_binomial(4, 0, c) == 1.0
        assert q_binomial(2, 1, c) == pytest.approx(1.5, rel=1e-14)
        # direct q-factorial evaluation oracle
        ref = q_factorial(4, c) / (q_factorial(2, c) ** 2)
        assert q_binomial(4, 2, c) == pytest.approx(2.1875, rel=1e-13)
        assert q_binomial(4, 2, c) == pytest.approx(ref, rel=1e-13)

    def test_binomial_symmetry(self):
        c = ctx(0.7)
        for n in range(8):
            for k in range(n + 1):
                assert q_binomial(n, k, c) == q_binomial(n, n - k, c)

    def test_binomial_domain(self):
        with pytest.raises(QDomainError):
            q_binomial(3, 4, ctx())


class TestQPochhammer:
    def test_x_zero(self):
        assert q_pochhammer(0.0, 5, ctx()) == 1.0

    def test_one_infinite_is_zero(self):
        assert q_pochhammer(1.0, math.inf, ctx()) == 0.0

    def test_finite_product_oracle(self):
        assert q_pochhammer(0.5, 2, ctx()) == pytest.approx(0.375, rel=1e-14)

    def test_infinite_matches_long_finite(self):
        c = ctx(0.5)
        ref = q_pochhammer(0.3, 200, c)
        assert q_pochhammer(0.3, math.inf, c) == pytest.approx(ref, rel=1e-12)


class TestQExponentials:
    def test_e_at_zero(self):
        assert q_exp_small(0.0, ctx()) == pytest.approx(1.0, rel=1e-14)
        assert q_exp_big(0.0, ctx()) == pytest.approx(1.0, rel=1e-14)

    def test_radius_enforced(self):
        with pytest.raises(QDomainError):
            q_exp_small(2.5, ctx(0.5))

    def test_product_identity(self):
        # e(z) E(-z) = 1
        for q in (0.3, 0.5, 0.9):
            c = ctx(q)
            for z in (0.1, 0.5, 1.0, 1.5):
                if z >= c.radius:
                    continue
                prod = q_exp_small(z, c) * q_exp_big(-z, c)
                assert prod == pytest.approx(1.0, abs=1e-10)

    def test_big_zero_at_pole_of_product(self):
        c = ctx(0.5)
        assert q_exp_big(-1.0 / (1.0 - 0.5), c) == 0.0

    def test_e_positive_and_increasing(self):
        c = ctx(0.5)
        vals = [q_exp_small(z, c) for z in (0.0, 0.5, 1.0, 1.5)]
        assert all(v > 0 for v in vals)
        assert all(b > a for a, b in zip(vals, vals[1:]))
