import random
from decimal import Decimal
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import gram_psd
from pqpath import linalg
from pqpath.core import (
    AffineScalar,
    EpsVector,
    ParametricQP,
    embed_free_variables,
    format_rat,
    qp_to_lcp,
    to_rat,
    validate_psd,
)
from pqpath.errors import StructureError

F = Fraction


class TestRationals:
    @pytest.mark.parametrize(
        "text, expected",
        [("3", F(3)), ("-7", F(-7)), ("1/3", F(1, 3)), ("0.2", F(1, 5)), ("0.25", F(1, 4)),
         ("-2/4", F(-1, 2)), ("1e-3", F(1, 1000))],
    )
    def test_parse(self, text, expected):
        assert to_rat(text) == expected

    @pytest.mark.parametrize("text", ["", "1/0", "abc", "1 / 3", "nan", "0x10"])
    def test_malformed(self, text):
        with pytest.raises((ValueError, TypeError)):
            to_rat(text)

    def test_float_goes_through_decimal_repr(self):
        assert to_rat(0.1) == F(1, 10)
        assert to_rat(Decimal("2.50")) == F(5, 2)

    @given(st.integers(-10**6, 10**6), st.integers(1, 10**6))
    def test_canonical_and_roundtrip(self, p, q):
        value = to_rat(f"{p}/{q}")
        assert value.denominator > 0
        assert value == F(p, q)
        assert to_rat(format_rat(value)) == value
        assert to_rat(value) is value

    @given(st.fractions(), st.fractions())
    def test_sum_exact(self, a, b):
        s = a + b
        assert s * a.denominator * b.denominator == (
            a.numerator * b.denominator + b.numerator * a.denominator
        )

    def test_affine_scalar(self):
        f = AffineScalar("1/2", -3)
        assert f(0) == F(1, 2)
        assert f(F(1, 6)) == 0
        assert (-f)(1) == F(5, 2)
        assert (f + 1)(0) == F(3, 2)


class TestEpsVector:
    @given(st.fractions(), st.fractions())
    def test_sign_rule(self, s, t):
        e = EpsVector([s], [t])
        expected = (s > 0) - (s < 0) if s != 0 else (t > 0) - (t < 0)
        assert e.sign(0) == expected
        assert e.is_nonnegative() == (s > 0 or (s == 0 and t >= 0))

    @given(st.fractions(), st.fractions())
    def test_sign_matches_small_numeric_eps(self, s, t):
        e = EpsVector([s], [t])
        # a small enough eps for these magnitudes
        eps = F(1, 10**6) * (abs(s) / (abs(t) + 1)) if s != 0 else F(1)
        value = s + eps * t
        assert e.sign(0) == (value > 0) - (value < 0)


class TestValidatePsd:
    @pytest.mark.parametrize(
        "Q, expected",
        [
            ([[1, 0], [0, 1]], True),
            ([[0, 0], [0, 0]], True),
            ([[0, 1], [1, 0]], False),
            ([[1, 2], [2, 4]], True),
            ([[1, 2], [2, 3]], False),
            ([[0, 0], [0, -1]], False),
            ([[2, -1, 0], [-1, 2, -1], [0, -1, 2]], True),
            ([[1, 1, 1], [1, 1, 1], [1, 1, 0]], False),
        ],
    )
    def test_examples(self, Q, expected):
        assert validate_psd(Q) is expected

    def test_rejects_nonsymmetric(self):
        with pytest.raises(StructureError):
            validate_psd([[1, 2], [0, 1]])

    def test_agrees_with_sampled_quadratic_form(self):
        rng = random.Random(11)
        for trial in range(40):
            n = rng.randint(1, 4)
            if trial % 2:
                Q = gram_psd(rng, n, rng.randint(0, n))
            else:
                Q = [[0] * n for _ in range(n)]
                for i in range(n):
                    for j in range(i, n):
                        Q[i][j] = Q[j][i] = rng.randint(-2, 2)
            psd = validate_psd(Q)
            values = []
            for _ in range(1000):
                x = [F(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(n)]
                values.append(sum(x[i] * Q[i][j] * x[j] for i in range(n) for j in range(n)))
            if psd:
                assert min(values) >= 0
            else:
                assert min(values) < 0, Q


class TestQpToLcp:
    def test_scalar(self):
        qp = ParametricQP([[1]], [], [AffineScalar(0, 1)], [], -2, 2)
        lcp = qp_to_lcp(qp)
        assert lcp.k == 1
        assert lcp.M == ((2,),)
        assert lcp.q_at(F(3)) == (3,)
        assert lcp.n_orig == 1

    def test_block_matrix(self):
        qp = ParametricQP([[1, 0], [0, 0]], [[1, 1]], [0, 0], [AffineScalar(0, 1)], 0, 1)
        lcp = qp_to_lcp(qp)
        assert [list(r) for r in lcp.M] == [[2, 0, -1], [0, 0, -1], [1, 1, 0]]
        assert lcp.q0 == (0, 0, 0)
        assert lcp.q1 == (0, 0, -1)

    def test_no_constraints_gives_2q(self):
        qp = ParametricQP([[2, 1], [1, 2]], [], [0, 0], [], 0, 1)
        assert [list(r) for r in qp_to_lcp(qp).M] == [[4, 2], [2, 4]]

    def test_zero_variables_rejected(self):
        with pytest.raises(StructureError):
            ParametricQP([], [], [], [], 0, 1)

    def test_nonsymmetric_rejected_even_without_psd_check(self):
        with pytest.raises(StructureError):
            ParametricQP([[1, 1], [0, 1]], [], [0, 0], [], 0, 1)

    def test_non_psd_rejected(self):
        qp = ParametricQP([[0, 1], [1, 0]], [], [0, 0], [], 0, 1)
        with pytest.raises(StructureError):
            qp_to_lcp(qp)
        assert qp_to_lcp(qp, check_psd=False).k == 2

    def test_bisymmetric_and_psd_form(self):
        rng = random.Random(5)
        for _ in range(30):
            n, m = rng.randint(1, 4), rng.randint(0, 3)
            Q = gram_psd(rng, n, rng.randint(0, 2))
            A = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(m)]
            qp = ParametricQP(Q, A, [0] * n, [0] * m, 0, 1)
            M = qp_to_lcp(qp).M
            k = n + m
            for i in range(k):
                for j in range(k):
                    if i < n and j < n:
                        assert M[i][j] == M[j][i]
                    elif i >= n and j >= n:
                        assert M[i][j] == 0
                    else:
                        assert M[i][j] == -M[j][i]
            for _ in range(100):
                w = [F(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(k)]
                form = sum(w[i] * M[i][j] * w[j] for i in range(k) for j in range(k))
                u = w[:n]
                assert form == 2 * sum(u[i] * Q[i][j] * u[j] for i in range(n) for j in range(n))
                assert form >= 0


class TestEmbedFreeVariables:
    def test_single_free_variable(self):
        split = embed_free_variables([[1]], [], [AffineScalar(0, 1)], [True])
        assert [list(r) for r in split.Q] == [[1, -1], [-1, 1]]
        assert [f.slope for f in split.c] == [1, -1]

    def test_columns_of_a_duplicated_with_sign_flip(self):
        split = embed_free_variables([[1, 0], [0, 1]], [[2, 3]], [0, 0], [False, True])
        assert split.A == ((2, 3, -3),)
        assert split.free_indices == (1,)

    def test_roundtrip(self):
        split = embed_free_variables([[1, 0], [0, 1]], [], [0, 0], [True, True])
        assert split.recover([F(3), F(1), F(1), F(4)]) == [2, -3]

    def test_random_instances_psd_and_singular(self):
        rng = random.Random(17)
        for _ in range(50):
            n = rng.randint(1, 4)
            Q = gram_psd(rng, n, rng.randint(1, n))
            mask = [rng.random() < 0.5 for _ in range(n)]
            mask[rng.randrange(n)] = True
            split = embed_free_variables(Q, [], [0] * n, mask)
            assert validate_psd(split.Q)
            assert linalg.det(split.Q) == 0
            # x' = (x+, x-) and x = x+ - x- give the same quadratic form
            xp = [F(rng.randint(0, 5)) for _ in range(split.n)]
            x = split.recover(xp)
            lhs = sum(xp[i] * split.Q[i][j] * xp[j] for i in range(split.n) for j in range(split.n))
            rhs = sum(x[i] * Q[i][j] * x[j] for i in range(n) for j in range(n))
            assert lhs == rhs

    def test_dimension_mismatch(self):
        with pytest.raises(StructureError):
            embed_free_variables([[1]], [], [0, 0], [True])


class TestLinalg:
    def test_solve_random(self):
        rng = random.Random(3)
        for _ in range(50):
            n = rng.randint(1, 6)
            A = [[F(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(n)] for _ in range(n)]
            b = [F(rng.randint(-5, 5)) for _ in range(n)]
            if linalg.det(A) == 0:
                with pytest.raises(linalg.SingularMatrixError):
                    linalg.solve_vector(A, b)
                continue
            x = linalg.solve_vector(A, b)
            assert linalg.matvec(A, x) == b

    def test_det_needs_row_swap(self):
        assert linalg.det([[0, 1], [1, 0]]) == -1
        assert linalg.det([[F(1, 2), 0], [0, 4]]) == 2
