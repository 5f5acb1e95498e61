import unittest
import numpy as np
import sympy as sp
import sys
import os

# 添加项目根目录到Python路径
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.cstriple import (
    CSTriple,
    InvalidTripleError,
    c_shift,
    charpoly3,
    delta_power,
    delta_twist,
    dual,
    dual_poly_value,
    gompf_shift,
    is_cs_matrix,
    is_valid_triple,
    make_standard_matrix,
    trace_discriminant,
    trace_poly,
    trace_poly_value,
    valid_triples,
)
from src.intarith import det, mat_mul


def small_population():
    """d <= 50、|n| <= 50 的全部三元组"""
    for n in range(-50, 51):
        yield from valid_triples(n, 50)


class TestValidity(unittest.TestCase):

    def test_examples(self):
        for n in range(-10, 11):
            self.assertTrue(is_valid_triple(1, 1, n))
        self.assertTrue(is_valid_triple(2, 7, 27))
        self.assertEqual(trace_poly_value(27, 2), -49)
        self.assertFalse(is_valid_triple(3, 0, 5))
        self.assertFalse(is_valid_triple(3, 7, 27))

    def test_constructor_rejects_invalid(self):
        with self.assertRaises(InvalidTripleError):
            CSTriple(3, 7, 27)
        with self.assertRaises(InvalidTripleError):
            CSTriple(1, 0, 2)

    def test_no_rational_root(self):
        """f_n(1) = -1，f_n(-1) = -2n - 1，均不为零"""
        for n in range(-200, 201):
            self.assertEqual(trace_poly_value(n, 1), -1)
            self.assertEqual(trace_poly_value(n, -1), -2 * n - 1)
            self.assertNotEqual(trace_poly_value(n, -1), 0)

    def test_canonical_equality(self):
        self.assertEqual(CSTriple(9, 7, 27), CSTriple(2, 7, 27))
        self.assertEqual(CSTriple(2, -7, 27), CSTriple(2, 7, 27))
        self.assertEqual(CSTriple(3, 1, 5).key[0], 1)
        self.assertEqual(len({CSTriple(9, 7, 27), CSTriple(2, 7, 27), CSTriple(-5, 7, 27)}), 1)
        self.assertNotEqual(CSTriple(2, 7, 27), CSTriple(2, 7, 76))

    def test_text_and_json(self):
        t = CSTriple.parse("(2,7,-22)")
        self.assertEqual(t.astuple(), (2, 7, -22))
        self.assertEqual(str(t), "(2,7,-22)")
        self.assertEqual(CSTriple.from_json(t.to_json()), t)
        self.assertEqual(CSTriple.from_json([2, 7, -22]), t)
        with self.assertRaises(InvalidTripleError):
            CSTriple.parse("2;7;27")

    def test_valid_triples_order(self):
        triples = list(valid_triples(70, 12))
        self.assertEqual(triples[0], CSTriple(1, 1, 70))
        self.assertEqual([t.sort_key() for t in triples], sorted(t.sort_key() for t in triples))
        self.assertIn(CSTriple(2, 3, 70), triples)


class TestStandardMatrix(unittest.TestCase):

    def test_examples(self):
        self.assertEqual(make_standard_matrix(CSTriple(1, 1, 2)).matrix, ((0, 1, 0), (0, 1, 1), (1, 0, 1)))
        x = make_standard_matrix(CSTriple(2, 7, 27))
        self.assertEqual((x.a, x.b), (7, 24))
        for n in range(-5, 10):
            m = make_standard_matrix(CSTriple(1, 1, n + 2))
            self.assertEqual((m.a, m.b), (1, 0))

    def test_population_determinants(self):
        """det X = 1 且 det(X - I) = 1；charpoly 为 f_n"""
        for t in small_population():
            x = make_standard_matrix(t)
            self.assertTrue(is_cs_matrix(x.matrix), msg=str(t))
            self.assertEqual(x.a * x.d - x.b * x.c, 1)
            self.assertEqual(charpoly3(x.matrix), trace_poly(t.n))


class TestMoves(unittest.TestCase):

    def setUp(self):
        self.rng = np.random.default_rng(42)
        self.population = list(small_population())

    def test_shifts(self):
        self.assertEqual(gompf_shift(CSTriple(2, 7, 27), 7).astuple(), (2, 7, 76))
        self.assertEqual(gompf_shift(CSTriple(149, 177, 70), -1).astuple(), (149, 177, -107))
        self.assertEqual(c_shift(CSTriple(2, 7, 27), 1).astuple(), (9, 7, 27))
        self.assertEqual(c_shift(CSTriple(2, 7, 27), 1).canonical().astuple(), (2, 7, 27))
        t = CSTriple(2, 7, 27)
        self.assertEqual(gompf_shift(t, 0).astuple(), t.astuple())
        self.assertEqual(c_shift(t, 0).astuple(), t.astuple())

    def test_shifts_preserve_validity(self):
        for i in self.rng.integers(0, len(self.population), size=1000):
            t = self.population[int(i)]
            for k in range(-5, 6):
                self.assertTrue(is_valid_triple(*gompf_shift(t, k).astuple()))
                self.assertTrue(is_valid_triple(*c_shift(t, k).astuple()))

    def test_dual_examples(self):
        self.assertEqual(dual(CSTriple(1, 1, 2)).astuple(), (1, 1, 3))
        self.assertEqual(dual(CSTriple(2, 7, 27)).astuple(), (2, 7, -22))
        self.assertEqual(dual(dual(CSTriple(2, 7, 27))).astuple(), (2, 7, 27))

    def test_dual_involution(self):
        """p_{5-n}(p_n(c)) ≡ c (mod d)"""
        for t in self.population:
            c_star = dual_poly_value(t.n, t.c)
            self.assertEqual((dual_poly_value(5 - t.n, c_star) - t.c) % t.d, 0, msg=str(t))
            self.assertEqual(dual(dual(t)), t)

    def test_delta(self):
        self.assertEqual(delta_power(1), ((1, -1, 0), (0, 1, 0), (0, 1, 1)))
        self.assertEqual(det(delta_power(1)), 1)
        self.assertEqual(mat_mul(delta_power(2), delta_power(-2)), delta_power(0))
        self.assertEqual(mat_mul(delta_power(1), delta_power(1)), delta_power(2))

    def test_delta_twist_examples(self):
        t = CSTriple(1, 1, 2)
        self.assertEqual(delta_twist(t, 0), make_standard_matrix(t).matrix)
        self.assertEqual(charpoly3(delta_twist(t, 1)), trace_poly(3))
        self.assertEqual(charpoly3(delta_twist(CSTriple(2, 7, 27), -1)), trace_poly(20))

    def test_delta_twist_sample(self):
        """200 个样本的 charpoly 为 f_{n+kd}，且仍是 CS 矩阵"""
        for i in self.rng.integers(0, len(self.population), size=200):
            t = self.population[int(i)]
            k = int(self.rng.integers(-6, 7))
            twisted = delta_twist(t, k)
            self.assertEqual(charpoly3(twisted), trace_poly(t.n + k * t.d))
            self.assertTrue(is_cs_matrix(twisted))

    def test_discriminant(self):
        self.assertEqual(trace_discriminant(2), -23)
        self.assertEqual(trace_discriminant(27), 356377)
        for n in range(-30, 31):
            self.assertEqual(trace_discriminant(n) < 0, 0 <= n <= 5)

    def test_discriminant_agrees_with_sympy(self):
        x = sp.symbols("x")
        for n in (-40, -1, 0, 2, 5, 27, 70, 1402):
            self.assertEqual(trace_discriminant(n), int(sp.discriminant(x**3 - n * x**2 + (n - 1) * x - 1, x)))


if __name__ == '__main__':
    unittest.main()
