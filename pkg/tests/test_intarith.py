import unittest
import numpy as np
import sympy as sp
import sys
import os
from math import prod

# 添加项目根目录到Python路径
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.intarith import (
    ModPoly,
    batch_x_pow_mod,
    congruence_kernel,
    det,
    factorize,
    hnf,
    is_probable_prime,
    lattice_contains,
    multiple_roots_mod_p,
    poly_roots_mod_p,
    pollard_rho,
    primes_up_to,
    resultant,
    solve_linear_congruence,
)

QUARTIC = (-1, 2, 1, -2, 1)


def f_coeffs(n):
    return (-1, n - 1, -n, 1)


class TestLinearCongruence(unittest.TestCase):

    def setUp(self):
        """固定随机种子"""
        self.rng = np.random.default_rng(42)

    def test_examples(self):
        """已知例子"""
        self.assertEqual(solve_linear_congruence(3, 5, 7), (4, 7))
        self.assertEqual(solve_linear_congruence(1, 0, 5), (0, 5))
        self.assertIsNone(solve_linear_congruence(2, 1, 4))
        self.assertEqual(solve_linear_congruence(6, 4, 10), (4, 5))

    def test_rejects_nonpositive_modulus(self):
        with self.assertRaises(ValueError):
            solve_linear_congruence(1, 1, 0)

    def test_random_against_exhaustive(self):
        """随机样本：返回的解满足同余；可解性与穷举一致"""
        for _ in range(300):
            a, b = (int(v) for v in self.rng.integers(-10**6, 10**6, size=2))
            m = int(self.rng.integers(1, 200))
            result = solve_linear_congruence(a, b, m)
            solvable = any((a * x - b) % m == 0 for x in range(m))
            self.assertEqual(result is not None, solvable)
            if result is not None:
                x, mod = result
                self.assertEqual((a * x - b) % m, 0)
                self.assertEqual((a * (x + mod) - b) % m, 0)


class TestPolyRoots(unittest.TestCase):

    def test_quartic_examples(self):
        self.assertIn(2, poly_roots_mod_p(QUARTIC, 7))
        self.assertEqual(poly_roots_mod_p(QUARTIC, 2), [])
        self.assertEqual(poly_roots_mod_p(QUARTIC, 3), [])
        self.assertEqual(poly_roots_mod_p(ModPoly.from_ints([0, 1], 5)), [0])

    def test_agrees_with_brute_force(self):
        """p <= 1000 时与逐个代入一致"""
        for p in primes_up_to(1000).tolist():
            for coeffs in (QUARTIC, f_coeffs(27), f_coeffs(-13), (3, 0, 1)):
                expected = [r for r in range(p) if sum(c * r**i for i, c in enumerate(coeffs)) % p == 0]
                if all(c % p == 0 for c in coeffs):
                    continue
                self.assertEqual(poly_roots_mod_p(coeffs, p), expected, msg=f"p={p} f={coeffs}")

    def test_precomputed_power(self):
        """提供 x^p 的余式时结果不变"""
        primes = np.array([11, 17, 23, 31, 41, 1009, 104729])
        table = batch_x_pow_mod(QUARTIC, primes)
        for p, row in zip(primes.tolist(), table.tolist()):
            self.assertEqual(poly_roots_mod_p(QUARTIC, p, x_pow_p=row), poly_roots_mod_p(QUARTIC, p))

    def test_composite_modulus_rejected(self):
        with self.assertRaises(ValueError):
            poly_roots_mod_p(QUARTIC, 15)

    def test_zero_polynomial_rejected(self):
        with self.assertRaises(ValueError):
            poly_roots_mod_p([7, 14], 7)

    def test_multiple_roots(self):
        self.assertEqual(multiple_roots_mod_p(f_coeffs(27), 7), [2])
        self.assertEqual(multiple_roots_mod_p(f_coeffs(2), 5), [])
        self.assertEqual(multiple_roots_mod_p([1, -2, 1], 3), [1])
        # x^3 - 1 = (x - 1)^3 mod 3，导数恒为零
        self.assertEqual(multiple_roots_mod_p([-1, 0, 0, 1], 3), [1])
        self.assertEqual(multiple_roots_mod_p(ModPoly.from_ints(f_coeffs(27), 7)), [2])
        with self.assertRaises(ValueError):
            multiple_roots_mod_p([5, 10, 15], 5)

    def test_mod_poly(self):
        f = ModPoly.from_ints([-1, 0, 0, 1], 3)
        self.assertEqual(f.coeffs, (2, 0, 0, 1))
        self.assertEqual(f.degree, 3)
        self.assertTrue(f.derivative().is_zero())
        self.assertEqual(ModPoly.from_ints(f_coeffs(27), 7).derivative().coeffs, (26 % 7, (-2 * 27) % 7, 3))
        self.assertTrue(ModPoly.from_ints([7, 14], 7).is_zero())


class TestBatchPower(unittest.TestCase):

    def test_matches_scalar_pow(self):
        """一次多项式 x - r 时 x^p 的余式就是 r^p mod p = r"""
        primes = primes_up_to(500)[5:]
        table = batch_x_pow_mod([-3, 1], primes)
        np.testing.assert_array_equal(table[:, 0], 3 % primes)

    def test_quartic_frobenius(self):
        """x^p 的余式在每个根处取值为 r^p ≡ r"""
        primes = primes_up_to(3000)[10:]
        table = batch_x_pow_mod(QUARTIC, primes)
        for p, row in zip(primes.tolist(), table.tolist()):
            for r in poly_roots_mod_p(QUARTIC, p):
                self.assertEqual(sum(c * r**i for i, c in enumerate(row)) % p, r)

    def test_rejects_large_primes(self):
        with self.assertRaises(ValueError):
            batch_x_pow_mod(QUARTIC, np.array([2**31 - 1]))


class TestFactorize(unittest.TestCase):

    def test_examples(self):
        self.assertEqual(factorize(49), [(7, 2)])
        self.assertEqual(factorize(-49), [(7, 2)])
        self.assertEqual(factorize(1), [])
        self.assertEqual(factorize(356377), [(7, 3), (1039, 1)])

    def test_large_semiprime(self):
        """两个大于试除上界的素因子"""
        p, q = 1000003, 1000033
        self.assertEqual(factorize(p * q), [(p, 1), (q, 1)])
        self.assertEqual(factorize(p * p * q), [(p, 2), (q, 1)])

    def test_products_multiply_back(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            n = int(rng.integers(2, 10**12))
            factors = factorize(n)
            self.assertEqual(prod(p**e for p, e in factors), n)
            self.assertTrue(all(is_probable_prime(p) for p, _ in factors))

    def test_zero_rejected(self):
        with self.assertRaises(ValueError):
            factorize(0)

    def test_agrees_with_sympy(self):
        """与 sympy.factorint 对照"""
        rng = np.random.default_rng(11)
        for _ in range(40):
            n = int(rng.integers(2, 10**15))
            self.assertEqual(factorize(n), sorted((int(p), e) for p, e in sp.factorint(n).items()))

    def test_pollard_rho_divides(self):
        n = 1000003 * 999983
        g = pollard_rho(n)
        self.assertIn(g, (1000003, 999983))

    def test_primality(self):
        self.assertTrue(is_probable_prime(32455777))
        self.assertFalse(is_probable_prime(341550071728321))
        self.assertTrue(is_probable_prime(2**61 - 1))
        self.assertFalse(is_probable_prime(1))
        sieve = set(primes_up_to(2000).tolist())
        self.assertEqual({n for n in range(2000) if is_probable_prime(n)}, sieve)


class TestLattice(unittest.TestCase):

    def test_identity(self):
        eye = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
        self.assertEqual(hnf(eye), eye)

    def test_ideal_rows(self):
        """⟨θ - 2, 7⟩ 在 n = 27 时的生成元"""
        rows = [(7, 0, 0), (0, 7, 0), (0, 0, 7), (-2, 1, 0), (0, -2, 1), (1, -26, 25)]
        h = hnf(rows)
        self.assertEqual(det(h), 7)
        # 核为 {a + bθ + cθ² : a + 2b + 4c ≡ 0 (mod 7)}
        self.assertEqual(h, ((1, 0, 5), (0, 1, 3), (0, 0, 7)))

    def test_hnf_shape_and_idempotence(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            rows = [tuple(int(x) for x in rng.integers(-30, 30, size=3)) for _ in range(4)]
            try:
                h = hnf(rows)
            except ValueError:
                continue
            self.assertEqual(hnf(h), h)
            for i in range(3):
                self.assertGreater(h[i][i], 0)
                for j in range(i):
                    self.assertEqual(h[i][j], 0)
                    self.assertTrue(0 <= h[j][i] < h[i][i])
            # 行空间互相包含
            for row in rows:
                self.assertTrue(lattice_contains(h, row))
            doubled = hnf([tuple(2 * x for x in row) for row in rows])
            self.assertEqual(det(doubled), 8 * det(h))

    def test_rank_deficient(self):
        with self.assertRaises(ValueError):
            hnf([(1, 2, 3), (2, 4, 6)])

    def test_det(self):
        self.assertEqual(det(((2, 0, 0), (0, 3, 0), (0, 0, 4))), 24)
        self.assertEqual(det(((0, 1), (1, 0))), -1)
        self.assertEqual(det(((1, 2), (2, 4))), 0)

    def test_resultant_gives_discriminant(self):
        """disc(f_n) = -Res(f_n, f_n')"""
        for n in range(-20, 21):
            f = f_coeffs(n)
            der = (n - 1, -2 * n, 3)
            self.assertEqual(-resultant(f, der), n**4 - 10 * n**3 + 31 * n**2 - 30 * n - 23)

    def test_resultant_agrees_with_sympy(self):
        x = sp.symbols("x")
        for f, g in ((QUARTIC, (-1, 2)), (f_coeffs(27), (26, -54, 3)), ((3, 0, 1), (1, 1))):
            expected = sp.resultant(sum(c * x**i for i, c in enumerate(f)), sum(c * x**i for i, c in enumerate(g)), x)
            self.assertEqual(resultant(f, g), int(expected))

    def test_congruence_kernel(self):
        t = ((1, 2), (3, 4), (5, 6))
        basis = congruence_kernel(t, 7)
        self.assertEqual(det(basis) % 7, 0)
        for row in basis:
            for col in range(2):
                self.assertEqual(sum(row[i] * t[i][col] for i in range(3)) % 7, 0)
        # 模 1 时整个 Z^3 都在核中
        self.assertEqual(congruence_kernel(t, 1), ((1, 0, 0), (0, 1, 0), (0, 0, 1)))


if __name__ == '__main__':
    unittest.main()
