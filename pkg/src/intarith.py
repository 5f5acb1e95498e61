"""整数、模多项式与格的精确运算

其余模块都建立在这里的函数之上：线性同余、素数模下的多项式求根、
大整数分解（试除 + Pollard rho）、行式 Hermite 标准形，以及批量计算
x^p mod (f, p) 的 numpy 向量化工具。所有整数运算均为精确运算。
"""
import logging
import random
from dataclasses import dataclass
from functools import lru_cache
from math import gcd, isqrt

import numpy as np

logger = logging.getLogger(__name__)

TRIAL_DIVISION_LIMIT = 10**6
# 低于此界时下列底数的 Miller-Rabin 判定是确定性的
DETERMINISTIC_MR_LIMIT = 341550071728321
MR_BASES = (2, 3, 5, 7, 11, 13, 17)
MR_ROUNDS = 40
# int64 批量路径要求两个余数之积小于 2**62
BATCH_PRIME_LIMIT = 2**30

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47,
                 53, 59, 61, 67, 71, 73, 79, 83, 89, 97)


def solve_linear_congruence(a, b, m):
    """求解 a*x ≡ b (mod m)

    参数:
        a, b: 整数
        m: 正整数模数

    返回:
        (x, m') 其中解集为 x + m'Z，0 <= x < m'；无解时返回 None
    """
    if m <= 0:
        raise ValueError(f"modulus must be positive, got {m}")
    g = gcd(a, m)
    if b % g:
        return None
    mod = m // g
    if mod == 1:
        return 0, 1
    return (b // g) * pow(a // g, -1, mod) % mod, mod


# ---------------------------------------------------------------------------
# Z/p 上的多项式：系数列表，低次在前，末尾无零
# ---------------------------------------------------------------------------

def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_eval(a, x, p):
    acc = 0
    for coef in reversed(a):
        acc = (acc * x + coef) % p
    return acc


def _poly_sub(a, b, p):
    size = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p
           for i in range(size)]
    return _trim(out)


def _poly_mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def _poly_divmod(a, b, p):
    a = list(a)
    db = len(b) - 1
    if len(a) - 1 < db:
        return [], _trim(a)
    inv = pow(b[-1], -1, p)
    q = [0] * (len(a) - db)
    for i in range(len(a) - 1 - db, -1, -1):
        coef = a[i + db] * inv % p
        q[i] = coef
        if coef:
            for j in range(db + 1):
                a[i + j] = (a[i + j] - coef * b[j]) % p
    return _trim(q), _trim(a[:db])


def _monic(a, p):
    inv = pow(a[-1], -1, p)
    return [x * inv % p for x in a]


def _poly_gcd(a, b, p):
    """首一的最大公因式"""
    while b:
        a, b = b, _poly_divmod(a, b, p)[1]
    return _monic(a, p) if a else []


def _poly_powmod(base, e, mod, p):
    result = [1]
    base = _poly_divmod(base, mod, p)[1]
    while e:
        if e & 1:
            result = _poly_divmod(_poly_mul(result, base, p), mod, p)[1]
        base = _poly_divmod(_poly_mul(base, base, p), mod, p)[1]
        e >>= 1
    return result


@dataclass(frozen=True)
class ModPoly:
    """模 m 的整系数多项式，系数低次在前并约化到 [0, m)"""
    modulus: int
    coeffs: tuple

    def __post_init__(self):
        if self.modulus <= 1:
            raise ValueError(f"modulus must exceed 1, got {self.modulus}")
        reduced = _trim([int(c) % self.modulus for c in self.coeffs])
        object.__setattr__(self, "coeffs", tuple(reduced))

    @classmethod
    def from_ints(cls, coeffs, modulus):
        return cls(modulus, tuple(coeffs))

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    def __call__(self, x):
        return _poly_eval(self.coeffs, x, self.modulus)

    def derivative(self):
        return ModPoly(self.modulus, tuple(i * c for i, c in enumerate(self.coeffs))[1:])


def _coerce_poly(f, p):
    if isinstance(f, ModPoly):
        if p is not None and p != f.modulus:
            raise ValueError(f"polynomial is reduced mod {f.modulus}, not mod {p}")
        return list(f.coeffs), f.modulus
    if p is None:
        raise ValueError("a modulus is required for a plain coefficient list")
    return [int(c) for c in f], int(p)


def _split_linear(g, p):
    """把若干互异一次因子之积（首一）拆成根，p 为奇素数"""
    if len(g) <= 1:
        return []
    if len(g) == 2:
        return [(-g[0]) % p]
    half = (p - 1) // 2
    for shift in range(p):
        w = _poly_sub(_poly_powmod([shift, 1], half, g, p), [1], p)
        common = _poly_gcd(g, w, p)
        if 1 < len(common) < len(g):
            rest = _poly_divmod(g, common, p)[0]
            return _split_linear(common, p) + _split_linear(rest, p)
    raise ArithmeticError(f"equal-degree splitting failed mod {p}")


def poly_roots_mod_p(f, p=None, *, x_pow_p=None, check_prime=True):
    """素数 p 下多项式的全部根

    通过 gcd(x^p - x, f) 取出一次因子部分，再用 (x+a)^((p-1)/2) 做确定性的
    等次分裂。小素数直接逐个代入。

    参数:
        f: ModPoly 或整数系数列表（低次在前）
        p: 素数模数；f 为 ModPoly 时可省略
        x_pow_p: 可选，预先算好的 x^p mod (monic f, p) 的系数
        check_prime: 是否先做素性检验

    返回:
        升序排列的根列表
    """
    coeffs, p = _coerce_poly(f, p)
    if check_prime and not is_probable_prime(p):
        raise ValueError(f"modulus {p} is not prime")
    g = _trim([c % p for c in coeffs])
    if not g:
        raise ValueError("the zero polynomial vanishes at every residue")
    if len(g) == 1:
        return []
    if p <= 2 * len(g):
        return [r for r in range(p) if _poly_eval(g, r, p) == 0]
    g = _monic(g, p)
    if x_pow_p is None:
        h = _poly_powmod([0, 1], p, g, p)
    else:
        h = _trim([int(v) % p for v in x_pow_p])
    linear = _poly_gcd(g, _poly_sub(h, [0, 1], p), p)
    return sorted(_split_linear(linear, p))


def multiple_roots_mod_p(f, p=None, *, check_prime=True):
    """重根，即 gcd(f, f') 的根"""
    coeffs, p = _coerce_poly(f, p)
    if check_prime and not is_probable_prime(p):
        raise ValueError(f"modulus {p} is not prime")
    g = ModPoly(p, tuple(coeffs))
    if g.is_zero():
        raise ValueError("the zero polynomial vanishes at every residue")
    if g.degree <= 1:
        return []
    der = g.derivative()
    # f' ≡ 0 时每个根都是重根
    common = _monic(list(g.coeffs), p) if der.is_zero() else _poly_gcd(list(g.coeffs), list(der.coeffs), p)
    if len(common) <= 1:
        return []
    return poly_roots_mod_p(common, p, check_prime=False)


# ---------------------------------------------------------------------------
# 素性与分解
# ---------------------------------------------------------------------------

def _mr_round(n, a, d, s):
    x = pow(a, d, n)
    if x in (1, n - 1):
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_probable_prime(n):
    """Miller-Rabin 素性检验，n < 3.4e14 时为确定性判定"""
    if n < 2:
        return False
    for q in _SMALL_PRIMES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    if n < DETERMINISTIC_MR_LIMIT:
        bases = MR_BASES
    else:
        rng = random.Random(n)
        bases = [rng.randrange(2, n - 1) for _ in range(MR_ROUNDS)]
    return all(_mr_round(n, a, d, s) for a in bases)


def pollard_rho(n, seed=1):
    """返回合数 n 的一个非平凡因子（Brent 变体）"""
    if n % 2 == 0:
        return 2
    rng = random.Random(seed * n + 1)
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = gcd(abs(x - ys), n)
        if g != n:
            return g
        logger.debug("pollard rho cycle collapsed for %d, retrying", n)


@lru_cache(maxsize=4)
def _trial_primes(limit):
    return tuple(primes_up_to(limit).tolist())


def factorize(n, trial_limit=TRIAL_DIVISION_LIMIT):
    """|n| 的完全分解

    参数:
        n: 非零整数，符号由调用方处理
        trial_limit: 试除上界，超出部分交给 Pollard rho

    返回:
        [(p, e), ...]，按 p 升序
    """
    if n == 0:
        raise ValueError("cannot factor zero")
    m = abs(n)
    factors = {}
    if m > 1 and not is_probable_prime(m):
        for p in _trial_primes(trial_limit):
            if p * p > m:
                break
            if m % p:
                continue
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            factors[p] = e
            if m == 1 or is_probable_prime(m):
                break
    stack = [m] if m > 1 else []
    while stack:
        k = stack.pop()
        if is_probable_prime(k):
            factors[k] = factors.get(k, 0) + 1
            continue
        root = isqrt(k)
        if root * root == k:
            stack.extend((root, root))
            continue
        g = pollard_rho(k)
        stack.extend((g, k // g))
    return sorted(factors.items())


def primes_up_to(limit):
    """埃氏筛，返回 [2, limit] 内全部素数（int64 数组）"""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    sieve[4::2] = False
    for i in range(3, isqrt(limit) + 1, 2):
        if sieve[i]:
            sieve[i * i::2 * i] = False
    return np.nonzero(sieve)[0].astype(np.int64)


def _batch_square(r, mod):
    count, deg = r.shape
    out = np.zeros((count, 2 * deg - 1), dtype=np.int64)
    for i in range(deg):
        for j in range(deg):
            out[:, i + j] = (out[:, i + j] + r[:, i] * r[:, j] % mod) % mod
    return out


def _batch_reduce(r, tail, mod):
    r = r.copy()
    deg = tail.size
    for k in range(r.shape[1] - 1, deg - 1, -1):
        top = r[:, k]
        for i in range(deg):
            if tail[i]:
                r[:, k - deg + i] = (r[:, k - deg + i] + top * tail[i]) % mod
    return r[:, :deg]


def batch_x_pow_mod(f, primes):
    """对一组素数同时计算 x^p mod (f, p)

    参数:
        f: 首一整系数多项式，低次在前
        primes: 素数数组，每个都小于 2**30

    返回:
        形状 (len(primes), deg f) 的 int64 数组，第 i 行是 x^{p_i} 的余式系数
    """
    f = [int(c) for c in f]
    if len(f) < 2 or f[-1] != 1:
        raise ValueError("batch exponentiation needs a monic polynomial of degree >= 1")
    deg = len(f) - 1
    primes = np.asarray(primes, dtype=np.int64)
    if primes.size == 0:
        return np.zeros((0, deg), dtype=np.int64)
    if primes.min() < 2 or primes.max() >= BATCH_PRIME_LIMIT:
        raise ValueError(f"batch path needs primes in [2, {BATCH_PRIME_LIMIT})")
    # x^deg ≡ -(f_0 + f_1 x + ... )
    tail = -np.array(f[:deg], dtype=np.int64)
    result = np.zeros((primes.size, deg), dtype=np.int64)
    result[:, 0] = 1
    zero_col = np.zeros((primes.size, 1), dtype=np.int64)
    for bit in range(int(primes.max()).bit_length() - 1, -1, -1):
        result = _batch_reduce(_batch_square(result, primes), tail, primes)
        odd = ((primes >> bit) & 1).astype(bool)
        if odd.any():
            shifted = _batch_reduce(np.hstack([zero_col, result]), tail, primes)
            result = np.where(odd[:, None], shifted, result)
    return result


# ---------------------------------------------------------------------------
# 整数矩阵与格
# ---------------------------------------------------------------------------

def _echelon(rows, ncols):
    a = [list(r) for r in rows if any(r)]
    pivot_row = 0
    for col in range(ncols):
        if pivot_row >= len(a):
            break
        while True:
            candidates = [i for i in range(pivot_row, len(a)) if a[i][col]]
            if not candidates:
                break
            best = min(candidates, key=lambda i: abs(a[i][col]))
            a[pivot_row], a[best] = a[best], a[pivot_row]
            piv = a[pivot_row][col]
            settled = True
            for i in range(pivot_row + 1, len(a)):
                if a[i][col]:
                    q = a[i][col] // piv
                    a[i] = [x - q * y for x, y in zip(a[i], a[pivot_row])]
                    if a[i][col]:
                        settled = False
            if settled:
                break
        if a[pivot_row][col] == 0:
            continue
        if a[pivot_row][col] < 0:
            a[pivot_row] = [-x for x in a[pivot_row]]
        piv = a[pivot_row][col]
        for i in range(pivot_row):
            q = a[i][col] // piv
            if q:
                a[i] = [x - q * y for x, y in zip(a[i], a[pivot_row])]
        pivot_row += 1
    return [tuple(r) for r in a[:pivot_row]]


def hnf(basis):
    """行式 Hermite 标准形

    上三角、主元为正、主元上方元素约化到 [0, 主元)。输入的行须张成满秩格。
    """
    rows = [tuple(int(x) for x in r) for r in basis]
    if not rows:
        raise ValueError("empty basis")
    ncols = len(rows[0])
    result = _echelon(rows, ncols)
    if len(result) != ncols:
        raise ValueError(f"basis has rank {len(result)}, expected {ncols}")
    return tuple(result)


def lattice_contains(h, v):
    """判断整向量 v 是否在满秩上三角基 h 张成的格中"""
    v = list(v)
    for i, row in enumerate(h):
        if v[i] % row[i]:
            return False
        q = v[i] // row[i]
        v = [x - q * y for x, y in zip(v, row)]
    return not any(v)


def det(matrix):
    """Bareiss 无分数消元求整数方阵的行列式"""
    a = [list(r) for r in matrix]
    size = len(a)
    if size == 0:
        return 1
    sign, prev = 1, 1
    for k in range(size - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, size) if a[i][k]), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[-1][-1]


def adjugate(matrix):
    size = len(matrix)
    adj = [[0] * size for _ in range(size)]
    for i in range(size):
        for j in range(size):
            minor = [row[:j] + row[j + 1:] for k, row in enumerate(map(list, matrix)) if k != i]
            adj[j][i] = (-1) ** (i + j) * det(minor)
    return tuple(tuple(r) for r in adj)


def mat_mul(a, b):
    cols = list(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in cols) for row in a)


def identity(size):
    return tuple(tuple(int(i == j) for j in range(size)) for i in range(size))


def resultant(f, g):
    """Sylvester 行列式，f、g 为低次在前的整系数列表"""
    f = _trim([int(c) for c in f])
    g = _trim([int(c) for c in g])
    if not f or not g:
        return 0
    m, k = len(f) - 1, len(g) - 1
    size = m + k
    if size == 0:
        return 1
    hf, hg = f[::-1], g[::-1]
    rows = []
    for i in range(k):
        rows.append([0] * i + hf + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + hg + [0] * (size - k - 1 - i))
    return det(rows)


def congruence_kernel(matrix, modulus):
    """{z ∈ Z^k : z·T ≡ 0 (mod Q)} 的 HNF 基

    逐列收紧：对当前基 B 的像 B·t 解一个线性同余方程组，
    并把 Q·I 放进生成元里控制系数增长。
    """
    k = len(matrix)
    cols = len(matrix[0]) if k else 0
    eye = identity(k)
    scaled = [tuple(modulus * x for x in row) for row in eye]
    basis = list(eye)
    for col in range(cols):
        column = [matrix[i][col] for i in range(k)]
        values = [sum(b[i] * column[i] for i in range(k)) % modulus for b in basis]
        if not any(values):
            continue
        rows = [(values[i],) + eye[i] for i in range(k)]
        rows.append((modulus,) + (0,) * k)
        ech = _echelon(rows, k + 1)
        coeffs = [r[1:] for r in ech[1:]]
        basis = [tuple(sum(c[i] * basis[i][j] for i in range(k)) for j in range(k)) for c in coeffs]
        basis = list(hnf(basis + scaled))
    return hnf(basis)
