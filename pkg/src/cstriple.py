"""标准 CS 三元组 (c, d, n) 与对应的 3x3 整数矩阵

三元组 (c, d, n) 满足 d != 0 且 d | f_n(c)，其中
f_n(x) = x^3 - n x^2 + (n-1) x - 1。它命名标准矩阵
X = [[0, a, b], [0, c, d], [1, 0, n - c]]，a = -f_n(c)/d，b = (c-1)(n-c-1)。
"""
import logging
import re
from dataclasses import dataclass

from src.intarith import det, identity, mat_mul

logger = logging.getLogger(__name__)

DELTA = ((1, -1, 0), (0, 1, 0), (0, 1, 1))

_TRIPLE_RE = re.compile(r"^\s*\(?\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*\)?\s*$")


class InvalidTripleError(ValueError):
    """d = 0 或 d 不整除 f_n(c)"""


def trace_poly(n):
    """f_n 的系数，低次在前"""
    return (-1, n - 1, -n, 1)


def trace_poly_value(n, x):
    return x * x * x - n * x * x + (n - 1) * x - 1


def trace_poly_derivative_value(n, x):
    return 3 * x * x - 2 * n * x + n - 1


def trace_discriminant(n):
    """f_n 的判别式；0 <= n <= 5 时为负（一实两复根），其余为正"""
    return n**4 - 10 * n**3 + 31 * n**2 - 30 * n - 23


def dual_poly_value(n, c):
    """p_n(c) = c^2 + (1-n)c + 1"""
    return c * c + (1 - n) * c + 1


def is_valid_triple(c, d, n):
    return d != 0 and trace_poly_value(n, c) % d == 0


@dataclass(frozen=True, eq=False)
class CSTriple:
    """合法的 CS 三元组；相等性与哈希按规范形（d > 0，1 <= c <= d）比较"""
    c: int
    d: int
    n: int

    def __post_init__(self):
        for name in ("c", "d", "n"):
            object.__setattr__(self, name, int(getattr(self, name)))
        if not is_valid_triple(self.c, self.d, self.n):
            raise InvalidTripleError(f"({self.c},{self.d},{self.n}) is not a CS triple")

    @property
    def key(self):
        d = abs(self.d)
        return (self.c % d or d, d, self.n)

    def canonical(self):
        return CSTriple(*self.key)

    def sort_key(self):
        """表中的最小序：先比 d 再比 c"""
        c, d, n = self.key
        return (d, c, n)

    def __eq__(self, other):
        if not isinstance(other, CSTriple):
            return NotImplemented
        return self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __str__(self):
        return f"({self.c},{self.d},{self.n})"

    def astuple(self):
        return (self.c, self.d, self.n)

    def to_json(self):
        return {"c": self.c, "d": self.d, "n": self.n}

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, dict):
            return cls(obj["c"], obj["d"], obj["n"])
        c, d, n = obj
        return cls(c, d, n)

    @classmethod
    def parse(cls, text):
        match = _TRIPLE_RE.match(text)
        if match is None:
            raise InvalidTripleError(f"cannot parse triple from {text!r}")
        return cls(*(int(g) for g in match.groups()))


@dataclass(frozen=True)
class StandardCSMatrix:
    a: int
    b: int
    c: int
    d: int
    n: int

    @property
    def matrix(self):
        return ((0, self.a, self.b), (0, self.c, self.d), (1, 0, self.n - self.c))


def charpoly3(m):
    """3x3 矩阵的特征多项式 x^3 - tr x^2 + s x - det，低次在前"""
    trace = m[0][0] + m[1][1] + m[2][2]
    minors = (m[0][0] * m[1][1] - m[0][1] * m[1][0]
              + m[0][0] * m[2][2] - m[0][2] * m[2][0]
              + m[1][1] * m[2][2] - m[1][2] * m[2][1])
    return (-det(m), minors, -trace, 1)


def is_cs_matrix(m):
    eye = identity(3)
    shifted = tuple(tuple(x - y for x, y in zip(row, erow)) for row, erow in zip(m, eye))
    return det(m) == 1 and det(shifted) == 1


def make_standard_matrix(t):
    """三元组对应的标准 CS 矩阵，构造后检查 det X = det(X - I) = 1"""
    c, d, n = t.c, t.d, t.n
    a = -trace_poly_value(n, c) // d
    b = (c - 1) * (n - c - 1)
    x = StandardCSMatrix(a, b, c, d, n)
    if a * d - b * c != 1 or not is_cs_matrix(x.matrix):
        raise ArithmeticError(f"standard matrix of {t} fails the determinant checks")
    return x


def delta_power(k):
    # Δ = I + N 且 N^2 = 0
    return ((1, -k, 0), (0, 1, 0), (0, k, 1))


def gompf_shift(t, k):
    return CSTriple(t.c, t.d, t.n + k * t.d)


def c_shift(t, k):
    return CSTriple(t.c + k * t.d, t.d, t.n)


def dual(t):
    """(c, d, n) -> (p_n(c), d, 5 - n)，c 约化到 [1, d]"""
    d = abs(t.d)
    c_star = dual_poly_value(t.n, t.c) % d or d
    if not is_valid_triple(c_star, d, 5 - t.n):
        raise ArithmeticError(f"dual of {t} is not a CS triple")
    return CSTriple(c_star, d, 5 - t.n)


def delta_twist(t, k):
    """X_{c,d,n} · Δ^k，其特征多项式应为 f_{n+kd}"""
    product = mat_mul(make_standard_matrix(t).matrix, delta_power(k))
    if charpoly3(product) != trace_poly(t.n + k * t.d):
        raise ArithmeticError(f"delta twist of {t} by {k} has the wrong characteristic polynomial")
    return product


def valid_triples(n, d_max):
    """迹为 n、d <= d_max、1 <= c <= d 的全部三元组，按 (d, c) 排序"""
    for d in range(1, d_max + 1):
        for c in range(1, d + 1):
            if trace_poly_value(n, c) % d == 0:
                yield CSTriple(c, d, n)
