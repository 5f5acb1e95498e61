"""Z[θ_n] 中的分式理想

理想记作 (1/den)·L，L 是以 (1, θ, θ²) 为坐标、取行式 HNF 的整格。
由 Latimer-MacDuffee-Taussky 对应，三元组 (c, d, n) 对应理想 ⟨θ - c, d⟩，
矩阵相似等价于理想类相等，因此这里的可逆性与等价判定直接回答矩阵问题。

等价判定的思路：λJ = I 的见证 λ 必在 (I:J) 中且 |N(λ)| = N(I)/N(J)；
用单位 θ 与 θ - 1 把 λ 约化到 Minkowski 嵌入下的一个有界区域，
再在 LLL 约化后的基上枚举格点。
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Union

import numpy as np

from src.cstriple import (CSTriple, trace_discriminant, trace_poly_derivative_value,
                          trace_poly_value)
from src.intarith import (adjugate, congruence_kernel, det, factorize, hnf, identity,
                          lattice_contains, mat_mul)

logger = logging.getLogger(__name__)

DEFAULT_BOUND = 32
BOUND_CAP = 4096
# 区域按相对量放大，吸收浮点嵌入的误差
REGION_SLACK = 1e-6
_CHUNK = 1 << 18


class OrderMismatchError(ValueError):
    """两个理想不在同一个序中"""


@dataclass(frozen=True)
class CubicOrder:
    """Z[θ]，θ^3 = nθ^2 - (n-1)θ + 1"""
    n: int

    def times_theta(self, a):
        a0, a1, a2 = a
        return (a2, a0 - (self.n - 1) * a2, a1 + self.n * a2)

    def mult_matrix(self, a):
        """乘以 a 的矩阵 M_a（行向量约定：coords(x·a) = x·M_a）"""
        row0 = tuple(a)
        row1 = self.times_theta(row0)
        return (row0, row1, self.times_theta(row1))

    def multiply(self, a, b):
        m = self.mult_matrix(b)
        return tuple(sum(a[k] * m[k][j] for k in range(3)) for j in range(3))

    def element_norm(self, a):
        return det(self.mult_matrix(a))

    @property
    def discriminant(self):
        return trace_discriminant(self.n)


@dataclass(frozen=True)
class OrderIdeal:
    """分式理想 (1/den)·rowspan(basis)，basis 为 HNF 且与 den 互素"""
    order: CubicOrder
    den: int
    basis: tuple

    @property
    def norm(self):
        return Fraction(det(self.basis), self.den**3)

    def to_json(self):
        return {"n": self.order.n, "den": self.den, "basis": [list(row) for row in self.basis]}

    @classmethod
    def from_json(cls, obj):
        return make_ideal(CubicOrder(obj["n"]), obj["basis"], obj["den"])


@dataclass(frozen=True)
class Equivalent:
    """λ = witness / den 满足 λJ = I"""
    witness: tuple
    den: int = 1


@dataclass(frozen=True)
class NotEquivalent:
    reason: str


@dataclass(frozen=True)
class Inconclusive:
    bound: int


ClassVerdict = Union[Equivalent, NotEquivalent, Inconclusive]


def make_ideal(order, rows, den=1):
    if den <= 0:
        raise ValueError(f"denominator must be positive, got {den}")
    h = hnf(rows)
    g = gcd(den, *(x for row in h for x in row))
    return OrderIdeal(order, den // g, tuple(tuple(x // g for x in row) for row in h))


def _check_same_order(first, second):
    if first.order != second.order:
        raise OrderMismatchError(f"ideals live in Z[θ_{first.order.n}] and Z[θ_{second.order.n}]")


def unit_ideal(order):
    return OrderIdeal(order, 1, identity(3))


def ideal_from_triple(t):
    """⟨θ - c, d⟩，由 d, dθ, dθ² 与 (θ - c), θ(θ - c), θ²(θ - c) 生成"""
    if not isinstance(t, CSTriple):
        t = CSTriple(*t)
    order = CubicOrder(t.n)
    d = abs(t.d)
    gen = (-t.c, 1, 0)
    gen1 = order.times_theta(gen)
    rows = [(d, 0, 0), (0, d, 0), (0, 0, d), gen, gen1, order.times_theta(gen1)]
    ideal = make_ideal(order, rows)
    if ideal.norm != d:
        raise ArithmeticError(f"ideal of {t} has norm {ideal.norm}, expected {d}")
    return ideal


def principal_ideal(order, coords, den=1):
    if not any(coords):
        raise ValueError("the zero element does not generate a fractional ideal")
    return make_ideal(order, order.mult_matrix(coords), den)


def norm(ideal):
    return ideal.norm


def is_theta_closed(ideal):
    return all(lattice_contains(ideal.basis, ideal.order.times_theta(row)) for row in ideal.basis)


def mul(first, second):
    _check_same_order(first, second)
    order = first.order
    rows = [order.multiply(a, b) for a in first.basis for b in second.basis]
    return make_ideal(order, rows, first.den * second.den)


def colon(first, second):
    """(I:J) = {x : xJ ⊆ I}

    设 m = det(L_J)，则 m ∈ L_J，故 x = z·L_I·d_J/(m·d_I)，z 为整向量。
    对 L_J 的每一行 b 要求 z·L_I·M_b·L_I^{-1} 为整，即
    z·(L_I·M_b·adj L_I) ≡ 0 (mod m·det L_I)。
    """
    _check_same_order(first, second)
    li, lj = first.basis, second.basis
    det_i = det(li)
    m = det(lj)
    adj_i = adjugate(li)
    blocks = [mat_mul(mat_mul(li, first.order.mult_matrix(b)), adj_i) for b in lj]
    system = [sum((blk[r] for blk in blocks), ()) for r in range(3)]
    kernel = congruence_kernel(system, m * det_i)
    rows = [tuple(second.den * x for x in row) for row in mat_mul(kernel, li)]
    return make_ideal(first.order, rows, m * first.den)


@lru_cache(maxsize=1 << 16)
def multiplier_ring(ideal):
    return colon(ideal, ideal)


@lru_cache(maxsize=1 << 16)
def is_invertible(ideal):
    """I·(R:I) = R"""
    unit = unit_ideal(ideal.order)
    return mul(ideal, colon(unit, ideal)) == unit


def is_invertible_fast(t):
    """按 d 的素数幂分解逐个判断 ⟨θ - c, p^e⟩ 的可逆性

    c 是 f_n mod p 的单根，或 p^2 不整除 f_n(c)，则素理想可逆；
    p^{e+1} 不整除 f_n(c) 时素数幂理想也可逆；剩下的情形交给 is_invertible。
    """
    fn = trace_poly_value(t.n, t.c)
    der = trace_poly_derivative_value(t.n, t.c)
    for p, e in factorize(t.d):
        prime_ok = der % p != 0 or fn % (p * p) != 0
        if prime_ok or fn % p ** (e + 1) != 0:
            continue
        if e == 1:
            return False
        if not is_invertible(ideal_from_triple(CSTriple(t.c, p**e, t.n))):
            return False
    return True


# ---------------------------------------------------------------------------
# 理想类等价
# ---------------------------------------------------------------------------

@lru_cache(maxsize=1024)
def _embedding_data(n):
    """返回 (embed, slack)

    embed[k] 是 θ^k 在 R^3 中的嵌入坐标（实情形三个实根；复情形为
    (σ1, Re σ2, Im σ2)）。slack[i] 是单位约化后 log|σ_i(λ)| - log(t)/3 的上界；
    单位对数向量线性相关时 slack 为 None。
    """
    roots = np.roots([1.0, -float(n), float(n - 1), -1.0])
    if trace_discriminant(n) > 0:
        r = np.sort(roots.real)
        embed = np.vstack([np.ones(3), r, r * r])
        logs = np.log(np.abs(np.vstack([r, r - 1.0])))
        if abs(np.linalg.det(logs[:, :2])) < 1e-9:
            return embed, None
        return embed, np.abs(logs).sum(axis=0) / 2
    real = roots[np.argmin(np.abs(roots.imag))].real
    z = roots[np.argmax(roots.imag)]
    embed = np.array([[1.0, 1.0, 0.0],
                      [real, z.real, z.imag],
                      [real * real, (z * z).real, (z * z).imag]])
    units = [np.log(np.abs(np.array([real - s, z - s]))) for s in (0.0, 1.0)]
    units = [v for v in units if np.abs(v).max() > 1e-9]
    if not units:
        return embed, None
    shortest = min(units, key=lambda v: np.abs(v).sum())
    half = np.abs(shortest) / 2
    return embed, np.array([half[0], half[1], half[1]])


def _gram_schmidt(b):
    size = b.shape[0]
    star = np.zeros_like(b)
    mu = np.zeros((size, size))
    for i in range(size):
        star[i] = b[i]
        for j in range(i):
            mu[i, j] = b[i] @ star[j] / (star[j] @ star[j])
            star[i] = star[i] - mu[i, j] * star[j]
    return star, mu


def _lll_transform(rows, delta=0.75, max_swaps=10000):
    """浮点 LLL，返回精确的整数幺模变换 U（约化基 = U·rows）"""
    b = np.array(rows, dtype=float)
    size = b.shape[0]
    u = [list(r) for r in identity(size)]
    k, swaps = 1, 0
    while k < size and swaps < max_swaps:
        for j in range(k - 1, -1, -1):
            q = int(np.rint(_gram_schmidt(b)[1][k, j]))
            if q:
                b[k] -= q * b[j]
                u[k] = [x - q * y for x, y in zip(u[k], u[j])]
        star, mu = _gram_schmidt(b)
        if star[k] @ star[k] >= (delta - mu[k, k - 1] ** 2) * (star[k - 1] @ star[k - 1]):
            k += 1
        else:
            b[[k - 1, k]] = b[[k, k - 1]]
            u[k - 1], u[k] = u[k], u[k - 1]
            k = max(k - 1, 1)
            swaps += 1
    return tuple(tuple(r) for r in u)


class _WitnessSearch:
    """在 C = (I:J) 中找 |N(λ)| = t 的元素"""

    def __init__(self, candidates, target):
        self.ideal = candidates
        self.target = target
        self.order = candidates.order
        embed, slack = _embedding_data(self.order.n)
        images = np.array(candidates.basis, dtype=float) / candidates.den @ embed
        self.bounded = slack is not None
        if self.bounded:
            self.scale = float(target) ** (1.0 / 3.0) * np.exp(slack) * (1.0 + REGION_SLACK)
        else:
            self.scale = np.ones(3)
        scaled = images / self.scale
        transform = _lll_transform(scaled)
        self.rows = mat_mul(transform, candidates.basis)
        self.gram = np.array(transform, dtype=float) @ scaled
        # x·G 落在单位立方体内时 |x_j| <= Σ_i |G^{-1}_{ij}|
        self.limits = np.abs(np.linalg.inv(self.gram)).sum(axis=0)
        self.complex = self.order.discriminant < 0
        self.norm_tol = 1e-6 * float(target) * float(np.prod(np.exp(slack))) if self.bounded else None

    def region_box(self):
        return [int(np.floor(v + 1e-9)) for v in self.limits]

    def exhausted(self, bound):
        return self.bounded and all(v <= bound for v in self.region_box())

    def _box(self, bound):
        if not self.bounded:
            return [bound] * 3
        return [min(bound, v) for v in self.region_box()]

    def _float_norms(self, x):
        sigma = (x.astype(float) @ self.gram) * self.scale
        if self.complex:
            return sigma[:, 0] * (sigma[:, 1] ** 2 + sigma[:, 2] ** 2)
        return sigma.prod(axis=1)

    def _candidates(self, box):
        inner = int(np.argmax(box))
        outer = [k for k in range(3) if k != inner]
        a_range = np.arange(-box[outer[0]], box[outer[0]] + 1, dtype=np.int64)
        b_range = np.arange(-box[outer[1]], box[outer[1]] + 1, dtype=np.int64)
        g_in = self.gram[inner]
        pieces = max(1, a_range.size * b_range.size // _CHUNK + 1)
        for chunk in np.array_split(a_range, pieces):
            xa, xb = np.meshgrid(chunk, b_range, indexing="ij")
            xa, xb = xa.ravel(), xb.ravel()
            partial = np.outer(xa, self.gram[outer[0]]) + np.outer(xb, self.gram[outer[1]])
            lo = np.full(xa.size, -float(box[inner]))
            hi = np.full(xa.size, float(box[inner]))
            keep = np.ones(xa.size, dtype=bool)
            if self.bounded:
                for i in range(3):
                    if abs(g_in[i]) > 1e-12:
                        e1 = (-1.0 - partial[:, i]) / g_in[i]
                        e2 = (1.0 - partial[:, i]) / g_in[i]
                        lo = np.maximum(lo, np.minimum(e1, e2))
                        hi = np.minimum(hi, np.maximum(e1, e2))
                    else:
                        keep &= np.abs(partial[:, i]) <= 1.0
            lo = np.ceil(lo - 1e-9)
            hi = np.floor(hi + 1e-9)
            keep &= lo <= hi
            if not keep.any():
                continue
            lo = lo[keep].astype(np.int64)
            counts = hi[keep].astype(np.int64) - lo + 1
            starts = np.cumsum(counts) - counts
            x = np.zeros((int(counts.sum()), 3), dtype=np.int64)
            x[:, outer[0]] = np.repeat(xa[keep], counts)
            x[:, outer[1]] = np.repeat(xb[keep], counts)
            x[:, inner] = np.repeat(lo, counts) + np.arange(x.shape[0]) - np.repeat(starts, counts)
            x = x[np.any(x != 0, axis=1)]
            if self.bounded and x.size:
                norms = np.abs(self._float_norms(x))
                x = x[np.abs(norms - float(self.target)) <= self.norm_tol]
            yield from x.tolist()

    def find(self, bound):
        box = self._box(bound)
        logger.debug("witness search in Z[θ_%d], box %s", self.order.n, box)
        scale = self.ideal.den**3
        for x in self._candidates(box):
            coords = tuple(sum(x[k] * self.rows[k][j] for k in range(3)) for j in range(3))
            if Fraction(abs(self.order.element_norm(coords)), scale) == self.target:
                return coords
        return None


def is_equivalent(first, second, bound=DEFAULT_BOUND, *, cap=BOUND_CAP, cancel=None):
    """判断两个理想是否同类（存在 λ 使 λ·second = first）

    参数:
        first, second: 同一序中的理想
        bound: 初始枚举系数界，不足时翻倍直到 cap
        cancel: 可选，带 is_set() 的对象，置位后返回 Inconclusive

    返回:
        Equivalent / NotEquivalent / Inconclusive
    """
    _check_same_order(first, second)
    if first == second:
        return Equivalent((1, 0, 0), 1)
    if is_invertible(first) != is_invertible(second):
        return NotEquivalent("invertibility differs")
    if multiplier_ring(first) != multiplier_ring(second):
        return NotEquivalent("multiplier rings differ")
    candidates = colon(first, second)
    search = _WitnessSearch(candidates, first.norm / second.norm)
    limit = max(1, bound)
    cap = max(cap, limit)
    while True:
        if cancel is not None and cancel.is_set():
            return Inconclusive(limit)
        coords = search.find(limit)
        if coords is not None:
            witness = principal_ideal(first.order, coords, candidates.den)
            if mul(witness, second) != first:
                raise ArithmeticError("norm-matching element of the colon ideal is not a witness")
            return Equivalent(coords, candidates.den)
        if search.exhausted(limit):
            return NotEquivalent("no witness in the unit-reduced region")
        if limit >= cap:
            logger.warning("equivalence in Z[θ_%d] undecided at bound %d (region box %s)",
                           first.order.n, limit, search.region_box())
            return Inconclusive(limit)
        limit = min(2 * limit, cap)
        logger.debug("raising equivalence bound to %d", limit)


def is_principal(ideal, bound=DEFAULT_BOUND, **kwargs):
    return is_equivalent(ideal, unit_ideal(ideal.order), bound, **kwargs)
