"""C(Z[θ_n]) 何时不是群，以及无穷族 (c, p, n0 + p^2 k)

C(Z[θ_n]) 不是群，当且仅当存在素数 p 与 c 使 c 是 f_n mod p 的重根且
p^2 | f_n(c)。消去 n 后 c 必为四次式 c^4 - 2c^3 + c^2 + 2c - 1 mod p 的根，
随后 n 由两条线性同余唯一确定到模 p^2。
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import chain, repeat
from typing import Optional

from src.cstriple import CSTriple, is_valid_triple, trace_discriminant, trace_poly, trace_poly_value
from src.cubicorder import ideal_from_triple, is_invertible, unit_ideal, CubicOrder
from src.intarith import (BATCH_PRIME_LIMIT, ModPoly, batch_x_pow_mod, factorize,
                          multiple_roots_mod_p, poly_roots_mod_p, primes_up_to,
                          solve_linear_congruence)

logger = logging.getLogger(__name__)

# c^4 - 2c^3 + c^2 + 2c - 1，低次在前
QUARTIC = (-1, 2, 1, -2, 1)
DEFAULT_K_RANGE = range(-2, 3)
BLOCK_SIZE = 1 << 16

# first-failure: 每个 p 按 c 降序检查根，遇到第一个 n0、n0 + p 都不在已解决集合中的根即停
# membership: 只要某个已解决的迹与 n0 模 p 同余就保留
FILTER_FIRST_FAILURE = "first-failure"
FILTER_MEMBERSHIP = "membership"
FILTERS = (FILTER_FIRST_FAILURE, FILTER_MEMBERSHIP)


class FamilyCertificationError(AssertionError):
    """某个 k 上的非可逆性证明失败"""

    def __init__(self, k, message):
        super().__init__(f"k={k}: {message}")
        self.k = k


def _poly_mul_int(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _poly_sub_int(a, b):
    size = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(size)]


def _elimination_expression():
    # -[(c^3 - c - 1)(2c - 1) - (3c^2 - 1)(c^2 - c)]
    diff = _poly_sub_int(_poly_mul_int([-1, -1, 0, 1], [-1, 2]), _poly_mul_int([-1, 0, 3], [0, -1, 1]))
    return tuple(-x for x in diff)


def elimination_quartic():
    """消去 n 后得到的四次式（低次在前），与消元表达式逐项核对"""
    if _elimination_expression() != QUARTIC:
        raise ArithmeticError("elimination quartic does not match its defining expression")
    return QUARTIC


def quartic_value(c):
    return c**4 - 2 * c**3 + c * c + 2 * c - 1


class SolvedTraceSet:
    """已知满足 Gompf 猜想的迹的集合"""

    def __init__(self, values):
        self.values = frozenset(int(v) for v in values)
        self.lo = min(self.values) if self.values else 0
        self.hi = max(self.values) if self.values else -1

    @classmethod
    def default(cls):
        return cls(set(range(-64, 70)) | {-73, -69, -67, -66, 71, 72, 74, 78})

    def __contains__(self, n):
        return n in self.values

    def __iter__(self):
        return iter(sorted(self.values))

    def __len__(self):
        return len(self.values)

    def __eq__(self, other):
        return isinstance(other, SolvedTraceSet) and self.values == other.values

    def __hash__(self):
        return hash(self.values)

    def __repr__(self):
        return f"SolvedTraceSet({len(self.values)} traces in [{self.lo}, {self.hi}])"

    def matches(self, residue, modulus):
        """集合中与 residue 模 modulus 同余的元素，按 |n| 从小到大（同值时正数优先）"""
        if not self.values:
            return []
        first = self.lo + (residue - self.lo) % modulus
        found = [v for v in range(first, self.hi + 1, modulus) if v in self.values]
        return sorted(found, key=lambda v: (abs(v), v < 0))

    def witness(self, residue, modulus):
        found = self.matches(residue, modulus)
        return found[0] if found else None

    def window_witness(self, residue, modulus):
        """只看 (-modulus, 0] 中的代表 n0 与 n0 + modulus 两个值"""
        low = residue % modulus - modulus if residue % modulus else 0
        found = [v for v in (low, low + modulus) if v in self.values]
        return min(found, key=lambda v: (abs(v), v < 0)) if found else None

    def below(self, n):
        return SolvedTraceSet(v for v in self.values if v < n)

    def is_symmetric(self):
        return all(5 - v in self.values for v in self.values)


@dataclass(frozen=True)
class FamilySolution:
    c: int
    p: int
    n0: int
    solved_witness: Optional[int] = None
    index: int = 0

    def trace(self, k=0):
        return self.n0 + self.p * self.p * k

    def triple(self, k=0):
        return CSTriple(self.c, self.p, self.trace(k))

    def to_json(self):
        return {"c": self.c, "p": self.p, "n0": self.n0,
                "witness": self.solved_witness, "index": self.index}

    def to_tsv(self):
        witness = "" if self.solved_witness is None else str(self.solved_witness)
        return f"{self.c}\t{self.p}\t{self.n0}\t{witness}\t{self.index}"


def _residue_trace(c, p):
    """(2c - 1) n ≡ 3c^2 - 1 (mod p) 的解"""
    solution = solve_linear_congruence(2 * c - 1, 3 * c * c - 1, p)
    if solution is None or solution[1] != p:
        raise ArithmeticError(f"2c - 1 is not invertible mod {p} at root c = {c}")
    return solution[0]


def _lift_trace(c, n_res, p):
    """把 n mod p 提升到满足 (c^2 - c) n ≡ c^3 - c - 1 (mod p^2) 的 n mod p^2"""
    remainder = c**3 - c - 1 - n_res * (c * c - c)
    if remainder % p:
        logger.debug("root %d mod %d does not lift", c, p)
        return None
    solution = solve_linear_congruence(c * c - c, remainder // p, p)
    if solution is None or solution[1] != p:
        raise ArithmeticError(f"c^2 - c is not invertible mod {p} at root c = {c}")
    p2 = p * p
    n = (solution[0] * p + n_res) % p2
    ok = ((2 * c - 1) * n - (3 * c * c - 1)) % p == 0 \
        and ((c * c - c) * n - (c**3 - c - 1)) % p2 == 0 \
        and trace_poly_value(n, c) % p2 == 0
    return n if ok else None


def solve_for_prime(p, *, x_pow_p=None, check_prime=True):
    """固定素数 p 下的全部 (c, n0)，n0 ∈ [0, p^2)

    返回:
        按 n0 升序排列的列表
    """
    roots = poly_roots_mod_p(QUARTIC, p, x_pow_p=x_pow_p, check_prime=check_prime)
    found = []
    for c in roots:
        n = _lift_trace(c, _residue_trace(c, p), p)
        if n is not None:
            found.append((c, n))
    return sorted(found, key=lambda pair: pair[1])


def _scan_block(primes, solved, only_solved, rule=FILTER_FIRST_FAILURE):
    found = []
    batch = primes[(primes > 2 * len(QUARTIC)) & (primes < BATCH_PRIME_LIMIT)]
    powers = dict(zip(batch.tolist(), batch_x_pow_mod(QUARTIC, batch).tolist())) if batch.size else {}
    first_failure = rule == FILTER_FIRST_FAILURE
    for p in primes.tolist():
        roots = poly_roots_mod_p(QUARTIC, p, x_pow_p=powers.get(p), check_prime=False)
        for c in sorted(roots, reverse=first_failure):
            n_res = _residue_trace(c, p)
            witness = solved.window_witness(n_res, p) if first_failure else solved.witness(n_res, p)
            if only_solved and witness is None:
                if first_failure:
                    logger.debug("p=%d stops at root %d", p, c)
                    break
                continue
            n0 = _lift_trace(c, n_res, p)
            if n0 is not None:
                found.append((c, p, n0, witness))
    return found


def scan_families(p_max, solved=None, *, only_solved=True, rule=FILTER_FIRST_FAILURE,
                  workers=1, block_size=BLOCK_SIZE):
    """扫描 p <= p_max 的全部素数

    参数:
        p_max: 素数上界
        solved: 已解决的迹集合，默认 SolvedTraceSet.default()
        only_solved: 只保留有已解决迹代表的解
        rule: FILTER_FIRST_FAILURE（默认，得到参照表的 146 组）或 FILTER_MEMBERSHIP（197 组）
        workers: 进程数

    返回:
        FamilySolution 列表，按 (p, n0) 排序，index 从 1 开始
    """
    if p_max < 2:
        raise ValueError(f"p_max must be at least 2, got {p_max}")
    if rule not in FILTERS:
        raise ValueError(f"rule must be one of {FILTERS}, got {rule!r}")
    solved = SolvedTraceSet.default() if solved is None else solved
    primes = primes_up_to(p_max)
    blocks = [primes[i:i + block_size] for i in range(0, primes.size, block_size)]
    logger.info("scanning %d primes up to %d in %d blocks", primes.size, p_max, len(blocks))
    if workers <= 1:
        results = []
        for i, block in enumerate(blocks):
            results.append(_scan_block(block, solved, only_solved, rule))
            logger.info("block %d/%d done, largest prime %d", i + 1, len(blocks), int(block[-1]))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_scan_block, blocks, repeat(solved), repeat(only_solved), repeat(rule)))
    rows = sorted(chain.from_iterable(results), key=lambda row: (row[1], row[2]))
    return [FamilySolution(c, p, n0, witness, i) for i, (c, p, n0, witness) in enumerate(rows, 1)]


def non_invertible_witnesses(n):
    """使 ⟨θ_n - c, p⟩ 不可逆的全部 (c, p)：p^2 | disc，c 为重根且 p^2 | f_n(c)"""
    found = []
    for p, e in factorize(trace_discriminant(n)):
        if e < 2:
            continue
        f = ModPoly.from_ints(trace_poly(n), p)
        for c in multiple_roots_mod_p(f, check_prime=False):
            if trace_poly_value(n, c) % (p * p) == 0:
                found.append((c, p))
    return found


def is_not_group(n):
    return bool(non_invertible_witnesses(n))


def is_not_group_by_congruences(n):
    """另一条判定路径：n 与某个 solve_for_prime(p) 的解模 p^2 同余"""
    for p, _ in factorize(trace_discriminant(n)):
        if any((n - n0) % (p * p) == 0 for _, n0 in solve_for_prime(p, check_prime=False)):
            return True
    return False


def _not_group_block(traces):
    return [n for n in traces if is_not_group(n)]


def scan_not_group(n_min, n_max, *, workers=1, block_size=256):
    if n_min > n_max:
        raise ValueError(f"empty trace range [{n_min}, {n_max}]")
    traces = list(range(n_min, n_max + 1))
    blocks = [traces[i:i + block_size] for i in range(0, len(traces), block_size)]
    if workers <= 1:
        results = map(_not_group_block, blocks)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_not_group_block, blocks))
    found = sorted(chain.from_iterable(results))
    logger.info("%d of %d traces in [%d, %d] have a non-invertible class",
                len(found), len(traces), n_min, n_max)
    return found


def assert_family(sol, k_range=DEFAULT_K_RANGE):
    """对每个 k 证明 ⟨θ - c, p⟩ 在 Z[θ_{n0+p^2 k}] 中不可逆

    单位理想类（即 A_n 的类）总是可逆的，所以这些矩阵与任何 A_n 都不相似。
    失败时抛出 FamilyCertificationError 并给出 k。
    """
    for k in k_range:
        n = sol.trace(k)
        if not is_valid_triple(sol.c, sol.p, n):
            raise FamilyCertificationError(k, f"({sol.c},{sol.p},{n}) is not a CS triple")
        if is_invertible(ideal_from_triple(CSTriple(sol.c, sol.p, n))):
            raise FamilyCertificationError(k, f"ideal of ({sol.c},{sol.p},{n}) is invertible")
        if not is_invertible(unit_ideal(CubicOrder(n))):
            raise FamilyCertificationError(k, f"unit ideal of Z[θ_{n}] is not invertible")


def certify_family(sol, k_range=DEFAULT_K_RANGE):
    try:
        assert_family(sol, k_range)
    except FamilyCertificationError as exc:
        logger.warning("family (%d, %d, %d) fails certification: %s", sol.c, sol.p, sol.n0, exc)
        return False
    return True
