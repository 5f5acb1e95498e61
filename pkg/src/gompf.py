"""Gompf 等价：三元组之间的移动、等价链的校验与向 (1,1,2) 的约化搜索

Gompf 等价由两种关系生成：相似（同迹下理想类相同，记 S）与
(c, d, n) -> (c, d, n + kd)（记 G）。C 表示 c 平移，D 表示对偶。
"""
import heapq
import itertools
import json
import logging
from dataclasses import dataclass, field
from typing import Optional, Union

from src.cstriple import CSTriple, c_shift, dual, gompf_shift, is_valid_triple, valid_triples
from src.cubicorder import (BOUND_CAP, DEFAULT_BOUND, Equivalent, Inconclusive, ideal_from_triple,
                            is_equivalent)
from src.families import SolvedTraceSet

logger = logging.getLogger(__name__)

DEFAULT_BUDGET = 200
DEFAULT_SEARCH_D_MAX = 260
MAX_SHIFT = 2


class ChainFormatError(ValueError):
    """链文件格式错误"""


@dataclass(frozen=True)
class GompfShift:
    k: int
    symbol = "G"


@dataclass(frozen=True)
class CShift:
    k: int
    symbol = "C"


@dataclass(frozen=True)
class SimilarityJump:
    witness: Optional[tuple] = None
    symbol = "S"


@dataclass(frozen=True)
class Dual:
    symbol = "D"


Move = Union[GompfShift, CShift, SimilarityJump, Dual]


@dataclass(frozen=True)
class ChainStep:
    move: Move
    to: tuple


@dataclass(frozen=True)
class EquivalenceChain:
    start: CSTriple
    steps: tuple = ()
    name: str = ""

    @property
    def final(self):
        return CSTriple(*self.steps[-1].to) if self.steps else self.start

    def to_json(self):
        steps = []
        for step in self.steps:
            entry = {"move": step.move.symbol}
            if isinstance(step.move, (GompfShift, CShift)):
                entry["k"] = step.move.k
            entry["to"] = list(step.to)
            steps.append(entry)
        return {"name": self.name, "start": list(self.start.astuple()), "steps": steps}


@dataclass(frozen=True)
class StepReport:
    index: int
    move: str
    to: tuple
    ok: bool
    reason: str = ""


@dataclass
class ChainReport:
    name: str
    ok: bool
    steps: list = field(default_factory=list)
    inconclusive: bool = False

    def __bool__(self):
        return self.ok

    @property
    def first_failure(self):
        return next((s for s in self.steps if not s.ok), None)


_MOVES = {"G": GompfShift, "C": CShift}


def _parse_step(entry):
    try:
        symbol = entry["move"]
        to = tuple(int(x) for x in entry["to"])
        if len(to) != 3:
            raise ChainFormatError(f"step target must be a triple, got {entry['to']}")
        if symbol in _MOVES:
            return ChainStep(_MOVES[symbol](int(entry["k"])), to)
        if symbol == "S":
            return ChainStep(SimilarityJump(), to)
        if symbol == "D":
            return ChainStep(Dual(), to)
    except (KeyError, TypeError) as exc:
        raise ChainFormatError(f"malformed step {entry!r}") from exc
    raise ChainFormatError(f"unknown move {symbol!r}")


def chain_from_json(obj):
    try:
        start = CSTriple(*obj["start"])
        steps = tuple(_parse_step(entry) for entry in obj.get("steps", []))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ChainFormatError):
            raise
        raise ChainFormatError(f"malformed chain {obj!r}") from exc
    return EquivalenceChain(start, steps, obj.get("name", ""))


def load_chains(path):
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if isinstance(data, dict):
        data = [data]
    return [chain_from_json(obj) for obj in data]


def dump_chains(chains, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump([c.to_json() for c in chains], fh, indent=2)


def _check_step(current, step, bound, cancel):
    """返回 (ok, reason, inconclusive)"""
    c, d, n = step.to
    if not is_valid_triple(c, d, n):
        return False, f"({c},{d},{n}) is not a CS triple", False
    target = CSTriple(c, d, n)
    move = step.move
    if isinstance(move, GompfShift):
        if gompf_shift(current, move.k) != target:
            return False, f"G({move.k}) of {current} is not {target}", False
    elif isinstance(move, CShift):
        if c_shift(current, move.k).astuple() != target.astuple():
            return False, f"C({move.k}) of {current} is not {target}", False
    elif isinstance(move, Dual):
        if dual(current) != target:
            return False, f"dual of {current} is not {target}", False
    else:
        if current.n != target.n:
            return False, f"similarity jump changes the trace {current.n} -> {target.n}", False
        verdict = is_equivalent(ideal_from_triple(current), ideal_from_triple(target), bound,
                                cancel=cancel)
        if isinstance(verdict, Inconclusive):
            return False, f"equivalence undecided at bound {verdict.bound}", True
        if not isinstance(verdict, Equivalent):
            return False, f"{current} and {target} are not similar ({verdict.reason})", False
    return True, "", False


def verify_chain(chain, bound=DEFAULT_BOUND, *, cancel=None):
    """逐步复核一条等价链，在第一处失败处停下"""
    report = ChainReport(chain.name, True)
    current = chain.start
    for i, step in enumerate(chain.steps):
        ok, reason, undecided = _check_step(current, step, bound, cancel)
        report.steps.append(StepReport(i, step.move.symbol, step.to, ok, reason))
        if not ok:
            report.ok = False
            report.inconclusive = undecided
            logger.info("chain %s fails at step %d: %s", chain.name or chain.start, i, reason)
            return report
        current = CSTriple(*step.to)
    return report


def reaches_solved(chain, solved=None):
    solved = SolvedTraceSet.default() if solved is None else solved
    final = chain.final
    return final.n in solved or descend_step(final, solved) is not None


def descend_step(t, solved):
    """若有已解决的 n0 ≡ n (mod d) 落在 6 - n <= n0 <= n - 1 中，取最大者平移过去"""
    d = abs(t.d)
    lo, hi = 6 - t.n, t.n - 1
    if lo > hi:
        return None
    first = hi - (hi - t.n) % d
    for n0 in range(first, lo - 1, -d):
        if n0 in solved:
            return gompf_shift(t.canonical(), (n0 - t.n) // d)
        if n0 < solved.lo:
            break
    return None


def _base_trace(t, solved):
    """Gompf 平移后能落入 solved 的目标迹；不存在时为 None"""
    d = abs(t.d)
    if d == 1:
        return 2
    residue = t.n % d
    if residue in solved:
        return residue
    return solved.witness(residue, d)


def find_equivalent_triples(t, d_max=DEFAULT_SEARCH_D_MAX, bound=DEFAULT_BOUND, *, cap=BOUND_CAP,
                            cancel=None):
    """同迹、d <= d_max 中与 t 同类的全部三元组

    返回:
        (matches, undecided)，两者都按 (d, c) 排序；undecided 是 Inconclusive 的候选
    """
    ideal = ideal_from_triple(t)
    matches, undecided = [], []
    for cand in valid_triples(t.n, d_max):
        if cancel is not None and cancel.is_set():
            break
        verdict = is_equivalent(ideal_from_triple(cand), ideal, bound, cap=cap, cancel=cancel)
        if isinstance(verdict, Equivalent):
            matches.append(cand)
        elif isinstance(verdict, Inconclusive):
            undecided.append(cand)
    return matches, undecided


def _neighbours(node, d_max, bound, cap, cancel):
    for k in range(-MAX_SHIFT, MAX_SHIFT + 1):
        if k:
            yield GompfShift(k), gompf_shift(node, k).canonical()
    yield Dual(), dual(node)
    matches, _ = find_equivalent_triples(node, d_max, bound, cap=cap, cancel=cancel)
    for cand in matches:
        if cand != node:
            yield SimilarityJump(), cand


def reduce_to_base(t, budget=DEFAULT_BUDGET, bound=DEFAULT_BOUND, *, d_max=DEFAULT_SEARCH_D_MAX,
                   solved=None, cap=BOUND_CAP, cancel=None):
    """在移动图上做最优先搜索，找一条通向 (1,1,2) 的链

    优先级是 (深度, |n|, d, c)。当某个三元组平移后迹落入 solved，
    补上最后一步 G 并返回。预算耗尽返回 None，这不构成反证。
    """
    solved = SolvedTraceSet.default() if solved is None else solved
    start = t.canonical()
    counter = itertools.count()
    heap = [(0, abs(start.n), start.d, start.c, next(counter), start, ())]
    seen = {start}
    expanded = 0
    while heap and expanded < budget:
        if cancel is not None and cancel.is_set():
            return None
        depth, _, _, _, _, node, path = heapq.heappop(heap)
        target = _base_trace(node, solved)
        if target is not None:
            k = (target - node.n) // node.d
            if k:
                path += (ChainStep(GompfShift(k), (node.c, node.d, target)),)
            logger.info("reduced %s in %d steps after %d expansions", start, len(path), expanded)
            return EquivalenceChain(start, path)
        expanded += 1
        for move, nxt in _neighbours(node, d_max, bound, cap, cancel):
            if nxt in seen:
                continue
            seen.add(nxt)
            step = ChainStep(move, nxt.astuple())
            heapq.heappush(heap, (depth + 1, abs(nxt.n), nxt.d, nxt.c, next(counter), nxt, path + (step,)))
    logger.info("no reduction of %s within %d expansions", start, budget)
    return None
