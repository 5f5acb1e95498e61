"""按迹枚举 C(Z[θ_n]) 的最小代表元

候选按 (d, c) 的最小序遍历，与已保留的每个类比较，不与任何一个同类时保留。
第一个保留的总是 (1,1,n)，即单位类。
"""
import json
import logging
from dataclasses import dataclass, field, replace

from src.cstriple import CSTriple, valid_triples
from src.cubicorder import BOUND_CAP, DEFAULT_BOUND, Equivalent, Inconclusive, ideal_from_triple, is_equivalent
from src.families import SolvedTraceSet
from src.gompf import descend_step

logger = logging.getLogger(__name__)

DEFAULT_D_MAX = 260


@dataclass(frozen=True)
class RepresentativeList:
    n: int
    d_bound: int
    triples: tuple
    special: frozenset = frozenset()
    uncertain: frozenset = frozenset()
    # 比较结果为 Inconclusive 的 (候选, 已保留代表元) 对
    inconclusive: tuple = field(default=())

    @property
    def count(self):
        return len(self.triples)

    @property
    def undecided(self):
        return frozenset(pair[0] for pair in self.inconclusive)

    def flags(self, t):
        marks = [name for name, group in (("special", self.special), ("uncertain", self.uncertain),
                                          ("inconclusive", self.undecided)) if t in group]
        return "+".join(marks)

    def to_json(self):
        return {
            "n": self.n,
            "d_bound": self.d_bound,
            "count": self.count,
            "representatives": [list(t.astuple()) for t in self.triples],
            "special": [list(t.astuple()) for t in self.triples if t in self.special],
            "uncertain": [list(t.astuple()) for t in self.triples if t in self.uncertain],
            "inconclusive": [[list(a.astuple()), list(b.astuple())] for a, b in self.inconclusive],
        }

    def to_tsv(self):
        joined = ";".join(str(t) for t in self.triples)
        flags = ";".join(self.flags(t) or "-" for t in self.triples)
        return f"{self.n}\t{self.count}\t{joined}\t{flags}"


def minimal_representatives(n, d_max=DEFAULT_D_MAX, bound=DEFAULT_BOUND, *, cap=BOUND_CAP, cancel=None):
    """迹为 n、d <= d_max 的最小代表元表

    参数:
        n: 迹
        d_max: d 的枚举上界
        bound, cap: 等价判定的起始与最大枚举界
        cancel: 可选的取消标志

    返回:
        RepresentativeList；无法判定的比较记录在 inconclusive 中，候选照常保留
    """
    if d_max < 1:
        raise ValueError(f"d_max must be positive, got {d_max}")
    base = CSTriple(1, 1, n)
    kept = [(base, ideal_from_triple(base))]
    pairs = []
    scanned = 0
    for cand in valid_triples(n, d_max):
        if cand == base:
            continue
        if cancel is not None and cancel.is_set():
            break
        scanned += 1
        ideal = ideal_from_triple(cand)
        unsure = []
        for rep, rep_ideal in kept:
            verdict = is_equivalent(ideal, rep_ideal, bound, cap=cap, cancel=cancel)
            if isinstance(verdict, Equivalent):
                break
            if isinstance(verdict, Inconclusive):
                unsure.append(rep)
        else:
            kept.append((cand, ideal))
            pairs.extend((cand, rep) for rep in unsure)
            logger.debug("new class %s at trace %d", cand, n)
    logger.info("trace %d: %d classes among %d candidates with d <= %d", n, len(kept), scanned + 1, d_max)
    return RepresentativeList(n, d_max, tuple(t for t, _ in kept), inconclusive=tuple(pairs))


def mark_special(reps, solved=None):
    """标出下降引理不适用的代表元（只用小于 n 的已解决迹）"""
    solved = SolvedTraceSet.default() if solved is None else solved
    below = solved.below(reps.n)
    special = frozenset(t for t in reps.triples if t.d != 1 and descend_step(t, below) is None)
    return replace(reps, special=special)


def load_table(path):
    """读取代表元表的 JSON 文件，返回 {n: RepresentativeList}"""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    table = {}
    for key, entry in data["traces"].items():
        n = int(key)
        triples = tuple(CSTriple(*t) for t in entry["representatives"])
        if "count" in entry and entry["count"] != len(triples):
            raise ValueError(f"trace {n}: count {entry['count']} but {len(triples)} representatives")
        table[n] = RepresentativeList(
            n, max(t.d for t in triples), triples,
            special=frozenset(CSTriple(*t) for t in entry.get("special", [])),
            uncertain=frozenset(CSTriple(*t) for t in entry.get("uncertain", [])),
        )
    return table


def table_rows_tsv(lists):
    return [reps.to_tsv() for reps in sorted(lists, key=lambda r: r.n)]


def compare_with_table(computed, expected):
    """与参照表逐项比较，返回差异；完全一致时为空字典"""
    diff = {}
    got, want = set(computed.triples), set(expected.triples)
    if got - want:
        diff["extra"] = sorted(got - want, key=CSTriple.sort_key)
    if want - got:
        diff["missing"] = sorted(want - got, key=CSTriple.sort_key)
    if computed.count != expected.count:
        diff["count"] = (computed.count, expected.count)
    if expected.special and computed.special != expected.special:
        diff["special"] = (sorted(computed.special, key=CSTriple.sort_key),
                           sorted(expected.special, key=CSTriple.sort_key))
    return diff
