"""
Oracles for the finite cases of the Fibonacci-group classification.

Todd-Coxeter coset enumeration over the trivial subgroup (HLT or Felsch
definition order, union-find coincidence handling) and Smith normal form of
the exponent-sum relation matrix.
"""

from __future__ import annotations

import bisect
import logging
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from tqdm import tqdm

from presentations import Presentation, build_fibonacci

logger = logging.getLogger(__name__)

DEFAULT_MAX_COSETS = 200_000
UNDEFINED = -1


@dataclass
class CosetTable:
    """Closed coset table on live cosets 0..order-1; column 2g is generator g, 2g+1 its inverse."""

    generators: Tuple[str, ...]
    rows: List[List[int]]

    @property
    def order(self) -> int:
        return len(self.rows)

    def column(self, name: str, sign: int = 1) -> int:
        return 2 * self.generators.index(name) + (0 if sign == 1 else 1)

    def act(self, coset: int, name: str, sign: int = 1) -> int:
        return self.rows[coset][self.column(name, sign)]


@dataclass
class Finite:
    order: int
    cosets_defined: int
    table: CosetTable = field(repr=False)


@dataclass
class Overflow:
    cosets_defined: int


EnumerationResult = Union[Finite, Overflow]


class _Overflow(Exception):
    pass


def _relator_columns(p: Presentation) -> List[List[int]]:
    index = {g: i for i, g in enumerate(p.generators)}
    out = []
    for r in p.cyclic_relators():
        if r.letters:
            out.append([2 * index[g] + (0 if s == 1 else 1) for g, s in r.letters])
    return out


class _Enumerator:
    """Coset table under construction; single writer for one enumeration."""

    def __init__(self, p: Presentation, max_cosets: int, strategy: str):
        self.ncols = 2 * len(p.generators)
        self.relators = _relator_columns(p)
        self.max_cosets = max_cosets
        self.felsch = strategy == "felsch"
        self.table: List[List[int]] = [[UNDEFINED] * self.ncols]
        self.parent: List[int] = [0]
        self.live = 1
        self.defined = 1
        self.deductions: List[Tuple[int, int]] = []
        if self.felsch:
            self.conjugates = self._conjugates_by_column()

    def _conjugates_by_column(self) -> Dict[int, List[List[int]]]:
        by_col: Dict[int, List[List[int]]] = {x: [] for x in range(self.ncols)}
        seen = set()
        for rel in self.relators:
            inv = [x ^ 1 for x in reversed(rel)]
            for word in (rel, inv):
                for k in range(len(word)):
                    w = tuple(word[k:] + word[:k])
                    if w not in seen:
                        seen.add(w)
                        by_col[w[0]].append(list(w))
        return by_col

    # -- union-find

    def alive(self, c: int) -> bool:
        return self.parent[c] == c

    def rep(self, c: int) -> int:
        root = c
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[c] != root:
            self.parent[c], c = root, self.parent[c]
        return root

    def merge(self, k: int, l: int, queue: List[int]):
        k, l = self.rep(k), self.rep(l)
        if k == l:
            return
        k, l = min(k, l), max(k, l)
        self.parent[l] = k
        self.live -= 1
        queue.append(l)

    # -- table primitives

    def define(self, c: int, x: int):
        if self.live >= self.max_cosets:
            raise _Overflow()
        d = len(self.table)
        self.table.append([UNDEFINED] * self.ncols)
        self.parent.append(d)
        self.live += 1
        self.defined += 1
        self.table[c][x] = d
        self.table[d][x ^ 1] = c
        if self.felsch:
            self.deductions.append((c, x))

    def deduce(self, f: int, x: int, b: int):
        self.table[f][x] = b
        self.table[b][x ^ 1] = f
        if self.felsch:
            self.deductions.append((f, x))

    def coincidence(self, a: int, b: int):
        queue: List[int] = []
        self.merge(a, b, queue)
        i = 0
        while i < len(queue):
            g = queue[i]
            i += 1
            row = self.table[g]
            for x in range(self.ncols):
                d = row[x]
                if d == UNDEFINED:
                    continue
                self.table[d][x ^ 1] = UNDEFINED
                m, n = self.rep(g), self.rep(d)
                if self.table[m][x] != UNDEFINED:
                    self.merge(n, self.table[m][x], queue)
                elif self.table[n][x ^ 1] != UNDEFINED:
                    self.merge(m, self.table[n][x ^ 1], queue)
                else:
                    self.deduce(m, x, n)
        logger.debug(f"[TC] coincidence {a} = {b} killed {len(queue)} cosets")

    def scan(self, c: int, word: Sequence[int], fill: bool):
        table = self.table
        f, i = c, 0
        b, j = c, len(word) - 1
        while True:
            while i <= j and table[f][word[i]] != UNDEFINED:
                f = table[f][word[i]]
                i += 1
            if i > j:
                if f != c:
                    self.coincidence(f, c)
                return
            while j >= i and table[b][word[j] ^ 1] != UNDEFINED:
                b = table[b][word[j] ^ 1]
                j -= 1
            if j < i:
                self.coincidence(f, b)
                return
            if i == j:
                self.deduce(f, word[i], b)
                return
            if not fill:
                return
            self.define(f, word[i])

    def compact_rows(self, c: int) -> int:
        """Drop dead rows in place, keeping order; returns the new index of position c."""
        live = [d for d in range(len(self.table)) if self.alive(d)]
        renumber = {d: i for i, d in enumerate(live)}
        self.table = [[UNDEFINED if e == UNDEFINED else renumber[self.rep(e)] for e in self.table[d]]
                      for d in live]
        self.parent = list(range(len(live)))
        logger.debug(f"[TC] compacted to {len(live)} rows")
        return bisect.bisect_left(live, c)

    def needs_compaction(self) -> bool:
        # dead rows may pile up past the live budget; reclaim them once they are a quarter of the table
        rows = len(self.table)
        return rows >= self.max_cosets and rows - self.live >= rows // 4

    # -- strategies

    def process_deductions(self):
        while self.deductions:
            c, x = self.deductions.pop()
            if not self.alive(c):
                continue
            for w in self.conjugates[x]:
                self.scan(c, w, fill=False)
                if not self.alive(c):
                    break
            d = self.table[c][x]
            if d == UNDEFINED or not self.alive(d):
                continue
            for w in self.conjugates[x ^ 1]:
                self.scan(d, w, fill=False)
                if not self.alive(d):
                    break

    def run_hlt(self):
        c = 0
        while c < len(self.table):
            if self.needs_compaction():
                c = self.compact_rows(c)
                if c >= len(self.table):
                    break
            if self.alive(c):
                for w in self.relators:
                    self.scan(c, w, fill=True)
                    if not self.alive(c):
                        break
                for x in range(self.ncols):
                    if self.alive(c) and self.table[c][x] == UNDEFINED:
                        self.define(c, x)
            c += 1

    def run_felsch(self):
        c = 0
        while c < len(self.table):
            if self.needs_compaction():
                c = self.compact_rows(c)
                if c >= len(self.table):
                    break
            for x in range(self.ncols):
                if self.alive(c) and self.table[c][x] == UNDEFINED:
                    self.define(c, x)
                    self.process_deductions()
            c += 1

    def compact(self, generators: Tuple[str, ...]) -> CosetTable:
        live = [c for c in range(len(self.table)) if self.alive(c)]
        renumber = {c: i for i, c in enumerate(live)}
        rows = [[renumber[self.rep(d)] for d in self.table[c]] for c in live]
        return CosetTable(generators, rows)


def coset_enumerate(p: Presentation, max_cosets: int = DEFAULT_MAX_COSETS,
                    strategy: str = "hlt") -> EnumerationResult:
    """Enumerate the cosets of the trivial subgroup; Overflow means 'not closed at this budget'."""
    if strategy not in ("hlt", "felsch"):
        raise ValueError(f"unknown strategy {strategy!r}")
    if max_cosets < 1:
        raise ValueError("max_cosets must be positive")
    if not p.generators:
        return Finite(1, 1, CosetTable((), [[]]))
    state = _Enumerator(p, max_cosets, strategy)
    try:
        if strategy == "hlt":
            state.run_hlt()
        else:
            state.run_felsch()
    except _Overflow:
        logger.info(f"[TC] overflow with {state.live} live cosets ({state.defined} defined)")
        return Overflow(state.defined)
    table = state.compact(p.generators)
    if not audit_coset_table(table, p):
        raise RuntimeError("closed coset table fails the relator audit")
    logger.info(f"[TC] {strategy} closed with {table.order} cosets ({state.defined} defined)")
    return Finite(table.order, state.defined, table)


def audit_coset_table(table: CosetTable, p: Presentation) -> bool:
    """Every entry defined and inverse-consistent; every relator traces to the identity from every coset."""
    relators = _relator_columns(p)
    for c, row in enumerate(table.rows):
        for x, d in enumerate(row):
            if not 0 <= d < table.order or table.rows[d][x ^ 1] != c:
                logger.warning(f"[TC] audit: entry ({c}, {x}) -> {d} is not closed")
                return False
    for c in range(table.order):
        for rel in relators:
            e = c
            for x in rel:
                e = table.rows[e][x]
            if e != c:
                logger.warning(f"[TC] audit: relator does not close at coset {c}")
                return False
    return True


# ---------------------------------------------------------------- Smith normal form


def relation_matrix(p: Presentation) -> np.ndarray:
    """Exponent sums: one row per relator, one column per generator, exact integers."""
    m = np.zeros((len(p.relators), len(p.generators)), dtype=object)
    for i, r in enumerate(p.relators):
        for j, g in enumerate(p.generators):
            m[i, j] = r.exponent_sum(g)
    return m


def smith_normal_form(matrix) -> List[int]:
    """
    Diagonal d1 | d2 | ... of the Smith normal form (nonzero entries only).

    Pivots on the smallest nonzero entry, clears its row and column by integer
    division and fixes divisibility by folding an offending row into the pivot row.
    """
    D = np.array(matrix, dtype=object)
    if D.ndim != 2:
        raise ValueError(f"expected a 2-dimensional integer matrix, got shape {D.shape}")
    rows, cols = D.shape
    diagonal = []
    for t in range(min(rows, cols)):
        while True:
            nonzero = [(abs(D[i, j]), i, j) for i in range(t, rows) for j in range(t, cols) if D[i, j] != 0]
            if not nonzero:
                return diagonal
            _, i, j = min(nonzero)
            D[[t, i]] = D[[i, t]]
            D[:, [t, j]] = D[:, [j, t]]
            pivot = D[t, t]
            clean = True
            for i in range(t + 1, rows):
                q = D[i, t] // pivot
                if q:
                    D[i, :] = D[i, :] - q * D[t, :]
                clean = clean and D[i, t] == 0
            for j in range(t + 1, cols):
                q = D[t, j] // pivot
                if q:
                    D[:, j] = D[:, j] - q * D[:, t]
                clean = clean and D[t, j] == 0
            if not clean:
                continue
            bad = next((i for i in range(t + 1, rows) for j in range(t + 1, cols) if D[i, j] % pivot), None)
            if bad is None:
                break
            D[t, :] = D[t, :] + D[bad, :]
        diagonal.append(abs(D[t, t]))
    return diagonal


def invariant_factors(matrix, ncols: Optional[int] = None) -> Tuple[int, ...]:
    """Nonunit invariant factors of Z^ncols / rowspace; 0 marks each free factor."""
    D = np.array(matrix, dtype=object)
    if ncols is None:
        ncols = D.shape[1] if D.ndim == 2 else 0
    diagonal = smith_normal_form(D) if D.size and D.ndim == 2 else []
    finite = [int(d) for d in diagonal if d != 1]
    return tuple(finite + [0] * (ncols - len(diagonal)))


def abelianization(p: Presentation) -> Tuple[int, ...]:
    return invariant_factors(relation_matrix(p), len(p.generators))


def abelian_order(factors: Sequence[int]) -> Optional[int]:
    """Order of the abelian group with these invariant factors, None if infinite."""
    if any(d == 0 for d in factors):
        return None
    order = 1
    for d in factors:
        order *= d
    return order


def format_abelian(factors: Sequence[int]) -> str:
    """Z2 x Z2, Z5 x Z, or 1 for the trivial group."""
    return " x ".join(f"Z{d}" if d else "Z" for d in factors) or "1"


# ---------------------------------------------------------------- classification cases


_SMALL_R = {
    2: {2: 1, 3: 8, 4: 5, 5: 11, 7: 29},
    3: {2: 8, 3: 2, 5: 22, 6: 1512},
}


def expected_order(r: int, n: int) -> Tuple[Optional[int], str]:
    """Order of F(r, n) according to the classification, with the clause used; None when infinite."""
    if r in _SMALL_R:
        clause = "(i)" if r == 2 else "(ii)"
        return _SMALL_R[r].get(n), clause
    if r % n == 0:
        return r - 1, "(iii) Z_{r-1}"
    if r % n == 1:
        return r ** n - 1, "(iv) r^n - 1"
    if n == 4 and r % 4 == 2:
        k = (r - 2) // 4
        return (4 * k + 1) * (2 * 4 ** (2 * k) + 2 * (-4) ** k + 1), "(v) (4k+1)(2*4^2k + 2(-4)^k + 1)"
    return None, "infinite"


# The acceptance suite first, then extra clause (iii)-(v) instances.
CLASSIFICATION_CASES: List[Tuple[int, int]] = [
    (2, 2), (2, 3), (2, 4), (2, 5), (2, 7),
    (3, 2), (3, 3), (3, 5), (3, 6),
    (4, 4), (5, 4), (6, 4),
    (4, 2), (6, 3), (5, 5), (4, 3), (5, 2),
]


@dataclass
class CaseReport:
    r: int
    n: int
    expected: Optional[int]
    got: Optional[int]
    status: str
    cosets_defined: int
    ms: float
    clause: str = ""
    abelianization: Tuple[int, ...] = ()

    def as_dict(self) -> dict:
        return {"r": self.r, "n": self.n, "expected": self.expected, "got": self.got,
                "status": self.status, "cosets_defined": self.cosets_defined,
                "ms": round(self.ms, 1), "clause": self.clause,
                "abelianization": list(self.abelianization)}


def verify_fibonacci_orders(cases: Sequence[Tuple[int, int]] = CLASSIFICATION_CASES,
                            max_cosets: int = DEFAULT_MAX_COSETS, strategy: str = "hlt",
                            progress: bool = False) -> List[CaseReport]:
    """
    Enumerate every case and compare with the classification; status is
    pass, fail (order mismatch, or |ab| not dividing the order) or overflow.
    """
    reports = []
    for r, n in tqdm(cases, desc="F(r,n) orders", disable=not progress):
        expected, clause = expected_order(r, n)
        p = build_fibonacci(r, n)
        ab = abelianization(p)
        start = time.perf_counter()
        result = coset_enumerate(p, max_cosets=max_cosets, strategy=strategy)
        ms = (time.perf_counter() - start) * 1000
        if isinstance(result, Overflow):
            reports.append(CaseReport(r, n, expected, None, "overflow", result.cosets_defined, ms, clause, ab))
            logger.warning(f"[Orders] F({r},{n}) did not close within {max_cosets} cosets")
            continue
        ab_order = abelian_order(ab)
        divides = ab_order is not None and result.order % ab_order == 0
        status = "pass" if result.order == expected and divides else "fail"
        if status == "fail":
            logger.warning(f"[Orders] F({r},{n}): expected {expected}, got {result.order}, ab {ab}")
        reports.append(CaseReport(r, n, expected, result.order, status, result.cosets_defined, ms, clause, ab))
    return reports
