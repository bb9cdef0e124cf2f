"""
The star graph Gamma0 of K0 and its vertex labels.

Corner letters are the six K0 corner labels a~, b~, l~ (lambda~), x, y, z and
their inverses; m~ (mu~) is l~ inverse. Text form: 'a~', 'b~^-1', 'm~', 'x^-1'.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from tqdm import tqdm

logger = logging.getLogger(__name__)

BASES = ("a~", "b~", "l~", "x", "y", "z")

# power of t carried by each letter
WEIGHTS = {"a~": 1, "b~": 2, "l~": 0, "x": 1, "y": 2, "z": 3}

# letter length parity of the underlying {a, b, lambda, mu} word
ODD_LENGTH = {"a~": True, "b~": True, "l~": True, "x": False, "y": False, "z": True}

UNICODE = {"a~": "ã", "b~": "b̃", "l~": "λ̃", "x": "x", "y": "y", "z": "z"}


class LabelError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class CornerLetter:
    base: str
    sign: int = 1

    def __post_init__(self):
        if self.base not in BASES:
            raise LabelError(f"unknown corner letter {self.base!r}")
        if self.sign not in (1, -1):
            raise LabelError(f"sign must be +1 or -1, got {self.sign!r}")

    def inverse(self) -> "CornerLetter":
        return CornerLetter(self.base, -self.sign)

    @property
    def weight(self) -> int:
        return self.sign * WEIGHTS[self.base]

    def __str__(self) -> str:
        if self.base == "l~" and self.sign == -1:
            return "m~"
        return self.base if self.sign == 1 else f"{self.base}^-1"

    def pretty(self) -> str:
        if self.base == "l~" and self.sign == -1:
            return "μ̃"
        return UNICODE[self.base] + ("" if self.sign == 1 else "⁻¹")


def letter(text: str) -> CornerLetter:
    s = text.strip()
    if s in ("m~", "m~^-1"):
        return CornerLetter("l~", -1 if s == "m~" else 1)
    if s.endswith("^-1"):
        return CornerLetter(s[:-3], -1)
    return CornerLetter(s, 1)


A, B, L, X, Y, Z = (CornerLetter(b) for b in BASES)
M = L.inverse()

# Fixed order used for canonical forms.
LETTERS: Tuple[CornerLetter, ...] = (
    A, A.inverse(), B, B.inverse(), L, M, X, X.inverse(), Y, Y.inverse(), Z, Z.inverse())
_RANK = {c: i for i, c in enumerate(LETTERS)}

Label = Tuple[CornerLetter, ...]


def parse_label(text: str) -> Label:
    return tuple(letter(tok) for tok in text.split())


def format_label(label: Sequence[CornerLetter], pretty: bool = False) -> str:
    if pretty:
        return "".join(c.pretty() for c in label)
    return " ".join(str(c) for c in label)


def invert_label(label: Sequence[CornerLetter]) -> Label:
    return tuple(c.inverse() for c in reversed(label))


def label_key(label: Sequence[CornerLetter]) -> Tuple[int, ...]:
    return tuple(_RANK[c] for c in label)


def canonical_label(label: Sequence[CornerLetter]) -> Label:
    """Least rotation of the label or of its inverse, in LETTERS order."""
    label = tuple(label)
    if not label:
        return label
    best = None
    for word in (label, invert_label(label)):
        for k in range(len(word)):
            rotated = word[k:] + word[:k]
            key = tuple(_RANK[c] for c in rotated)
            if best is None or key < best[0]:
                best = (key, rotated)
    return best[1]


def weight(label: Sequence[CornerLetter]) -> int:
    """Exponent sum of t over the label, mod 5."""
    return sum(c.weight for c in label) % 5


def shadow_parity(c: CornerLetter) -> str:
    """
    Parity of the number of shadow edges at a vertex carrying this corner:
    an even-length letter (x, y) splits into an odd number of pieces.
    """
    return "even" if ODD_LENGTH[c.base] else "odd"


# The global flip exchanging a with b^-1 and lambda with mu.
_FLIP_BASE = {("a~", 1): ("b~", -1), ("b~", 1): ("a~", -1), ("x", 1): ("y", -1),
              ("y", 1): ("x", -1), ("z", 1): ("z", -1), ("l~", 1): ("l~", -1)}


def flip(c: CornerLetter) -> CornerLetter:
    base, sign = _FLIP_BASE[(c.base, 1)]
    return CornerLetter(base, sign * c.sign)


def flip_label(label: Sequence[CornerLetter]) -> Label:
    return tuple(flip(c) for c in label)


# Underlying words over a, A (a^-1), b, B, l (lambda), m (mu = lambda^-1).
# Each template takes the (lambda mu)-exponents k_i >= 0.
_TEMPLATES = {
    "a~": (1, lambda k: "a" + "lm" * k[0]),
    "b~": (1, lambda k: "ml" * k[0] + "b"),
    "l~": (1, lambda k: "lm" * k[0] + "l"),
    "x": (1, lambda k: "a" + "lm" * k[0] + "l"),
    "y": (1, lambda k: "l" + "ml" * k[0] + "b"),
    "z": (2, lambda k: "a" + "lm" * k[0] + "l" + "ml" * k[1] + "b"),
}

_PATTERNS = {
    "a~": re.compile(r"a(lm)*"),
    "b~": re.compile(r"(ml)*b"),
    "l~": re.compile(r"(lm)*l"),
    "x": re.compile(r"a(lm)*l"),
    "y": re.compile(r"l(ml)*b"),
    "z": re.compile(r"a(lm)*l(ml)*b"),
}

_POWER = re.compile(r"(lm)+|(ml)+")

_SYMBOL_INVERSE = str.maketrans("aAbBlm", "AaBbml")


def invert_word(word: str) -> str:
    return word[::-1].translate(_SYMBOL_INVERSE)


def underlying_words(c: CornerLetter, depth: int = 2) -> List[str]:
    """Sample underlying words of a corner letter with every k_i in 0..depth."""
    arity, build = _TEMPLATES[c.base]
    words = [build(ks) for ks in product(range(depth + 1), repeat=arity)]
    return words if c.sign == 1 else [invert_word(w) for w in words]


def parse_underlying(word: str):
    """The corner letter whose template produces this word, or None."""
    for base, pattern in _PATTERNS.items():
        if pattern.fullmatch(word):
            return CornerLetter(base, 1)
        if pattern.fullmatch(invert_word(word)):
            return CornerLetter(base, -1)
    return None


def underlying_ab_count(label: Sequence[CornerLetter]) -> int:
    """Occurrences of a^{+-1}, b^{+-1} in the shortest underlying word."""
    return sum(sum(ch in "aAbB" for ch in underlying_words(c, depth=0)[0]) for c in label)


def pair_witness(first: CornerLetter, second: CornerLetter):
    """
    Why `first` cannot be followed by `second` as K0 corners, or None.

    Every sampled concatenation must fail the same way: a free cancellation
    across the junction, a collapse into a single corner letter (so the
    junction is not a (b,a)-edge), or a pure (lambda mu)-power.
    """
    samples = [u + v for u in underlying_words(first) for v in underlying_words(second)]
    junctions = {(u[-1], v[0]) for u in underlying_words(first) for v in underlying_words(second)}
    if all(p == q.translate(_SYMBOL_INVERSE) and p in "aAbB" for p, q in junctions):
        p, q = next(iter(junctions))
        return f"{p} {q} cancels"
    collapsed = {parse_underlying(w) for w in samples}
    if len(collapsed) == 1 and None not in collapsed:
        return f"rewrites to {collapsed.pop()}"
    if all(_POWER.fullmatch(w) for w in samples):
        return "is a (lambda mu)-power"
    return None


def derive_forbidden_pairs() -> Dict[Tuple[CornerLetter, CornerLetter], str]:
    """
    All ordered letter pairs that cannot occur as adjacent corners, with a witness.

    Plain letter-inverse pairs are left to free reduction; the (lambda mu)-power
    pairs l~ m~ and m~ l~ are kept since they survive it at the level of the
    underlying words.
    """
    forbidden = {}
    for first in LETTERS:
        for second in LETTERS:
            w = pair_witness(first, second)
            if w is None:
                continue
            if second == first.inverse() and not w.startswith("is a"):
                continue
            forbidden[(first, second)] = w
    return forbidden


def representative_pairs(pairs: Iterable[Tuple[CornerLetter, CornerLetter]]):
    """One pair from each {uv, v^-1 u^-1} class."""
    reps = set()
    for u, v in sorted(pairs, key=lambda p: (_RANK[p[0]], _RANK[p[1]])):
        if (v.inverse(), u.inverse()) not in reps:
            reps.add((u, v))
    return reps


# Gamma0 as a transition table: the state after a corner records which kind of
# (b,a)-edge the corner ends on, and lists the corners that may follow.
_AFTER = {
    A: "s1", M: "s1", Y.inverse(): "s1",
    A.inverse(): "s2", X.inverse(): "s2", Z.inverse(): "s2",
    Z: "s3", Y: "s3", B: "s3",
    X: "s4", L: "s4", B.inverse(): "s4",
}
_NEXT = {
    "s1": (A, X, Z),
    "s2": (A.inverse(), L, Y),
    "s3": (B, M, X.inverse()),
    "s4": (B.inverse(), Y.inverse(), Z.inverse()),
}
STAR_GRAPH: Dict[CornerLetter, Tuple[CornerLetter, ...]] = {
    c: _NEXT[_AFTER[c]] for c in LETTERS}


def star_graph_edges() -> FrozenSet[Tuple[CornerLetter, CornerLetter]]:
    return frozenset((u, v) for u, nxt in STAR_GRAPH.items() for v in nxt)


def is_vertex_label(label: Sequence[CornerLetter], forbidden=None) -> bool:
    """Reduced, Gamma0-admissible all the way round, and of weight 0 mod 5."""
    if forbidden is None:
        forbidden = _forbidden()
    d = len(label)
    if d == 0 or weight(label) != 0:
        return False
    for i in range(d):
        u, v = label[i], label[(i + 1) % d]
        if v == u.inverse() or (u, v) in forbidden or v not in STAR_GRAPH[u]:
            return False
    return True


@lru_cache(maxsize=None)
def _forbidden():
    return frozenset(derive_forbidden_pairs())


def _closed_paths(d: int, first: CornerLetter) -> Iterable[Label]:
    path = [first]
    total = first.weight

    def extend():
        nonlocal total
        if len(path) == d:
            if first in STAR_GRAPH[path[-1]] and total % 5 == 0:
                yield tuple(path)
            return
        for c in STAR_GRAPH[path[-1]]:
            if c == path[-1].inverse():
                continue
            path.append(c)
            total += c.weight
            yield from extend()
            total -= c.weight
            path.pop()

    yield from extend()


def enumerate_vertex_labels(d: int, modulus: int = 5, progress: bool = False) -> List[Label]:
    """Canonical admissible vertex labels of degree d, sorted."""
    if d < 2 or d > 12:
        raise LabelError(f"degree {d} outside the supported range 2..12")
    if modulus != 5:
        raise LabelError("only the t^5 coefficient group is modelled")
    forbidden = _forbidden()
    found = set()
    for first in tqdm(LETTERS, desc=f"degree {d}", disable=not progress):
        for path in _closed_paths(d, first):
            if is_vertex_label(path, forbidden):
                found.add(canonical_label(path))
    labels = sorted(found, key=label_key)
    logger.info(f"[Gamma0] degree {d}: {len(labels)} labels")
    return labels


def is_lambda_mu_power(label: Sequence[CornerLetter]) -> bool:
    return bool(label) and all(c.base == "l~" for c in label) and len(set(label)) == 2


# Hand-derived lists of admissible labels below degree 6.
CLASSICAL_LABELS: Dict[int, Tuple[str, ...]] = {
    3: ("a~ x y^-1", "b~ m~ z"),
    4: ("a~ a~ z m~", "b~ b~ x^-1 y"),
    5: ("a~ a~ a~ a~ a~", "a~ z x^-1 y m~", "b~ b~ b~ b~ b~", "b~ x^-1 l~ z^-1 y"),
}


def compare_with_classical(d: int, labels: Optional[Sequence[Label]] = None) -> Tuple[List[str], List[str]]:
    """(missing, extra): classical labels of degree d not enumerated, and enumerated ones not listed."""
    if d not in CLASSICAL_LABELS:
        raise LabelError(f"no classical list for degree {d}")
    if labels is None:
        labels = enumerate_vertex_labels(d)
    found = {format_label(label) for label in labels}
    listed = {format_label(canonical_label(parse_label(text))) for text in CLASSICAL_LABELS[d]}
    missing = sorted(listed - found)
    extra = sorted(found - listed)
    if missing or extra:
        logger.warning(f"[Gamma0] degree {d}: {len(missing)} listed labels missing, {len(extra)} extra")
    return missing, extra
