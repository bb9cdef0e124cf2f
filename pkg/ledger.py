"""
Inequality ledgers for the curvature case analyses.

A ledger is a JSON-lines file. Each line is one entry, most of them of the
form "c*(region) <= c(region) + (sum of cv terms) pi/30 + adjustments" with
a claimed sign. Entries are re-evaluated in exact arithmetic and come back
Verified, Refuted (with the computed value) or Malformed.

cv terms are integers (units of pi/30) or symbolic members of a pair whose
sum is fixed: a1+a2=7, b=8, c=9, d=10, e=11, f=12, h=14. Other fixed-total
groups (x1+y1=4, x1+y1+z1=15, ...) are declared per entry under "groups".
"""

from __future__ import annotations

import json
import logging
import os
import random
import re
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from tqdm import tqdm

from curvature import (
    TWO_PI, ZERO, Angle, CurvatureError, curvature, dagger_bound, delta0_bound,
    degree_bound, threshold,
)

logger = logging.getLogger(__name__)

PAIR_SUMS = {"a": 7, "b": 8, "c": 9, "d": 10, "e": 11, "f": 12, "h": 14}

LEDGER_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "ledgers")

VERIFIED = "verified"
REFUTED = "refuted"
MALFORMED = "malformed"

_SYMBOL = re.compile(r"^[a-z]\d+$")
_CLAIM = re.compile(r"^\s*(<=|≤|<|=)\s*(.+?)\s*$")


class LedgerParseError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message


class MalformedEntry(ValueError):
    pass


@dataclass(frozen=True)
class Claim:
    op: str
    value: Angle

    @classmethod
    def parse(cls, text) -> "Claim":
        if not isinstance(text, str):
            raise MalformedEntry(f"claim must be a string, got {text!r}")
        m = _CLAIM.match(text)
        if not m:
            raise MalformedEntry(f"cannot read claim {text!r}")
        op = "<=" if m.group(1) == "≤" else m.group(1)
        try:
            value = Angle.parse(m.group(2))
        except (ValueError, ZeroDivisionError):
            raise MalformedEntry(f"cannot read claim value {m.group(2)!r}")
        return cls(op, value)

    def holds(self, lhs: Angle) -> bool:
        if self.op == "<":
            return lhs < self.value
        if self.op == "<=":
            return lhs <= self.value
        return lhs == self.value

    def __str__(self) -> str:
        return f"{self.op} {self.value}"


@dataclass
class Verdict:
    entry_id: str
    status: str
    value: Optional[Angle] = None
    claim: Optional[Claim] = None
    reason: str = ""
    src: str = ""
    printed: str = ""
    finding: str = ""

    @property
    def margin(self) -> Optional[Fraction]:
        """Claim value minus computed value, in pi/30 units."""
        if self.value is None or self.claim is None:
            return None
        return (self.claim.value - self.value).in_thirtieths

    def as_dict(self) -> dict:
        out = {"id": self.entry_id, "status": self.status}
        if self.value is not None:
            out["value"] = str(self.value)
            out["value_thirtieths"] = str(self.value.in_thirtieths)
        if self.claim is not None:
            out["claim"] = str(self.claim)
        for key in ("reason", "src", "printed", "finding"):
            if getattr(self, key):
                out[key] = getattr(self, key)
        return out


# ---------------------------------------------------------------------------
# Terms and groups

def _term(raw):
    """An int/str cv term as ('sym', name) or ('num', Angle)."""
    if isinstance(raw, bool):
        raise MalformedEntry(f"bad cv term {raw!r}")
    if isinstance(raw, int):
        if raw < 0:
            raise MalformedEntry(f"cv term {raw} is negative")
        return ("num", Angle.thirtieths(raw))
    if isinstance(raw, str):
        s = raw.strip()
        if _SYMBOL.match(s):
            return ("sym", s)
        try:
            return ("num", Angle.parse(s))
        except (ValueError, ZeroDivisionError):
            raise MalformedEntry(f"bad cv term {raw!r}")
    raise MalformedEntry(f"bad cv term {raw!r}")


def _groups(entry: dict) -> List[Tuple[Tuple[str, ...], int]]:
    """Explicit groups first, then the named pairs (with per-entry overrides)."""
    out = []
    for g in entry.get("groups", []):
        try:
            members = tuple(g["members"])
            total = int(g["total"])
        except (KeyError, TypeError, ValueError):
            raise MalformedEntry(f"bad group {g!r}")
        if len(members) < 2 or total < 0:
            raise MalformedEntry(f"group {g!r} needs two members and a nonnegative total")
        out.append((members, total))
    pairs = dict(PAIR_SUMS)
    pairs.update(entry.get("pairs", {}))
    for name, total in sorted(pairs.items()):
        out.append(((f"{name}1", f"{name}2"), int(total)))
    return out


def evaluate_terms(terms: Sequence, entry: dict,
                   assignment: Optional[Dict[str, int]] = None) -> Angle:
    """
    Sum of the terms in pi/30 units. Each group contributes its total once per
    complete occurrence of all its members; with an `assignment` the symbols
    take those concrete values instead.
    """
    parsed = [_term(t) for t in terms]
    total = ZERO
    symbols = Counter()
    for kind, value in parsed:
        if kind == "num":
            total = total + value
        else:
            symbols[value] += 1
    if not symbols:
        return total
    owner = {}
    for members, group_total in _groups(entry):
        for m in members:
            owner.setdefault(m, (members, group_total))
    seen = set()
    for sym in sorted(symbols):
        if sym not in owner:
            raise MalformedEntry(f"symbol {sym} belongs to no pair or group")
        members, group_total = owner[sym]
        if members in seen:
            continue
        seen.add(members)
        counts = {m: symbols.get(m, 0) for m in members}
        if len(set(counts.values())) != 1:
            partners = ", ".join(f"{m}x{c}" for m, c in counts.items())
            raise MalformedEntry(f"unpaired symbol {sym} ({partners})")
        k = counts[members[0]]
        if assignment is None:
            total = total + Angle.thirtieths(k * group_total)
        else:
            total = total + Angle.thirtieths(sum(k * assignment[m] for m in members))
    return total


def random_assignment(entry: dict, rng: random.Random) -> Dict[str, int]:
    """A random nonnegative split of every group total among its members."""
    out = {}
    for members, total in _groups(entry):
        cuts = sorted(rng.randint(0, total) for _ in range(len(members) - 1))
        parts = [b - a for a, b in zip([0] + cuts, cuts + [total])]
        for m, v in zip(members, parts):
            out.setdefault(m, v)
    return out


# ---------------------------------------------------------------------------
# Entry kinds

def min_degree(token) -> int:
    """'5+' and 6 both give their lower bound; curvature is decreasing in each degree."""
    if isinstance(token, bool):
        raise MalformedEntry(f"bad degree {token!r}")
    if isinstance(token, int):
        d = token
    elif isinstance(token, str) and re.match(r"^\d+\+?$", token.strip()):
        d = int(token.strip().rstrip("+"))
    else:
        raise MalformedEntry(f"bad degree {token!r}")
    if d < 3:
        raise MalformedEntry(f"degree {d} < 3")
    return d


def _degrees(entry: dict) -> List[int]:
    degrees = entry.get("degrees")
    if not isinstance(degrees, list) or not degrees:
        raise MalformedEntry("entry needs a nonempty degrees list")
    return [min_degree(d) for d in degrees]


def _adjust(items) -> Angle:
    total = ZERO
    for item in items or []:
        if isinstance(item, dict):
            if "v" not in item:
                raise MalformedEntry(f"adjustment {item!r} has no value")
            value = item["v"]
        else:
            value = item
        if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
            total = total + Angle.thirtieths(value)
        elif isinstance(value, str):
            try:
                total = total + Angle.parse(value)
            except (ValueError, ZeroDivisionError):
                raise MalformedEntry(f"bad adjustment {value!r}")
        else:
            raise MalformedEntry(f"bad adjustment {value!r}")
    return total


def bound_value(entry: dict, assignment: Optional[Dict[str, int]] = None) -> Angle:
    """curvature(minimal degrees) + cv/sums + adjustments."""
    degrees = _degrees(entry)
    has_cv, has_sums = "cv" in entry, "sums" in entry
    if has_cv == has_sums:
        raise MalformedEntry("bound entry needs exactly one of cv and sums")
    if has_cv:
        cv = entry["cv"]
        if not isinstance(cv, list) or not cv:
            raise MalformedEntry("cv must be a nonempty list")
        if len(cv) != 1 and len(cv) != len(degrees):
            raise MalformedEntry(f"cv has {len(cv)} terms for {len(degrees)} vertices")
        terms = cv
    else:
        terms = entry["sums"]
        if not isinstance(terms, list) or not terms:
            raise MalformedEntry("sums must be a nonempty list")
    try:
        c = curvature(degrees)
    except CurvatureError as e:
        raise MalformedEntry(str(e))
    return c + evaluate_terms(terms, entry, assignment) + _adjust(entry.get("adjust"))


def curvature_value(entry: dict, assignment=None) -> Angle:
    try:
        return curvature(_degrees(entry))
    except CurvatureError as e:
        raise MalformedEntry(str(e))


def sum_value(entry: dict, assignment=None) -> Angle:
    terms = entry.get("terms")
    if not isinstance(terms, list) or not terms:
        raise MalformedEntry("sum entry needs a nonempty terms list")
    if entry.get("op", "sum") == "max":
        if any(_term(t)[0] == "sym" for t in terms):
            raise MalformedEntry("max entries take literal terms only")
        return max(_term(t)[1] for t in terms)
    return evaluate_terms(terms, entry, assignment) + _adjust(entry.get("adjust"))


def deficit_value(entry: dict, assignment=None) -> Angle:
    """
    sum over the vertices of (2pi/3 - 2pi/d) plus (4 len(kappa) - sum kappa) pi/30,
    plus any redistribution adjustment.
    """
    degrees = _degrees(entry)
    kappa = entry.get("kappa")
    if not isinstance(kappa, list) or not kappa:
        raise MalformedEntry("deficit entry needs a nonempty kappa list")
    vertex_part = sum((Angle(Fraction(2, 3) - Fraction(2, d)) for d in degrees), ZERO)
    received = evaluate_terms(kappa, entry, assignment)
    return (vertex_part + Angle.thirtieths(4 * len(kappa)) - received
            + _adjust(entry.get("adjust")))


def dagger_value(entry: dict, assignment=None) -> Angle:
    n2 = entry.get("n2")
    if not isinstance(n2, int) or isinstance(n2, bool):
        raise MalformedEntry("dagger entry needs an integer n2")
    reduction = _adjust([entry.get("reduction", 0)])
    try:
        return dagger_bound(n2, reduction)
    except CurvatureError as e:
        raise MalformedEntry(str(e))


_THRESHOLD_BOUNDS: Dict[str, Callable[[dict], Callable[[int], Angle]]] = {
    "degree": lambda e: degree_bound,
    "dagger": lambda e: (lambda n2, r=_adjust([e.get("reduction", 0)]): dagger_bound(n2, r)),
}


def _check_threshold(entry: dict) -> Tuple[bool, str]:
    name = entry.get("bound")
    if name not in _THRESHOLD_BOUNDS:
        raise MalformedEntry(f"unknown threshold bound {name!r}")
    try:
        start, stop = (int(x) for x in entry["range"])
        expect = int(entry["expect"])
    except (KeyError, TypeError, ValueError):
        raise MalformedEntry("threshold entry needs range [start, stop] and expect")
    if start > stop:
        raise MalformedEntry(f"empty range {start}..{stop}")
    f = _THRESHOLD_BOUNDS[name](entry)
    got = threshold(f, start, stop)
    return got == expect, f"threshold {got} (expected {expect})"


def _check_identity(entry: dict) -> Tuple[bool, str]:
    if entry.get("name") != "delta0":
        raise MalformedEntry(f"unknown identity {entry.get('name')!r}")
    try:
        start, stop = (int(x) for x in entry["range"])
    except (KeyError, TypeError, ValueError):
        raise MalformedEntry("identity entry needs range [start, stop]")
    for k in range(start, stop + 1):
        if delta0_bound(k) != TWO_PI:
            return False, f"k = {k} gives {delta0_bound(k)}"
    return True, f"2 pi for k = {start}..{stop}"


VALUE_KINDS = {
    "bound": bound_value,
    "curvature": curvature_value,
    "sum": sum_value,
    "deficit": deficit_value,
    "dagger": dagger_value,
}
FLAG_KINDS = {"threshold": _check_threshold, "identity": _check_identity}


def check_entry(entry: dict) -> Verdict:
    """Re-evaluate one ledger entry exactly."""
    entry_id = str(entry.get("id", "?"))
    verdict = Verdict(entry_id=entry_id, status=MALFORMED, src=entry.get("src", ""),
                      printed=entry.get("printed", ""), finding=entry.get("finding", ""))
    kind = entry.get("kind", "bound")
    try:
        if kind in FLAG_KINDS:
            ok, reason = FLAG_KINDS[kind](entry)
            verdict.status = VERIFIED if ok else REFUTED
            verdict.reason = reason
            return verdict
        if kind not in VALUE_KINDS:
            raise MalformedEntry(f"unknown kind {kind!r}")
        verdict.claim = Claim.parse(entry.get("claim"))
        verdict.value = VALUE_KINDS[kind](entry)
        ok = verdict.claim.holds(verdict.value)
        if ok and kind == "deficit" and "alt" in entry:
            alt = entry["alt"]
            if not isinstance(alt, dict):
                raise MalformedEntry("alt must be an object with claim and adjust")
            alt_claim = Claim.parse(alt.get("claim"))
            alt_value = deficit_value({**entry, "adjust": alt.get("adjust", [])})
            if not alt_claim.holds(alt_value):
                ok = False
                verdict.reason = f"alternative reading gives {alt_value}, claimed {alt_claim}"
        verdict.status = VERIFIED if ok else REFUTED
    except MalformedEntry as e:
        verdict.status = MALFORMED
        verdict.reason = str(e)
    return verdict


def check_deficit(entry: dict) -> Verdict:
    """check_entry for a deficit row, whatever its kind field says."""
    return check_entry({**entry, "kind": "deficit"})


def split_invariant(entry: dict, rng: random.Random, samples: int = 20) -> bool:
    """True when every sampled split of the symbolic pairs gives the symbolic value."""
    kind = entry.get("kind", "bound")
    if kind not in VALUE_KINDS:
        return True
    evaluate = VALUE_KINDS[kind]
    try:
        symbolic = evaluate(entry)
    except MalformedEntry:
        return True
    for _ in range(samples):
        if evaluate(entry, random_assignment(entry, rng)) != symbolic:
            return False
    return True


# ---------------------------------------------------------------------------
# Files

def parse_ledger(text: str, name: str = "<ledger>") -> List[dict]:
    entries = []
    ids = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        try:
            entry = json.loads(s)
        except json.JSONDecodeError as e:
            raise LedgerParseError(lineno, f"invalid JSON in {name}: {e.msg}")
        if not isinstance(entry, dict):
            raise LedgerParseError(lineno, "entry is not a JSON object")
        if "id" not in entry:
            raise LedgerParseError(lineno, "entry has no id")
        if entry["id"] in ids:
            raise LedgerParseError(lineno, f"duplicate id {entry['id']!r}")
        ids.add(entry["id"])
        entries.append(entry)
    return entries


def load_ledger(path: str) -> List[dict]:
    with open(path, "r", encoding="utf-8") as f:
        return parse_ledger(f.read(), name=os.path.basename(path))


@dataclass
class LedgerReport:
    path: str
    verdicts: List[Verdict] = field(default_factory=list)

    def count(self, status: str) -> int:
        return sum(v.status == status for v in self.verdicts)

    @property
    def verified(self) -> int:
        return self.count(VERIFIED)

    @property
    def refuted(self) -> int:
        return self.count(REFUTED)

    @property
    def malformed(self) -> int:
        return self.count(MALFORMED)

    @property
    def exit_status(self) -> int:
        return 0 if self.refuted == 0 and self.malformed == 0 else 1

    def findings(self) -> List[Verdict]:
        return [v for v in self.verdicts if v.finding]

    def as_dict(self) -> dict:
        return {
            "path": self.path,
            "summary": {"verified": self.verified, "refuted": self.refuted,
                        "malformed": self.malformed},
            "entries": [v.as_dict() for v in self.verdicts],
        }


def check_entries(entries: Sequence[dict], path: str = "<ledger>",
                  progress: bool = False) -> LedgerReport:
    verdicts = [check_entry(e) for e in tqdm(entries, desc=os.path.basename(path),
                                             disable=not progress)]
    verdicts.sort(key=lambda v: v.entry_id)
    report = LedgerReport(path=path, verdicts=verdicts)
    for v in verdicts:
        if v.status != VERIFIED:
            logger.warning(f"[Ledger] {v.entry_id}: {v.status} "
                           f"{v.value if v.value is not None else ''} {v.reason}".rstrip())
    logger.info(f"[Ledger] {path}: {report.verified} verified, {report.refuted} refuted, "
                f"{report.malformed} malformed")
    return report


def check_file(path: str, progress: bool = False) -> LedgerReport:
    """Parse and check a ledger file; LedgerParseError on syntax problems."""
    return check_entries(load_ledger(path), path=path, progress=progress)


def shipped_ledgers(ledger_dir: str = LEDGER_DIR) -> List[str]:
    return sorted(os.path.join(ledger_dir, f) for f in os.listdir(ledger_dir)
                  if f.endswith(".ledger"))
