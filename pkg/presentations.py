"""
Words, presentations and Tietze-script verification.

Words are tuples of (generator, sign) letters kept freely reduced. Relators
are treated as cyclic words whenever two presentations are compared.
"""

from __future__ import annotations

import json
import logging
import os
import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

logger = logging.getLogger(__name__)

Letter = Tuple[str, int]

_NAME = re.compile(r"[A-Za-z][A-Za-z0-9_]*")
_EXPONENT = re.compile(r"\^-?\d+")


class WordError(ValueError):
    pass


class PresentationError(ValueError):
    pass


class TietzeScriptError(ValueError):
    pass


def free_reduce(letters: Iterable[Letter]) -> Tuple[Letter, ...]:
    out: List[Letter] = []
    for g, s in letters:
        if out and out[-1][0] == g and out[-1][1] == -s:
            out.pop()
        else:
            out.append((g, s))
    return tuple(out)


@dataclass(frozen=True, order=True)
class Word:
    letters: Tuple[Letter, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", free_reduce(self.letters))

    @classmethod
    def gen(cls, name: str, power: int = 1) -> "Word":
        sign = 1 if power > 0 else -1
        return cls(((name, sign),) * abs(power))

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def __pow__(self, k: int) -> "Word":
        base = self if k >= 0 else self.inverse()
        return Word(base.letters * abs(k))

    def inverse(self) -> "Word":
        return Word(tuple((g, -s) for g, s in reversed(self.letters)))

    def generators(self) -> set:
        return {g for g, _ in self.letters}

    def exponent_sum(self, name: str) -> int:
        return sum(s for g, s in self.letters if g == name)

    def occurrences(self, name: str) -> int:
        return sum(1 for g, _ in self.letters if g == name)

    def cyclically_reduced(self) -> "Word":
        letters = list(self.letters)
        while len(letters) > 1 and letters[0][0] == letters[-1][0] and letters[0][1] == -letters[-1][1]:
            letters = letters[1:-1]
        return Word(tuple(letters))

    def is_cyclically_reduced(self) -> bool:
        return self.cyclically_reduced().letters == self.letters

    def rotate(self, k: int) -> "Word":
        if not self.letters:
            return self
        k %= len(self.letters)
        return Word(self.letters[k:] + self.letters[:k])

    def substitute(self, mapping: Dict[str, "Word"]) -> "Word":
        out: List[Letter] = []
        for g, s in self.letters:
            if g in mapping:
                w = mapping[g] if s == 1 else mapping[g].inverse()
                out.extend(w.letters)
            else:
                out.append((g, s))
        return Word(tuple(out))

    def cyclic_class(self) -> Tuple[Letter, ...]:
        """Least rotation of the cyclic reduction or of its inverse."""
        w = self.cyclically_reduced()
        if not w.letters:
            return ()
        candidates = []
        for v in (w, w.inverse().cyclically_reduced()):
            candidates.extend(v.rotate(k).letters for k in range(len(v)))
        return min(candidates)

    def __str__(self) -> str:
        return format_word(self)


def format_word(w: Word) -> str:
    if not w.letters:
        return "1"
    parts = []
    i = 0
    letters = w.letters
    while i < len(letters):
        g, s = letters[i]
        j = i
        while j < len(letters) and letters[j] == (g, s):
            j += 1
        power = (j - i) * s
        parts.append(g if power == 1 else f"{g}^{power}")
        i = j
    return " ".join(parts)


def parse_word(text: str) -> Word:
    """
    Read 'x1 x2 x3^-1', 'y^12' or grouped powers such as '(x t^-1)^7 x^-1 t^2'.
    '1' or an empty string is the empty word.
    """
    tokens = re.findall(r"\(|\)|\^-?\d+|[A-Za-z][A-Za-z0-9_]*|\S", text)
    pos = 0

    def power() -> int:
        nonlocal pos
        if pos < len(tokens) and _EXPONENT.fullmatch(tokens[pos]):
            pos += 1
            return int(tokens[pos - 1][1:])
        return 1

    def sequence(depth: int) -> Word:
        nonlocal pos
        w = Word()
        while pos < len(tokens):
            tok = tokens[pos]
            if tok == ")":
                if depth == 0:
                    raise WordError(f"unbalanced ')' in {text!r}")
                return w
            pos += 1
            if tok == "(":
                inner = sequence(depth + 1)
                if pos >= len(tokens) or tokens[pos] != ")":
                    raise WordError(f"unbalanced '(' in {text!r}")
                pos += 1
                w = w * inner ** power()
            elif tok == "1":
                continue
            elif _NAME.fullmatch(tok):
                w = w * Word.gen(tok, power())
            else:
                raise WordError(f"unexpected token {tok!r} in {text!r}")
        if depth:
            raise WordError(f"unbalanced '(' in {text!r}")
        return w

    return sequence(0)


@dataclass(frozen=True)
class Presentation:
    generators: Tuple[str, ...]
    relators: Tuple[Word, ...]

    def __post_init__(self):
        gens = tuple(self.generators)
        if len(set(gens)) != len(gens):
            raise PresentationError(f"repeated generator in {gens}")
        for g in gens:
            if not g or not _NAME.fullmatch(g):
                raise PresentationError(f"invalid generator name {g!r}")
        for i, r in enumerate(self.relators):
            unknown = r.generators() - set(gens)
            if unknown:
                raise PresentationError(f"relator {i} uses undeclared generators {sorted(unknown)}")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "relators", tuple(self.relators))

    def cyclic_relators(self) -> Tuple[Word, ...]:
        return tuple(r.cyclically_reduced() for r in self.relators)

    def relator_classes(self) -> List[Tuple[Letter, ...]]:
        return sorted(r.cyclic_class() for r in self.relators if r.cyclically_reduced().letters)

    def __str__(self) -> str:
        return format_presentation(self)


def format_presentation(p: Presentation) -> str:
    lines = ["gens: " + " ".join(p.generators)]
    lines.extend(format_word(r) for r in p.relators)
    return "\n".join(lines) + "\n"


def parse_presentation(text: str) -> Presentation:
    gens = None
    relators = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("gens:"):
            gens = tuple(line[len("gens:"):].split())
            continue
        if gens is None:
            raise PresentationError(f"line {lineno}: relator before the 'gens:' header")
        try:
            relators.append(parse_word(line))
        except WordError as e:
            raise PresentationError(f"line {lineno}: {e}")
    if gens is None:
        raise PresentationError("missing 'gens:' header")
    return Presentation(gens, tuple(relators))


def same_presentation(p: Presentation, q: Presentation,
                      renaming: Optional[Dict[str, str]] = None) -> bool:
    """Equal generator sets and relator multisets up to cyclic permutation and inversion."""
    if renaming:
        mapping = {a: Word.gen(b) for a, b in renaming.items()}
        p = Presentation(tuple(renaming.get(g, g) for g in p.generators),
                         tuple(r.substitute(mapping) for r in p.relators))
    return set(p.generators) == set(q.generators) and p.relator_classes() == q.relator_classes()


def build_fibonacci(r: int, n: int) -> Presentation:
    """F(r, n): relators x_i x_{i+1} ... x_{i+r-1} x_{i+r}^-1, subscripts mod n in 1..n."""
    if r < 2 or n < 2:
        raise PresentationError(f"F(r, n) needs r >= 2 and n >= 2, got r={r}, n={n}")
    gens = tuple(f"x{i}" for i in range(1, n + 1))

    def x(i):
        return f"x{(i - 1) % n + 1}"

    relators = []
    for i in range(1, n + 1):
        letters = [(x(i + j), 1) for j in range(r)] + [(x(i + r), -1)]
        relators.append(Word(tuple(letters)))
    return Presentation(gens, tuple(relators))


@dataclass(frozen=True)
class RelativePresentation:
    """<G, x | r> over G = <t | coefficient relators>."""

    coefficient_relators: Tuple[Word, ...]
    extra_generators: Tuple[str, ...]
    mixed_relators: Tuple[Word, ...]
    coefficient_generator: str = "t"

    def __post_init__(self):
        for r in self.mixed_relators:
            if not r.is_cyclically_reduced():
                raise PresentationError(f"mixed relator {r} is not cyclically reduced")

    def as_presentation(self) -> Presentation:
        gens = (self.coefficient_generator,) + tuple(self.extra_generators)
        return Presentation(gens, tuple(self.coefficient_relators) + tuple(self.mixed_relators))


def build_relative_pn(n: int) -> RelativePresentation:
    """P_n = <t, u | t^5, t^2 u t u^-n>."""
    if n < 7:
        logger.warning(f"[Present] P_n is only claimed aspherical for n >= 7, building n={n} anyway")
    t5 = Word.gen("t", 5)
    mixed = Word.gen("t", 2) * Word.gen("u") * Word.gen("t") * Word.gen("u", -n)
    return RelativePresentation((t5,), ("u",), (mixed,))


FAMILIES = {"seven": (7, 2), "eight": (8, 3)}


def build_extension(k: int, family: str) -> Presentation:
    """E(7+5k, 5) = <x, t | t^5, (x t^-1)^(7+5k) x^-1 t^2>, or the 8+5k analogue ending in t^3."""
    if k < 0:
        raise PresentationError("k must be nonnegative")
    if family not in FAMILIES:
        raise PresentationError(f"family must be one of {sorted(FAMILIES)}, got {family!r}")
    base, tail = FAMILIES[family]
    N = base + 5 * k
    xt = Word.gen("x") * Word.gen("t", -1)
    relator = xt ** N * Word.gen("x", -1) * Word.gen("t", tail)
    return Presentation(("x", "t"), (Word.gen("t", 5), relator))


# ---------------------------------------------------------------- Tietze steps


def is_power_of_relator(w: Word, r: Word) -> bool:
    """w is, up to conjugacy, a power of r or of r^-1."""
    u = w.cyclically_reduced()
    base = r.cyclically_reduced()
    if not u.letters:
        return True
    if not base.letters or len(u) % len(base):
        return False
    p = len(u) // len(base)
    target = {(base ** p).cyclic_class(), (base ** -p).cyclic_class()}
    return u.cyclic_class() in target


@dataclass
class TietzeStep:
    kind: str
    args: dict

    def describe(self) -> str:
        details = ", ".join(f"{k}={v}" for k, v in self.args.items())
        return f"{self.kind}({details})"


@dataclass
class TietzeScript:
    start: Presentation
    target: Presentation
    steps: List[TietzeStep]
    renaming: Dict[str, str] = field(default_factory=dict)
    notes: str = ""


@dataclass
class TietzeVerdict:
    valid: bool
    step: Optional[int] = None
    reason: str = ""
    trace: List[Presentation] = field(default_factory=list)

    def __str__(self) -> str:
        if self.valid:
            return f"Valid ({len(self.trace) - 1} steps)"
        return f"InvalidAtStep({self.step}, {self.reason})"


class _StepFailure(Exception):
    pass


class TietzeReplay:
    """Applies steps one at a time, remembering the definitions of added generators."""

    def __init__(self, start: Presentation):
        self.current = start
        self.definitions: Dict[str, Word] = {}

    def _relator(self, index) -> Word:
        try:
            return self.current.relators[int(index)]
        except (IndexError, ValueError, TypeError):
            raise _StepFailure(f"no relator with index {index!r}")

    def _check_generator(self, name):
        if name not in self.current.generators:
            raise _StepFailure(f"unknown generator {name!r}")

    def _expand(self, w: Word) -> Word:
        for _ in range(len(self.definitions) + 1):
            defined = w.generators() & set(self.definitions)
            if not defined:
                return w
            w = w.substitute({g: self.definitions[g] for g in defined})
        raise _StepFailure("circular generator definitions")

    def _replace(self, gens, relators):
        self.current = Presentation(tuple(gens), tuple(relators))

    def apply(self, step: TietzeStep):
        handler = getattr(self, f"_do_{step.kind}", None)
        if handler is None:
            raise _StepFailure(f"unknown step kind {step.kind!r}")
        handler(**step.args)

    def _do_add_generator(self, name, word):
        if name in self.current.generators:
            raise _StepFailure(f"generator {name!r} already exists")
        w = parse_word(word)
        missing = w.generators() - set(self.current.generators)
        if missing:
            raise _StepFailure(f"defining word uses unknown generators {sorted(missing)}")
        self.definitions[name] = w
        self._replace(self.current.generators + (name,),
                      self.current.relators + (Word.gen(name) * w.inverse(),))

    def _do_eliminate_generator(self, name, relator=None):
        self._check_generator(name)
        indices = range(len(self.current.relators)) if relator is None else [int(relator)]
        chosen = None
        for i in indices:
            r = self._relator(i)
            if r.occurrences(name) == 1:
                chosen = i
                break
        if chosen is None:
            raise _StepFailure(f"no relator contains {name!r} exactly once")
        r = self._relator(chosen)
        pos = next(j for j, (g, _) in enumerate(r.letters) if g == name)
        rotated = r.rotate(pos)
        sign = rotated.letters[0][1]
        rest = Word(rotated.letters[1:])
        value = rest.inverse() if sign == 1 else rest
        others = [w.substitute({name: value}) for j, w in enumerate(self.current.relators) if j != chosen]
        for w in others:
            if name in w.generators():
                raise _StepFailure(f"{name!r} survives elimination")
        self.definitions.pop(name, None)
        substituted = {g: d.substitute({name: value}) for g, d in self.definitions.items()}
        self.definitions = {g: d for g, d in substituted.items() if g not in d.generators()}
        self._replace([g for g in self.current.generators if g != name], others)

    def _do_substitute(self, index, find, replace, justification):
        r = self._relator(index)
        u, v = parse_word(find), parse_word(replace)
        just = self._relator(justification)
        if not is_power_of_relator(u.inverse() * v, just):
            raise _StepFailure(f"({find})^-1 ({replace}) is not a power of relator {justification}")
        for k in range(max(len(r), 1)):
            rotated = r.rotate(k)
            if rotated.letters[:len(u)] == u.letters:
                new = Word(v.letters + rotated.letters[len(u):])
                relators = list(self.current.relators)
                relators[int(index)] = new
                self._replace(self.current.generators, relators)
                return
        raise _StepFailure(f"relator {index} does not contain {find}")

    def _do_replace_by_inverse(self, name):
        self._check_generator(name)
        inv = Word.gen(name, -1)
        if name in self.definitions:
            self.definitions[name] = self.definitions[name].inverse()
        self.definitions = {g: d.substitute({name: inv}) for g, d in self.definitions.items()}
        self._replace(self.current.generators,
                      [r.substitute({name: inv}) for r in self.current.relators])

    def _do_replace_by_word(self, name, word, justification):
        self._check_generator(name)
        w = parse_word(word)
        if name in w.generators():
            raise _StepFailure(f"replacement word for {name!r} mentions {name!r}")
        identity = self._expand(Word.gen(name, -1) * w)
        just = self._expand(self._relator(justification))
        if not is_power_of_relator(identity, just):
            raise _StepFailure(f"{name} = {word} does not follow from relator {justification}")
        self.definitions.pop(name, None)
        self.definitions = {g: d for g, d in self.definitions.items() if name not in d.generators()}
        self._replace([g for g in self.current.generators if g != name],
                      [r.substitute({name: w}) for r in self.current.relators])

    def _do_delete_relator(self, index, justification):
        r = self._relator(index)
        just = self._relator(justification)
        if int(index) == int(justification) or not is_power_of_relator(r, just):
            raise _StepFailure(f"relator {index} is not a power of relator {justification}")
        relators = [w for j, w in enumerate(self.current.relators) if j != int(index)]
        self._replace(self.current.generators, relators)

    def _do_cyclic_permute(self, index, shift=None, start=None):
        r = self._relator(index)
        if start is not None:
            prefix = parse_word(start).letters
            shifts = [k for k in range(len(r)) if r.rotate(k).letters[:len(prefix)] == prefix]
            if not shifts:
                raise _StepFailure(f"relator {index} has no rotation starting with {start}")
            shift = shifts[0]
        relators = list(self.current.relators)
        relators[int(index)] = r.rotate(int(shift or 0))
        self._replace(self.current.generators, relators)

    def _do_invert_relator(self, index):
        r = self._relator(index)
        relators = list(self.current.relators)
        relators[int(index)] = r.inverse()
        self._replace(self.current.generators, relators)

    def _do_rename(self, old, new):
        self._check_generator(old)
        if new in self.current.generators:
            raise _StepFailure(f"generator {new!r} already exists")
        mapping = {old: Word.gen(new)}
        if old in self.definitions:
            self.definitions[new] = self.definitions.pop(old)
        self.definitions = {g: d.substitute(mapping) for g, d in self.definitions.items()}
        self._replace([new if g == old else g for g in self.current.generators],
                      [r.substitute(mapping) for r in self.current.relators])


def verify_tietze_script(start: Presentation, script: TietzeScript,
                         target: Presentation) -> TietzeVerdict:
    """Replay the script from `start`; Valid iff every step is legal and the end matches `target`."""
    replay = TietzeReplay(start)
    trace = [start]
    for i, step in enumerate(script.steps):
        try:
            replay.apply(step)
        except (_StepFailure, WordError, PresentationError, TypeError) as e:
            logger.info(f"[Tietze] step {i} {step.describe()} failed: {e}")
            return TietzeVerdict(False, i, str(e), trace)
        trace.append(replay.current)
        logger.debug(f"[Tietze] step {i} {step.kind}: {[str(r) for r in replay.current.relators]}")
    if not same_presentation(replay.current, target, script.renaming):
        final = ", ".join(str(r) for r in replay.current.relators)
        return TietzeVerdict(False, len(script.steps), f"final presentation <{final}> differs from target", trace)
    return TietzeVerdict(True, None, "", trace)


def _presentation_from_json(data: dict) -> Presentation:
    return Presentation(tuple(data["gens"]), tuple(parse_word(r) for r in data["relators"]))


def load_tietze_script(path: str, N: Optional[int] = None) -> TietzeScript:
    """Read a JSON script; '{N}' placeholders are replaced by N (or the file's default)."""
    with open(path, "r") as f:
        text = f.read()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise TietzeScriptError(f"{path}: {e}")
    if N is None:
        N = raw.get("default_N")
    if "{N}" in text:
        if N is None:
            raise TietzeScriptError(f"{path} is a template; an exponent N is required")
        raw = json.loads(text.replace("{N}", str(N)))
    try:
        steps = []
        for s in raw["steps"]:
            args = {k: v for k, v in s.items() if k != "kind"}
            steps.append(TietzeStep(s["kind"], args))
        return TietzeScript(start=_presentation_from_json(raw["start"]),
                            target=_presentation_from_json(raw["target"]),
                            steps=steps, renaming=raw.get("renaming", {}),
                            notes=raw.get("notes", ""))
    except (KeyError, WordError, PresentationError) as e:
        raise TietzeScriptError(f"{path}: malformed script ({e})")


SCRIPT_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "tietze_scripts")


def tietze_script_for(family: str, k: int, script_dir: str = SCRIPT_DIR) -> TietzeScript:
    if family not in FAMILIES:
        raise TietzeScriptError(f"no script for family {family!r}")
    base, _ = FAMILIES[family]
    return load_tietze_script(os.path.join(script_dir, f"family_{family}.json"), base + 5 * k)
