"""
K0-regions with shadow edges.

A region of degree m has boundary vertices 1..m; boundary edge v joins v and
v+1 (edge m closes the cycle). Shadow edges are chords between boundary
vertices. The module splits the disk into faces, solves the face-perimeter
equations (every face of the underlying diagram has n+1 edges), applies the
labelling rules and enumerates corner labellings of the surviving shapes.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import sympy
from tqdm import tqdm

from stargraph import (A, B, L, M, X, Y, Z, CornerLetter, Label, canonical_label,
                       flip_label, format_label, label_key)

logger = logging.getLogger(__name__)

N = sympy.Symbol("n", integer=True)

MAX_DEGREE = 9

Chord = Tuple[int, int]


class ChordConfigError(ValueError):
    pass


def format_chord(chord: Chord) -> str:
    p, q = chord
    return f"({p}{q})" if p < 10 and q < 10 else f"({p} {q})"


def parse_chords(text: str) -> List[Chord]:
    """Read '(13),(14),(46)' or '(5 10)'; '{}' or an empty string is no chords."""
    chords = []
    for body in re.findall(r"\(([^)]*)\)", text):
        parts = body.split()
        if len(parts) == 1 and len(parts[0]) == 2 and parts[0].isdigit():
            parts = list(parts[0])
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise ChordConfigError(f"cannot read chord ({body})")
        chords.append((int(parts[0]), int(parts[1])))
    return chords


@dataclass(frozen=True)
class ChordConfig:
    m: int
    chords: Tuple[Chord, ...] = ()

    def __post_init__(self):
        if self.m < 3:
            raise ChordConfigError(f"a region needs at least 3 boundary vertices, got {self.m}")
        normalised = []
        for chord in self.chords:
            p, q = chord
            if not (1 <= p <= self.m and 1 <= q <= self.m) or p == q:
                raise ChordConfigError(f"chord {chord} is not between distinct vertices of 1..{self.m}")
            normalised.append((min(p, q), max(p, q)))
        object.__setattr__(self, "chords", tuple(sorted(normalised)))

    @classmethod
    def parse(cls, m: int, text: str) -> "ChordConfig":
        return cls(m, tuple(parse_chords(text)))

    def images(self) -> List[Tuple[Chord, ...]]:
        """The chord multiset under all 2m rotations and reflections."""
        m = self.m
        out = []
        for s in range(m):
            for reflect in (False, True):
                def move(v):
                    w = (-(v - 1) if reflect else v - 1) + s
                    return w % m + 1
                out.append(tuple(sorted(tuple(sorted((move(p), move(q)))) for p, q in self.chords)))
        return out

    def canonical(self) -> "ChordConfig":
        return ChordConfig(self.m, min(self.images()))

    def chords_at(self, v: int) -> int:
        return sum((p == v) + (q == v) for p, q in self.chords)

    def __str__(self) -> str:
        return "{" + ",".join(format_chord(c) for c in self.chords) + "}"


# ---------------------------------------------------------------- faces

Side = Tuple[str, int]  # ("e", v) boundary edge v, ("c", k) chord number k


@dataclass(frozen=True)
class Face:
    index: int
    vertices: Tuple[int, ...]
    sides: Tuple[Side, ...]

    @property
    def boundary_edges(self) -> List[int]:
        return [i for kind, i in self.sides if kind == "e"]

    @property
    def chords(self) -> List[int]:
        return [i for kind, i in self.sides if kind == "c"]

    @property
    def is_bigon(self) -> bool:
        return len(self.sides) == 2


def faces(config: ChordConfig) -> List[Face]:
    """
    Split the disk by inserting the chords one at a time. A chord must join two
    vertices of a single current face, otherwise it crosses an earlier chord.
    """
    m = config.m
    regions: List[Tuple[List[int], List[Side]]] = [
        (list(range(1, m + 1)), [("e", v) for v in range(1, m + 1)])]
    for k, (p, q) in enumerate(config.chords):
        for r, (verts, sides) in enumerate(regions):
            if p in verts and q in verts:
                break
        else:
            raise ChordConfigError(f"chord {format_chord((p, q))} crosses another chord of {config}")
        i, j = sorted((verts.index(p), verts.index(q)))
        inner = (verts[i:j + 1], sides[i:j] + [("c", k)])
        outer = (verts[j:] + verts[:i + 1], sides[j:] + sides[:i] + [("c", k)])
        regions[r:r + 1] = [inner, outer]
    out = [Face(idx, tuple(v), tuple(s)) for idx, (v, s) in enumerate(regions)]
    logger.debug(f"[Regions] {config} has {len(out)} faces")
    return out


def dual_tree(face_list: Sequence[Face]) -> nx.Graph:
    tree = nx.Graph()
    tree.add_nodes_from(f.index for f in face_list)
    by_chord: Dict[int, List[int]] = {}
    for f in face_list:
        for k in f.chords:
            by_chord.setdefault(k, []).append(f.index)
    for k, (a, b) in by_chord.items():
        tree.add_edge(a, b, chord=k)
    return tree


# ---------------------------------------------------------------- length equations


def format_affine(alpha: int, beta: int) -> str:
    """'n+3', '2n', '-n+5', '6', 'n-1'."""
    if alpha == 0:
        return str(beta)
    head = "n" if alpha == 1 else "-n" if alpha == -1 else f"{alpha}n"
    if beta == 0:
        return head
    return f"{head}{beta:+d}"


def _coefficients(expr) -> Tuple[int, int]:
    expr = sympy.expand(expr)
    return int(expr.coeff(N, 1)), int(expr.coeff(N, 0))


@dataclass
class FeasibilityResult:
    status: str  # "Feasible" or "LEC"
    lengths: Dict[Chord, object] = field(default_factory=dict)
    n_min: Optional[int] = None
    n_max: Optional[int] = None
    witness: str = ""

    @property
    def feasible(self) -> bool:
        return self.status == "Feasible"

    @property
    def n_condition(self) -> str:
        if not self.feasible:
            return ""
        if self.n_max is None:
            return f"n >= {self.n_min}"
        if self.n_min == self.n_max:
            return f"n = {self.n_min}"
        return f"{self.n_min} <= n <= {self.n_max}"

    def length_text(self) -> Dict[str, str]:
        return {format_chord(c): format_affine(*_coefficients(e)) for c, e in self.lengths.items()}


def _peel_root(face_list: Sequence[Face]) -> Face:
    return min(face_list, key=lambda f: (-len(f.boundary_edges), -len(f.chords), f.index))


def lec_check(config: ChordConfig, nmin: int = 7, face_list: Optional[Sequence[Face]] = None) -> FeasibilityResult:
    """
    Solve b(F) + sum of chord lengths on F = n+1 for every face F, peeling
    leaves of the dual tree towards a root face; the root's equation decides.
    """
    face_list = list(face_list) if face_list is not None else faces(config)
    tree = dual_tree(face_list)
    root = _peel_root(face_list)
    parent = nx.dfs_predecessors(tree, root.index)
    length: Dict[int, object] = {}
    for idx in nx.dfs_postorder_nodes(tree, root.index):
        if idx == root.index:
            continue
        face = face_list[idx]
        up = tree.edges[idx, parent[idx]]["chord"]
        known = sum((length[k] for k in face.chords if k != up), sympy.Integer(0))
        length[up] = N + 1 - len(face.boundary_edges) - known
        logger.debug(f"[LEC] face {idx}: length of {format_chord(config.chords[up])} = {length[up]}")
    lhs = len(root.boundary_edges) + sum((length[k] for k in root.chords), sympy.Integer(0))
    alpha, beta = _coefficients(lhs)
    equation = f"n+1 = {format_affine(alpha, beta)}"

    if alpha == 1 and beta != 1:
        return FeasibilityResult("LEC", witness=equation)
    if alpha == 1:
        lo, hi = nmin, None
    else:
        solution = sympy.solve(sympy.Eq(lhs, N + 1), N)
        if not solution or not solution[0].is_integer or solution[0] < nmin:
            return FeasibilityResult("LEC", witness=equation)
        lo = hi = int(solution[0])

    for k, expr in sorted(length.items()):
        a, b = _coefficients(expr)
        chord = format_chord(config.chords[k])
        if a > 0:
            lo = max(lo, -((b - 1) // a))
        elif a < 0:
            bound = (b - 1) // (-a)
            hi = bound if hi is None else min(hi, bound)
        elif b < 1:
            return FeasibilityResult("LEC", witness=f"length of {chord} = {b} < 1")
        if hi is not None and lo > hi:
            return FeasibilityResult(
                "LEC", witness=f"length of {chord} = {format_affine(a, b)} < 1 for n >= {nmin}")
    lengths = {config.chords[k]: sympy.expand(e) for k, e in sorted(length.items())}
    return FeasibilityResult("Feasible", lengths, lo, hi, equation)


# ---------------------------------------------------------------- labelling


@dataclass
class LacResult:
    status: str  # "Pass" or "LAC"
    rule: str = ""
    witness: str = ""
    designations: List[Dict[int, int]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.status == "Pass"


def _edge_before(v: int, m: int) -> int:
    return v - 1 if v > 1 else m


def _face_of_edge(face_list: Sequence[Face]) -> Dict[int, int]:
    return {e: f.index for f in face_list for e in f.boundary_edges}


def _orientations(config: ChordConfig, face_list: Sequence[Face]) -> Dict[int, int]:
    """+1 on the face holding edge m, flipping across every chord."""
    tree = dual_tree(face_list)
    root = _face_of_edge(face_list)[config.m]
    sign = {root: 1}
    for a, b in nx.bfs_edges(tree, root):
        sign[b] = -sign[a]
    return sign


def _designations(config: ChordConfig, face_list: Sequence[Face]) -> Iterable[Dict[int, int]]:
    """Every choice of one (b,a)-edge per face meeting the odd-vertex exclusive-or."""
    m = config.m
    face_of = _face_of_edge(face_list)
    odd = [v for v in range(1, m + 1) if config.chords_at(v) % 2]
    choices = [f.boundary_edges for f in face_list]
    for pick in product(*choices):
        chosen = {f.index: e for f, e in zip(face_list, pick)}
        ok = True
        for v in odd:
            before, after = _edge_before(v, m), v
            a0 = chosen[face_of[before]] == before
            ai = chosen[face_of[after]] == after
            if a0 == ai:
                ok = False
                break
        if ok:
            yield chosen


def lac_check(config: ChordConfig, face_list: Optional[Sequence[Face]] = None) -> LacResult:
    """
    R1 a face (other than a bigon) with no boundary edge; R2 a bigon; R3 a
    vertex with an odd number of chords whose two boundary edges are each the
    only boundary edge of their face; R4 no designation meets the
    odd-vertex exclusive-or.
    """
    face_list = list(face_list) if face_list is not None else faces(config)
    m = config.m
    for f in face_list:
        if not f.boundary_edges and not f.is_bigon:
            return LacResult("LAC", "R1", f"face {list(f.vertices)} has no boundary edge")
    for f in face_list:
        if f.is_bigon:
            return LacResult("LAC", "R2", f"bigon on vertices {list(f.vertices)}")
    face_of = _face_of_edge(face_list)
    for v in range(1, m + 1):
        if config.chords_at(v) % 2 == 0:
            continue
        flanks = (_edge_before(v, m), v)
        if all(face_list[face_of[e]].boundary_edges == [e] for e in flanks):
            return LacResult("LAC", "R3", f"vertex {v} has {config.chords_at(v)} chords between "
                                          f"two forced (b,a)-edges")
    found = list(_designations(config, face_list))
    if not found:
        return LacResult("LAC", "R4", "no (b,a)-edge choice satisfies every odd vertex")
    return LacResult("Pass", designations=found)


def corner_letter(chords: int, a0: bool, ai: bool, orientation: int) -> CornerLetter:
    """
    Corner at a vertex with `chords` incident chords; a0/ai say whether the
    incoming/outgoing boundary edge is a (b,a)-edge; orientation of the face
    holding the incoming edge.
    """
    plus = orientation > 0
    if chords % 2:
        if a0 == ai:
            raise ChordConfigError("odd vertex needs exactly one adjacent (b,a)-edge")
        if a0:
            return X if plus else Y.inverse()
        return X.inverse() if plus else Y
    if a0 and ai:
        return Z if plus else Z.inverse()
    if a0:
        return A if plus else B.inverse()
    if ai:
        return B if plus else A.inverse()
    return M if plus else L


@dataclass(frozen=True)
class LabeledRegion:
    config: ChordConfig
    corners: Label
    designation: Tuple[Tuple[int, int], ...] = ()
    orientation: int = 1

    @property
    def canonical(self) -> Label:
        return canonical_label(self.corners)

    def __str__(self) -> str:
        return f"{self.config} {format_label(self.corners, pretty=True)}"


def label_region(config: ChordConfig, face_list: Sequence[Face], chosen: Dict[int, int],
                 orientation: int = 1) -> Label:
    m = config.m
    face_of = _face_of_edge(face_list)
    sign = _orientations(config, face_list)
    corners = []
    for v in range(1, m + 1):
        before, after = _edge_before(v, m), v
        a0 = chosen[face_of[before]] == before
        ai = chosen[face_of[after]] == after
        corners.append(corner_letter(config.chords_at(v), a0, ai, orientation * sign[face_of[before]]))
    return tuple(corners)


def automorphisms(config: ChordConfig) -> List[Tuple[Dict[int, int], bool]]:
    """Dihedral symmetries (vertex map, reflects) carrying the chord set to itself."""
    m = config.m
    out = []
    for s in range(m):
        for reflect in (False, True):
            move = {v: ((-(v - 1) if reflect else v - 1) + s) % m + 1 for v in range(1, m + 1)}
            image = tuple(sorted(tuple(sorted((move[p], move[q]))) for p, q in config.chords))
            if image == config.chords:
                out.append((move, reflect))
    return out


def _moved(corners: Label, move: Dict[int, int], reflect: bool) -> Label:
    # a reflection reverses the reading direction, so every corner is inverted
    out = [None] * len(corners)
    for v, c in enumerate(corners, start=1):
        out[move[v] - 1] = c.inverse() if reflect else c
    return tuple(out)


def enumerate_labelings(config: ChordConfig) -> List[LabeledRegion]:
    """
    One LabeledRegion per labelled region up to the symmetries of the shape.

    Both orientations of the faces are tried for every designation; two
    labellings are the same when a rotation or reflection of the chord
    configuration carries one corner assignment onto the other.
    """
    face_list = faces(config)
    symmetries = automorphisms(config)
    seen = set()
    found: List[LabeledRegion] = []
    for chosen in _designations(config, face_list):
        for orientation in (1, -1):
            corners = label_region(config, face_list, chosen, orientation)
            if corners in seen:
                continue
            seen.update(_moved(corners, move, reflect) for move, reflect in symmetries)
            found.append(LabeledRegion(config, corners, tuple(sorted(chosen.items())), orientation))
    logger.debug(f"[Regions] {config}: {len(found)} labellings")
    return found


def global_class(label: Sequence[CornerLetter]) -> Label:
    """Canonical form under rotation, inversion and the flip a <-> b^-1, lambda <-> mu."""
    return min(canonical_label(label), canonical_label(flip_label(label)), key=label_key)


# ---------------------------------------------------------------- classification


def _crosses(c1: Chord, c2: Chord) -> bool:
    (a, b), (c, d) = c1, c2
    return a < c < b < d or c < a < d < b


def diagonal_sets(m: int) -> Iterable[Tuple[Chord, ...]]:
    """All sets of pairwise non-crossing diagonals of an m-gon."""
    diagonals = [(p, q) for p, q in combinations(range(1, m + 1), 2)
                 if q - p not in (1, m - 1)]

    def extend(start, chosen):
        yield tuple(chosen)
        for i in range(start, len(diagonals)):
            d = diagonals[i]
            if all(not _crosses(d, c) for c in chosen):
                chosen.append(d)
                yield from extend(i + 1, chosen)
                chosen.pop()

    yield from extend(0, [])


@dataclass
class RegionClassification:
    m: int
    nmin: int
    survivors: List[Tuple[ChordConfig, FeasibilityResult]] = field(default_factory=list)
    lec_killed: List[Tuple[ChordConfig, str]] = field(default_factory=list)
    lac_killed: List[Tuple[ChordConfig, str]] = field(default_factory=list)

    def as_dict(self, labelings: bool = False) -> dict:
        out = []
        for config, result in self.survivors:
            row = {"chords": str(config), "lengths": result.length_text(),
                   "n_condition": result.n_condition}
            if labelings:
                labels = enumerate_labelings(config)
                row["labelings"] = [format_label(r.corners) for r in labels]
                row["labeling_count"] = len(labels)
            out.append(row)
        return {"degree": self.m, "survivors": out,
                "lec_killed": len(self.lec_killed), "lac_killed": len(self.lac_killed)}


def classify_regions(m: int, nmin: int = 7, allow_large: bool = False,
                     progress: bool = False) -> RegionClassification:
    """Canonical chord configurations of degree m surviving the length and labelling checks."""
    if m < 3:
        raise ChordConfigError("degree must be at least 3")
    if m > MAX_DEGREE and not allow_large:
        raise ChordConfigError(f"degree {m} > {MAX_DEGREE} needs allow_large")
    configs = sorted({ChordConfig(m, d).canonical() for d in diagonal_sets(m)},
                     key=lambda c: (len(c.chords), c.chords))
    report = RegionClassification(m, nmin)
    for config in tqdm(configs, desc=f"degree {m}", disable=not progress):
        face_list = faces(config)
        lec = lec_check(config, nmin, face_list)
        if not lec.feasible:
            report.lec_killed.append((config, lec.witness))
            continue
        lac = lac_check(config, face_list)
        if not lac.passed:
            report.lac_killed.append((config, f"{lac.rule}: {lac.witness}"))
            continue
        report.survivors.append((config, lec))
    logger.info(f"[Regions] degree {m}: {len(configs)} shapes, {len(report.survivors)} survive "
                f"({len(report.lec_killed)} LEC, {len(report.lac_killed)} LAC)")
    return report


@dataclass
class LabelingCensus:
    per_shape: List[Tuple[ChordConfig, List[LabeledRegion]]]
    total_before: int
    total_after: int
    classes: List[Label]
    flip_classes: List[Label] = field(default_factory=list)

    def counts(self) -> Dict[str, int]:
        return {f"{config.m} {config}": len(labels) for config, labels in self.per_shape}


# Degree-8 shapes kept by the hand classification, and its labelled-region total.
LISTED_DEGREE_8 = (
    "{}", "{(15)}", "{(13),(14),(16)}", "{(13),(14),(47)}", "{(13),(14),(58)}",
    "{(14),(15),(58)}", "{(13),(14),(47),(48),(57)}",
)
LISTED_LABELING_TOTAL = 17


def compare_with_listed(report: RegionClassification,
                        listed: Sequence[str] = LISTED_DEGREE_8) -> Tuple[List[str], List[str]]:
    """(missing, extra) between the survivors of `report` and a list of chord sets."""
    found = {str(config) for config, _ in report.survivors}
    wanted = {str(ChordConfig.parse(report.m, text).canonical()) for text in listed}
    return sorted(wanted - found), sorted(found - wanted)


def labeling_census(nmin: int = 7, degrees: Sequence[int] = (8, 9)) -> LabelingCensus:
    """
    Labelled regions of the degree 8 and 9 survivors. total_after merges
    repeated corner words (rotation and inversion); flip_classes also merges
    a labelling with its image under the global flip.
    """
    per_shape = []
    merged = set()
    flipped = set()
    for m in degrees:
        for config, _ in classify_regions(m, nmin).survivors:
            labels = enumerate_labelings(config)
            per_shape.append((config, labels))
            merged.update(r.canonical for r in labels)
            flipped.update(global_class(r.corners) for r in labels)
    total = sum(len(labels) for _, labels in per_shape)
    classes = sorted(merged, key=label_key)
    logger.info(f"[Regions] {total} labelled regions, {len(classes)} distinct corner words, "
                f"{len(flipped)} up to the flip")
    return LabelingCensus(per_shape, total, len(classes), classes,
                          sorted(flipped, key=label_key))


# ---------------------------------------------------------------- b-segments


@dataclass(frozen=True)
class BSegment:
    start: int  # 1-based vertex of the first corner
    length: int  # corners, not edges
    corners: Label


_BS_NEGATIVE = {X.inverse(), Y.inverse()}
_BS_POSITIVE = {X, Y}


def _alternates(u: CornerLetter, v: CornerLetter) -> bool:
    return u != v and ({u, v} <= _BS_NEGATIVE or {u, v} <= _BS_POSITIVE)


def find_b_segments(corners: Sequence[CornerLetter], degrees: Sequence[int]) -> List[BSegment]:
    """
    Maximal runs of at least two corners alternating x^-1/y^-1 (or x/y) at degree-3 vertices.

    A segment's length counts its corners (boundary vertices), so a run over k
    boundary edges has length k + 1; a segment covering the whole boundary has
    length m.
    """
    m = len(corners)
    if len(degrees) != m:
        raise ChordConfigError("one degree per corner is required")
    link = [degrees[i] == 3 and degrees[(i + 1) % m] == 3 and _alternates(corners[i], corners[(i + 1) % m])
            for i in range(m)]
    if all(link):
        return [BSegment(1, m, tuple(corners))]
    segments = []
    for i in range(m):
        if link[i] and not link[i - 1]:
            j = i
            while link[j % m]:
                j += 1
            length = j - i + 1
            run = tuple(corners[(i + t) % m] for t in range(length))
            segments.append(BSegment(i + 1, length, run))
    return sorted(segments, key=lambda s: s.start)


def b_segment_split(corners: Sequence[CornerLetter], degrees: Sequence[int]) -> Tuple[int, int]:
    """(n1, n2): corners inside b-segments and the rest."""
    n1 = sum(s.length for s in find_b_segments(corners, degrees))
    return n1, len(corners) - n1
