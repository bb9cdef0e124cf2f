"""
Exact curvature arithmetic for K0-regions.

Every quantity is a rational multiple of pi held as a Fraction; nothing here
touches floating point. The helpers mirror the bookkeeping of the
distribution argument: the region curvature formula, the closed form for
8- and 9-gons, surplus and deficit, the b-segment bound and the Euler
identity on spherical complexes.
"""

from __future__ import annotations

import json
import logging
import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, List, Sequence

import networkx as nx

logger = logging.getLogger(__name__)


class CurvatureError(ValueError):
    pass


class ComplexError(ValueError):
    pass


@total_ordering
@dataclass(frozen=True)
class Angle:
    """An exact value q*pi."""

    q: Fraction = Fraction(0)

    def __post_init__(self):
        if not isinstance(self.q, Fraction):
            object.__setattr__(self, "q", Fraction(self.q))

    @classmethod
    def pi(cls, num=1, den=1) -> "Angle":
        return cls(Fraction(num, den))

    @classmethod
    def thirtieths(cls, k) -> "Angle":
        """k * pi/30, the unit used by every table."""
        return cls(Fraction(k) / 30)

    @classmethod
    def parse(cls, text: str) -> "Angle":
        """Read '2/3pi', '-13/30 pi', 'pi', '0' or a bare number of pi/30 units."""
        s = text.replace(" ", "").replace("π", "pi")
        if s.endswith("pi"):
            body = s[:-2]
            if body in ("", "+"):
                return cls(Fraction(1))
            if body == "-":
                return cls(Fraction(-1))
            return cls(Fraction(body))
        return cls.thirtieths(Fraction(s))

    @property
    def in_thirtieths(self) -> Fraction:
        return self.q * 30

    def __add__(self, other: "Angle") -> "Angle":
        return Angle(self.q + other.q)

    def __sub__(self, other: "Angle") -> "Angle":
        return Angle(self.q - other.q)

    def __neg__(self) -> "Angle":
        return Angle(-self.q)

    def __mul__(self, k) -> "Angle":
        return Angle(self.q * Fraction(k))

    __rmul__ = __mul__

    def __lt__(self, other: "Angle") -> bool:
        return self.q < other.q

    def __bool__(self) -> bool:
        return self.q != 0

    def __str__(self) -> str:
        q = self.q
        if q == 0:
            return "0"
        if q == 1:
            return "pi"
        if q == -1:
            return "-pi"
        return f"{q} pi"


ZERO = Angle()
TWO_PI = Angle.pi(2)
FOUR_PI = Angle.pi(4)


def _check_degrees(degrees: Sequence[int], raw: bool) -> List[int]:
    degrees = list(degrees)
    if not degrees:
        raise CurvatureError("curvature needs at least one vertex degree")
    for d in degrees:
        if not isinstance(d, int) or d < 1:
            raise CurvatureError(f"vertex degree must be a positive integer, got {d!r}")
        if d < 3 and not raw:
            raise CurvatureError(f"vertex degree {d} < 3 (use raw mode to allow it)")
    return degrees


def curvature(degrees: Sequence[int], raw: bool = False) -> Angle:
    """(2 - m)pi + 2pi * sum(1/d_i) for an m-gon with vertex degrees d_i."""
    degrees = _check_degrees(degrees, raw)
    m = len(degrees)
    total = Fraction(2 - m) + 2 * sum(Fraction(1, d) for d in degrees)
    return Angle(total)


def curvature_closed_form(k: int, m2: int, m3: int) -> Angle:
    """
    Curvature of an (8+k)-gon with m2 vertices of degree 4, m3 of degree 5
    and the rest of degree 3: -(20 + 10k + 5m2 + 8m3)pi/30.
    """
    if k < 0 or m2 < 0 or m3 < 0:
        raise CurvatureError("k, m2 and m3 must be nonnegative")
    if m2 + m3 > 8 + k:
        raise CurvatureError(f"m2 + m3 = {m2 + m3} exceeds the {8 + k} vertices")
    return Angle.thirtieths(-(20 + 10 * k + 5 * m2 + 8 * m3))


def surplus(c: Angle) -> Angle:
    """Edge surplus s = c - 2pi/15."""
    return c - Angle.pi(2, 15)


def vertex_deficit(d: int) -> Angle:
    """Vertex deficit 2pi(1/d - 1/3)."""
    if d < 3:
        raise CurvatureError(f"vertex degree {d} < 3")
    return Angle(2 * (Fraction(1, d) - Fraction(1, 3)))


def degree_bound(k: int) -> Angle:
    """(2 - k)pi + k*2pi/3 + k*2pi/15 for a region of degree k."""
    if k < 1:
        raise CurvatureError("k must be positive")
    return Angle(Fraction(2 - k) + k * Fraction(2, 3) + k * Fraction(2, 15))


def dagger_bound(n2: int, reduction: Angle = ZERO) -> Angle:
    """
    pi(2 - n2/5) for a region whose b-segments contribute n1 edges and the
    rest n2 edges; `reduction` is the saving earned by b-regions.
    """
    if n2 < 0:
        raise CurvatureError("n2 must be nonnegative")
    return Angle(2 - Fraction(n2, 5)) - reduction


def delta0_bound(k: int) -> Angle:
    """(2 - k)pi + k(2pi/3) + k(pi/3), the bound on c*(Delta0)."""
    if k < 1:
        raise CurvatureError("k must be positive")
    return Angle(Fraction(2 - k) + k * Fraction(2, 3) + k * Fraction(1, 3))


def threshold(bound, start: int, stop: int):
    """Smallest argument in [start, stop] from which `bound` stays <= 0, or None."""
    first = None
    for k in range(stop, start - 1, -1):
        if bound(k) <= ZERO:
            first = k
        else:
            break
    return first


@dataclass
class SphericalComplex:
    """A 2-complex given by faces listing vertex ids and the degree of each vertex."""

    faces: List[List[int]]
    degrees: List[int]

    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(len(self.degrees)))
        for face in self.faces:
            for i, v in enumerate(face):
                g.add_edge(v, face[(i + 1) % len(face)])
        return g

    def euler_characteristic(self) -> int:
        g = self.graph()
        return g.number_of_nodes() - g.number_of_edges() + len(self.faces)

    def validate(self):
        corners = Counter(v for face in self.faces for v in face)
        for v, d in enumerate(self.degrees):
            if corners[v] != d:
                raise ComplexError(f"vertex {v} has degree {d} but {corners[v]} face corners")
        unknown = set(corners) - set(range(len(self.degrees)))
        if unknown:
            raise ComplexError(f"faces reference undeclared vertices {sorted(unknown)}")
        g = self.graph()
        edge_sides = Counter()
        for face in self.faces:
            for i, v in enumerate(face):
                edge_sides[frozenset((v, face[(i + 1) % len(face)]))] += 1
        bad = [tuple(sorted(e)) for e, n in edge_sides.items() if n != 2]
        if bad:
            raise ComplexError(f"edges not on exactly two faces: {bad[:5]}")
        if not nx.is_connected(g):
            raise ComplexError("complex is not connected")
        chi = self.euler_characteristic()
        if chi != 2:
            raise ComplexError(f"Euler characteristic is {chi}, not 2")


def total_curvature(complex_: SphericalComplex) -> Angle:
    """Sum of face curvatures; 4pi on every valid spherical complex."""
    complex_.validate()
    total = ZERO
    for face in complex_.faces:
        total = total + curvature([complex_.degrees[v] for v in face])
    return total


def load_complex(path: str) -> SphericalComplex:
    with open(path, "r") as f:
        data = json.load(f)
    try:
        return SphericalComplex(faces=[list(face) for face in data["faces"]],
                                degrees=list(data["degrees"]))
    except KeyError as e:
        raise ComplexError(f"complex file {path} is missing {e}")


def _from_faces(faces: Iterable[Sequence[int]]) -> SphericalComplex:
    faces = [list(face) for face in faces]
    corners = Counter(v for face in faces for v in face)
    n = max(corners) + 1
    return SphericalComplex(faces=faces, degrees=[corners[v] for v in range(n)])


def platonic_complexes() -> dict:
    tetrahedron = [[0, 1, 2], [0, 3, 1], [1, 3, 2], [2, 3, 0]]
    cube = [[0, 1, 2, 3], [4, 7, 6, 5], [0, 4, 5, 1], [1, 5, 6, 2],
            [2, 6, 7, 3], [3, 7, 4, 0]]
    octahedron = [[0, 2, 4], [2, 1, 4], [1, 3, 4], [3, 0, 4],
                  [2, 0, 5], [1, 2, 5], [3, 1, 5], [0, 3, 5]]
    icosahedron = [[0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 5], [0, 5, 1],
                   [1, 6, 2], [2, 7, 3], [3, 8, 4], [4, 9, 5], [5, 10, 1],
                   [2, 6, 7], [3, 7, 8], [4, 8, 9], [5, 9, 10], [1, 10, 6],
                   [11, 7, 6], [11, 8, 7], [11, 9, 8], [11, 10, 9], [11, 6, 10]]
    dodecahedron = [[0, 1, 2, 3, 4],
                    [0, 5, 6, 7, 1], [1, 7, 8, 9, 2], [2, 9, 10, 11, 3],
                    [3, 11, 12, 13, 4], [4, 13, 14, 5, 0],
                    [5, 14, 15, 16, 6], [7, 6, 16, 17, 8], [9, 8, 17, 18, 10],
                    [11, 10, 18, 19, 12], [13, 12, 19, 15, 14],
                    [15, 19, 18, 17, 16]]
    return {name: _from_faces(faces) for name, faces in [
        ("tetrahedron", tetrahedron), ("cube", cube), ("octahedron", octahedron),
        ("icosahedron", icosahedron), ("dodecahedron", dodecahedron)]}


def random_spherical_complex(rng: random.Random, steps: int = 20) -> SphericalComplex:
    """
    Start from a platonic solid and apply random stellar subdivisions and
    diagonal splits of faces; both keep chi = 2 and all degrees >= 3.
    """
    solids = platonic_complexes()
    faces = [list(face) for face in solids[rng.choice(sorted(solids))].faces]
    n = max(v for face in faces for v in face) + 1
    for _ in range(steps):
        i = rng.randrange(len(faces))
        face = faces[i]
        if len(face) >= 4 and rng.random() < 0.5:
            j = rng.randrange(len(face))
            k = (j + len(face) // 2) % len(face)
            lo, hi = sorted((j, k))
            faces[i:i + 1] = [face[lo:hi + 1], face[hi:] + face[:lo + 1]]
        else:
            centre = n
            n += 1
            faces[i:i + 1] = [[face[t], face[(t + 1) % len(face)], centre]
                              for t in range(len(face))]
    complex_ = _from_faces(faces)
    logger.debug(f"[Euler] random complex with {len(complex_.faces)} faces, "
                 f"{len(complex_.degrees)} vertices")
    return complex_
