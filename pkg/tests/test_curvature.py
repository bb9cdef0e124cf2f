import os
import random
from fractions import Fraction

import pytest

from curvature import (
    FOUR_PI, TWO_PI, ZERO, Angle, ComplexError, CurvatureError, SphericalComplex,
    curvature, curvature_closed_form, dagger_bound, delta0_bound, degree_bound,
    load_complex, platonic_complexes, random_spherical_complex, surplus, threshold,
    total_curvature, vertex_deficit,
)

COMPLEX_DIR = os.path.join(os.path.dirname(os.path.dirname(__file__)), "complexes")


@pytest.mark.parametrize("degrees,expected", [
    ((3, 3, 3, 3), "2/3 pi"),
    ((3, 4, 4, 7), "-1/21 pi"),
    ((3, 3, 3, 3, 4, 5), "-13/30 pi"),
    ((6, 6, 6), "0"),
    ((3, 3, 3), "pi"),
])
def test_region_curvature(degrees, expected):
    assert str(curvature(degrees)) == expected


def test_curvature_rejects_low_degrees():
    with pytest.raises(CurvatureError):
        curvature([])
    with pytest.raises(CurvatureError):
        curvature([2, 3, 3])
    with pytest.raises(CurvatureError):
        curvature([3, 0, 3], raw=True)
    assert curvature([2, 2], raw=True) == Angle.pi(2)


@pytest.mark.parametrize("k,m2,m3,thirtieths", [
    (0, 0, 0, -20), (0, 1, 0, -25), (1, 0, 1, -38), (0, 8, 0, -60),
])
def test_closed_form_values(k, m2, m3, thirtieths):
    assert curvature_closed_form(k, m2, m3) == Angle.thirtieths(thirtieths)


def test_closed_form_matches_direct_formula():
    for m in range(8, 15):
        for m2 in range(m + 1):
            for m3 in range(m - m2 + 1):
                degrees = [3] * (m - m2 - m3) + [4] * m2 + [5] * m3
                assert curvature(degrees) == curvature_closed_form(m - 8, m2, m3)


def test_closed_form_argument_errors():
    with pytest.raises(CurvatureError):
        curvature_closed_form(-1, 0, 0)
    with pytest.raises(CurvatureError):
        curvature_closed_form(0, 5, 4)


def test_surplus_and_deficit():
    assert surplus(Angle.pi(1, 5)) == Angle.pi(1, 15)
    assert surplus(Angle.pi(2, 15)) == ZERO
    assert vertex_deficit(3) == ZERO
    assert vertex_deficit(4) == Angle.pi(-1, 6)
    assert vertex_deficit(6) == Angle.pi(-1, 3)
    with pytest.raises(CurvatureError):
        vertex_deficit(2)


@pytest.mark.parametrize("n2,expected", [(10, ZERO), (9, Angle.pi(1, 5)), (0, TWO_PI)])
def test_dagger_bound(n2, expected):
    assert dagger_bound(n2) == expected


def test_dagger_thresholds_with_reductions():
    assert threshold(dagger_bound, 0, 40) == 10
    assert threshold(lambda n2: dagger_bound(n2, Angle.pi(3, 15)), 0, 40) == 9
    assert threshold(lambda n2: dagger_bound(n2, Angle.pi(6, 15)), 0, 40) == 8


def test_degree_bound_threshold():
    assert degree_bound(10) == ZERO
    assert degree_bound(9) > ZERO
    assert threshold(degree_bound, 1, 30) == 10


def test_delta0_bound_is_two_pi():
    for k in range(1, 25):
        assert delta0_bound(k) == TWO_PI


def test_threshold_none_when_bound_stays_positive():
    assert threshold(lambda k: Angle.pi(1), 1, 10) is None


@pytest.mark.parametrize("name", ["tetrahedron", "cube", "octahedron", "icosahedron", "dodecahedron"])
def test_platonic_total_curvature(name):
    assert total_curvature(platonic_complexes()[name]) == FOUR_PI


def test_random_complexes_total_four_pi():
    rng = random.Random(20240607)
    for _ in range(100):
        complex_ = random_spherical_complex(rng, steps=rng.randint(0, 30))
        assert complex_.euler_characteristic() == 2
        assert total_curvature(complex_) == FOUR_PI


@pytest.mark.parametrize("filename", [
    "cube.json", "tetrahedron.json", "pentagonal_prism.json", "stellated_cube.json",
])
def test_shipped_complexes(filename):
    assert total_curvature(load_complex(os.path.join(COMPLEX_DIR, filename))) == FOUR_PI


def test_torus_is_rejected():
    complex_ = load_complex(os.path.join(COMPLEX_DIR, "torus_3x3.json"))
    assert complex_.euler_characteristic() == 0
    with pytest.raises(ComplexError, match="Euler characteristic"):
        total_curvature(complex_)


def test_validate_catches_bad_complexes():
    tetra = platonic_complexes()["tetrahedron"].faces
    with pytest.raises(ComplexError):
        SphericalComplex(faces=tetra, degrees=[3, 3, 3, 4]).validate()
    with pytest.raises(ComplexError):
        SphericalComplex(faces=tetra[:3], degrees=[3, 2, 2, 2]).validate()


def test_load_complex_missing_key(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"faces": [[0, 1, 2]]}')
    with pytest.raises(ComplexError):
        load_complex(str(path))


def test_angle_parsing_and_printing():
    assert Angle.parse("2/3pi") == Angle.pi(2, 3)
    assert Angle.parse("-13/30 pi") == Angle.pi(-13, 30)
    assert Angle.parse("pi") == Angle.pi(1)
    assert Angle.parse("-pi") == Angle.pi(-1)
    assert Angle.parse("2/3π") == Angle.pi(2, 3)
    assert Angle.parse("12") == Angle.pi(2, 5)
    assert Angle.parse("0") == ZERO
    assert str(ZERO) == "0"
    assert str(Angle.pi(-1)) == "-pi"
    assert Angle.pi(1, 5).in_thirtieths == 6


def test_angle_arithmetic():
    third = Angle(Fraction(1, 3))
    assert third * 3 == Angle.pi(1)
    assert 3 * third == Angle.pi(1)
    assert third + third - third == third
    assert -third < ZERO < third
    assert not ZERO and third
    assert sorted([Angle.pi(1), ZERO, Angle.pi(-1, 2)]) == [Angle.pi(-1, 2), ZERO, Angle.pi(1)]
