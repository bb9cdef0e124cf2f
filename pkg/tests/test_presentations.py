import copy
import json
import random

import pytest

from presentations import (
    FAMILIES, Presentation, PresentationError, TietzeScriptError, TietzeStep, Word,
    WordError, build_extension, build_fibonacci, build_relative_pn, format_presentation,
    format_word, free_reduce, is_power_of_relator, load_tietze_script, parse_presentation,
    parse_word, same_presentation, tietze_script_for, verify_tietze_script,
)


def test_free_reduce_cancels_adjacent_inverses():
    assert free_reduce([("x", 1), ("y", 1), ("y", -1), ("x", -1), ("z", 1)]) == (("z", 1),)


def test_free_reduce_properties_on_random_words():
    rng = random.Random(11)
    for _ in range(200):
        letters = [(rng.choice("xyz"), rng.choice((1, -1))) for _ in range(rng.randint(0, 50))]
        reduced = free_reduce(letters)
        assert free_reduce(reduced) == reduced
        assert all(a[0] != b[0] or a[1] != -b[1] for a, b in zip(reduced, reduced[1:]))
        w = Word(tuple(letters))
        assert (w * w.inverse()).letters == ()


def test_word_arithmetic():
    x, y = Word.gen("x"), Word.gen("y")
    w = x * y * x.inverse()
    assert len(w) == 3
    assert (w * w.inverse()).letters == ()
    assert (x * y) ** -1 == y.inverse() * x.inverse()
    assert w.exponent_sum("x") == 0
    assert w.occurrences("x") == 2
    assert w.cyclically_reduced() == y


@pytest.mark.parametrize("text,expected", [
    ("x1 x2 x3^-1", "x1 x2 x3^-1"),
    ("y^12", "y^12"),
    ("x x^-1", "1"),
    ("1", "1"),
    ("(x t^-1)^2 x^-1 t^2", "x t^-1 x t^-1 x^-1 t^2"),
    ("t t t^-1 u", "t u"),
])
def test_parse_and_format_word(text, expected):
    assert format_word(parse_word(text)) == expected


@pytest.mark.parametrize("text", ["x (y", "x )", "x ^", "x^", "(x y)^", "x ^ 2", "x + y"])
def test_parse_word_rejects_bad_text(text):
    with pytest.raises(WordError):
        parse_word(text)


def test_cyclic_class_ignores_rotation_and_inversion():
    w = parse_word("x y^2")
    assert parse_word("y x y").cyclic_class() == w.cyclic_class()
    assert parse_word("y^-2 x^-1").cyclic_class() == w.cyclic_class()
    assert parse_word("x^2 y").cyclic_class() != w.cyclic_class()


def test_build_fibonacci_f23():
    p = build_fibonacci(2, 3)
    assert p.generators == ("x1", "x2", "x3")
    assert [format_word(r) for r in p.relators] == [
        "x1 x2 x3^-1", "x2 x3 x1^-1", "x3 x1 x2^-1"]


def test_build_fibonacci_f22():
    p = build_fibonacci(2, 2)
    assert [format_word(r) for r in p.relators] == ["x1 x2 x1^-1", "x2 x1 x2^-1"]


def test_build_fibonacci_f75_first_relator():
    p = build_fibonacci(7, 5)
    assert len(p.relators) == 5
    assert all(len(r) == 8 for r in p.relators)
    assert format_word(p.relators[0]) == "x1 x2 x3 x4 x5 x1 x2 x3^-1"


def test_relators_are_subscript_shifts():
    p = build_fibonacci(3, 6)
    first = p.relators[0]
    for i, r in enumerate(p.relators):
        shifted = first.substitute({f"x{j}": Word.gen(f"x{(j - 1 + i) % 6 + 1}") for j in range(1, 7)})
        assert shifted == r


@pytest.mark.parametrize("r,n", [(1, 5), (2, 1), (0, 0)])
def test_build_fibonacci_rejects_small_parameters(r, n):
    with pytest.raises(PresentationError):
        build_fibonacci(r, n)


def test_relative_pn():
    pn = build_relative_pn(7)
    (mixed,) = pn.mixed_relators
    assert len(mixed) == 11
    assert format_word(mixed) == "t^2 u t u^-7"
    assert len(build_relative_pn(8).mixed_relators[0]) == 12
    assert pn.as_presentation().generators == ("t", "u")


def test_relative_pn_below_seven_warns(caplog):
    with caplog.at_level("WARNING"):
        build_relative_pn(5)
    assert "[Present]" in caplog.text


def test_build_extension_base_cases():
    seven = build_extension(0, "seven")
    assert seven.generators == ("x", "t")
    assert seven.relators[0] == Word.gen("t", 5)
    assert seven.relators[1] == parse_word("(x t^-1)^7 x^-1 t^2")
    eight = build_extension(0, "eight")
    assert eight.relators[1] == parse_word("(x t^-1)^8 x^-1 t^3")
    assert len(build_extension(1, "seven").relators[1]) == 27


def test_build_extension_rejects_unknown_family():
    with pytest.raises(PresentationError):
        build_extension(0, "nine")
    with pytest.raises(PresentationError):
        build_extension(-1, "seven")


def test_presentation_text_roundtrip():
    p = parse_presentation("# F(2,3)\ngens: x1 x2 x3\nx1 x2 x3^-1\nx2 x3 x1^-1\n\nx3 x1 x2^-1\n")
    assert same_presentation(p, build_fibonacci(2, 3))
    assert parse_presentation(format_presentation(p)) == p


def test_presentation_errors():
    with pytest.raises(PresentationError):
        parse_presentation("x y\n")
    with pytest.raises(PresentationError):
        parse_presentation("gens: x\nx y\n")
    with pytest.raises(PresentationError):
        Presentation(("x", "x"), ())


def test_same_presentation_with_renaming():
    p = Presentation(("a", "b"), (parse_word("a b a^-1 b^-1"),))
    q = Presentation(("x", "y"), (parse_word("y x y^-1 x^-1"),))
    assert not same_presentation(p, q)
    assert same_presentation(p, q, {"a": "x", "b": "y"})


def test_is_power_of_relator():
    t5 = Word.gen("t", 5)
    assert is_power_of_relator(Word.gen("t", 10), t5)
    assert is_power_of_relator(Word.gen("t", -5), t5)
    assert is_power_of_relator(Word(), t5)
    assert not is_power_of_relator(Word.gen("t", 3), t5)


@pytest.mark.parametrize("family", sorted(FAMILIES))
@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_shipped_scripts_validate(family, k):
    script = tietze_script_for(family, k)
    N = FAMILIES[family][0] + 5 * k
    assert same_presentation(script.start, build_extension(k, family))
    assert same_presentation(script.target, build_relative_pn(N).as_presentation())
    verdict = verify_tietze_script(script.start, script, script.target)
    assert verdict.valid, str(verdict)
    assert len(verdict.trace) == len(script.steps) + 1
    assert str(verdict) == f"Valid ({len(script.steps)} steps)"


@pytest.mark.parametrize("family", sorted(FAMILIES))
def test_replaying_a_script_is_deterministic(family):
    script = tietze_script_for(family, 1)
    first = verify_tietze_script(script.start, script, script.target)
    second = verify_tietze_script(script.start, script, script.target)
    assert str(first) == str(second)
    assert [format_presentation(p) for p in first.trace] == [format_presentation(p) for p in second.trace]


def test_wrong_justification_is_caught_at_its_step():
    script = tietze_script_for("seven", 0)
    broken = copy.deepcopy(script)
    assert broken.steps[3].kind == "substitute"
    broken.steps[3].args["justification"] = 1
    verdict = verify_tietze_script(broken.start, broken, broken.target)
    assert not verdict.valid
    assert verdict.step == 3
    assert str(verdict).startswith("InvalidAtStep(3, ")


def test_unknown_step_kind_is_invalid():
    script = tietze_script_for("eight", 0)
    broken = copy.deepcopy(script)
    broken.steps.insert(1, TietzeStep("teleport", {}))
    verdict = verify_tietze_script(broken.start, broken, broken.target)
    assert verdict.step == 1
    assert "teleport" in verdict.reason


def test_wrong_target_is_rejected_after_the_last_step():
    script = tietze_script_for("seven", 0)
    wrong = build_relative_pn(12).as_presentation()
    verdict = verify_tietze_script(script.start, script, wrong)
    assert not verdict.valid
    assert verdict.step == len(script.steps)


def test_load_script_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(TietzeScriptError):
        load_tietze_script(str(bad))
    template = tmp_path / "template.json"
    template.write_text(json.dumps({
        "start": {"gens": ["x"], "relators": ["x^{N}"]},
        "target": {"gens": ["x"], "relators": ["x^{N}"]},
        "steps": []}))
    with pytest.raises(TietzeScriptError):
        load_tietze_script(str(template))
    script = load_tietze_script(str(template), N=4)
    assert script.start.relators[0] == Word.gen("x", 4)
    with pytest.raises(TietzeScriptError):
        tietze_script_for("nine", 0)
