import random

import numpy as np
import pytest
import sympy

from oracle import (
    CLASSIFICATION_CASES, UNDEFINED, Finite, Overflow, _Enumerator, abelian_order, abelianization,
    audit_coset_table, coset_enumerate, expected_order, invariant_factors,
    relation_matrix, smith_normal_form, verify_fibonacci_orders,
)
from presentations import Presentation, build_fibonacci, parse_presentation

# Cases that close quickly under either strategy.
QUICK_CASES = [(2, 2), (2, 3), (2, 4), (2, 5), (3, 2), (3, 3), (4, 2), (4, 4), (5, 5), (6, 3)]


@pytest.mark.parametrize("r,n,order", [
    (2, 2, 1), (2, 3, 8), (2, 4, 5), (2, 5, 11), (3, 2, 8), (3, 3, 2), (4, 4, 3),
])
@pytest.mark.parametrize("strategy", ["hlt", "felsch"])
def test_small_fibonacci_orders(r, n, order, strategy):
    result = coset_enumerate(build_fibonacci(r, n), strategy=strategy)
    assert isinstance(result, Finite)
    assert result.order == order
    assert result.cosets_defined >= order


def test_closed_table_passes_audit():
    p = build_fibonacci(2, 5)
    result = coset_enumerate(p)
    assert audit_coset_table(result.table, p)
    # x1 x2 = x3 in F(2,5)
    for c in range(result.order):
        t = result.table
        assert t.act(t.act(c, "x1"), "x2") == t.act(c, "x3")


def test_audit_rejects_a_broken_table():
    p = build_fibonacci(2, 3)
    table = coset_enumerate(p).table
    table.rows[0][0], table.rows[1][0] = table.rows[1][0], table.rows[0][0]
    assert not audit_coset_table(table, p)


def test_cyclic_group_of_order_five():
    p = parse_presentation("gens: t\nt^5\n")
    result = coset_enumerate(p)
    assert result.order == 5
    c = 0
    for _ in range(4):
        c = result.table.act(c, "t")
        assert c != 0
    assert result.table.act(c, "t") == 0


def test_empty_presentation_is_trivial():
    assert coset_enumerate(Presentation((), ())).order == 1


def test_infinite_group_overflows():
    # F(2,6) is infinite
    result = coset_enumerate(build_fibonacci(2, 6), max_cosets=500)
    assert isinstance(result, Overflow)
    assert result.cosets_defined >= 500


def test_budget_too_small_overflows():
    assert isinstance(coset_enumerate(build_fibonacci(2, 5), max_cosets=3), Overflow)


def test_budget_counts_live_cosets():
    state = _Enumerator(build_fibonacci(2, 5), 3, "hlt")
    state.define(0, 0)
    state.define(0, 2)
    state.coincidence(1, 2)
    assert (state.live, state.defined, len(state.table)) == (2, 3, 3)
    # a dead row does not use up the budget
    state.define(1, 4)
    assert (state.live, state.defined) == (3, 4)


def test_compact_rows_drops_dead_rows():
    state = _Enumerator(build_fibonacci(2, 5), 100, "hlt")
    state.define(0, 0)
    state.define(0, 2)
    state.coincidence(1, 2)
    assert state.compact_rows(2) == 2
    assert len(state.table) == 2
    assert state.parent == [0, 1]
    assert state.table[0][:4] == [1, UNDEFINED, 1, UNDEFINED]
    assert state.table[1][:4] == [UNDEFINED, 0, UNDEFINED, 0]


def test_hlt_closes_when_dead_rows_exceed_the_budget():
    # HLT defines 165 cosets for F(2,5) but never holds more than 92 live
    result = coset_enumerate(build_fibonacci(2, 5), max_cosets=100)
    assert isinstance(result, Finite)
    assert result.order == 11
    assert result.cosets_defined > 100


@pytest.mark.slow
def test_default_hlt_closes_f_2_7():
    result = coset_enumerate(build_fibonacci(2, 7))
    assert isinstance(result, Finite)
    assert result.order == 29
    assert result.cosets_defined > 29


def test_enumeration_argument_errors():
    p = build_fibonacci(2, 3)
    with pytest.raises(ValueError):
        coset_enumerate(p, strategy="random")
    with pytest.raises(ValueError):
        coset_enumerate(p, max_cosets=0)


def test_relation_matrix_is_exact():
    m = relation_matrix(build_fibonacci(2, 3))
    assert m.dtype == object
    assert m.tolist() == [[1, 1, -1], [-1, 1, 1], [1, -1, 1]]


@pytest.mark.parametrize("r,n,factors", [
    (2, 2, ()), (2, 3, (2, 2)), (2, 4, (5,)), (2, 5, (11,)), (4, 4, (3,)),
])
def test_abelianization(r, n, factors):
    assert abelianization(build_fibonacci(r, n)) == factors


def test_free_factors_are_zeros():
    assert invariant_factors([[2, 0, 0]], ncols=3) == (2, 0, 0)
    assert abelian_order((2, 0)) is None
    assert abelian_order((2, 2)) == 4
    assert abelian_order(()) == 1


def test_smith_normal_form_of_known_matrix():
    assert smith_normal_form([[2, 4, 4], [-6, 6, 12], [10, -4, -16]]) == [2, 6, 12]


def test_smith_normal_form_rejects_vectors():
    with pytest.raises(ValueError):
        smith_normal_form([1, 2, 3])


def test_smith_normal_form_against_sympy():
    rng = random.Random(20240607)
    checked = 0
    for _ in range(60):
        size = rng.randint(2, 5)
        rows = [[rng.randint(-9, 9) for _ in range(size)] for _ in range(size)]
        M = sympy.Matrix(rows)
        diagonal = smith_normal_form(np.array(rows, dtype=object))
        assert len(diagonal) == M.rank()
        for a, b in zip(diagonal, diagonal[1:]):
            assert b % a == 0
        det = M.det()
        if det != 0:
            product = 1
            for d in diagonal:
                product *= d
            assert product == abs(det)
            checked += 1
    assert checked > 30


def _unimodular(rng, size):
    U = np.identity(size, dtype=int).astype(object)
    for _ in range(3 * size):
        i, j = rng.sample(range(size), 2)
        move = rng.choice(("add", "swap", "negate"))
        if move == "add":
            U[i, :] = U[i, :] + rng.randint(-3, 3) * U[j, :]
        elif move == "swap":
            U[[i, j]] = U[[j, i]]
        else:
            U[i, :] = -U[i, :]
    return U


def test_invariant_factors_survive_unimodular_changes():
    rng = random.Random(7)
    for _ in range(40):
        rows, cols = rng.randint(2, 5), rng.randint(2, 5)
        M = np.array([[rng.randint(-6, 6) for _ in range(cols)] for _ in range(rows)], dtype=object)
        changed = _unimodular(rng, rows).dot(M).dot(_unimodular(rng, cols))
        assert smith_normal_form(changed) == smith_normal_form(M)


@pytest.mark.parametrize("r,n,order", [
    (2, 7, 29), (3, 6, 1512), (5, 4, 624), (6, 4, 125), (4, 2, 3), (6, 3, 5),
    (5, 5, 4), (4, 3, 63), (5, 2, 24),
])
def test_expected_order_formulas(r, n, order):
    assert expected_order(r, n)[0] == order


def test_expected_order_marks_infinite_cases():
    assert expected_order(7, 5) == (None, "infinite")
    assert expected_order(2, 6)[0] is None


def test_cases_start_with_the_classification_list():
    assert CLASSIFICATION_CASES[:12] == [
        (2, 2), (2, 3), (2, 4), (2, 5), (2, 7), (3, 2), (3, 3), (3, 5), (3, 6),
        (4, 4), (5, 4), (6, 4)]


def test_quick_cases_pass():
    reports = verify_fibonacci_orders(QUICK_CASES)
    assert [rep.status for rep in reports] == ["pass"] * len(QUICK_CASES)
    for rep in reports:
        ab = abelian_order(rep.abelianization)
        assert ab is not None and rep.got % ab == 0
    row = reports[1].as_dict()
    assert row["r"] == 2 and row["n"] == 3 and row["got"] == 8
    assert row["abelianization"] == [2, 2]


def test_overflow_is_reported_not_raised():
    (rep,) = verify_fibonacci_orders([(3, 6)], max_cosets=50)
    assert rep.status == "overflow"
    assert rep.got is None


@pytest.mark.slow
@pytest.mark.parametrize("strategy", ["hlt", "felsch"])
def test_full_classification_suite(strategy):
    reports = verify_fibonacci_orders(strategy=strategy)
    failures = [(rep.r, rep.n, rep.status, rep.got) for rep in reports if rep.status != "pass"]
    assert failures == []
