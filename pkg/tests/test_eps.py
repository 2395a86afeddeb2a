import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from braidkit.errors import DomainError
from braidkit.eps import (
    bisect_transition,
    classify_transition,
    ep_list,
    gap_zeros_real_k,
    is_defective,
    line_model,
    table2_generate,
    table_to_csv,
)
from braidkit.model import ModelSpec

PI = np.pi


def test_gap_zeros_examples():
    np.testing.assert_allclose(gap_zeros_real_k(line_model(2, "RS")), [-PI / 2, PI / 2], atol=1e-12)
    np.testing.assert_allclose(gap_zeros_real_k(line_model(2, "AB")), [0.0], atol=1e-12)
    np.testing.assert_allclose(gap_zeros_real_k(line_model(5, "PQ")),
                               [-4 * PI / 5, -2 * PI / 5, 0, 2 * PI / 5, 4 * PI / 5], atol=1e-12)


def test_off_boundary_is_empty():
    assert gap_zeros_real_k(ModelSpec.h1(1.0, 0.5, 0.5, 3, 1)).size == 0


def test_table_rows():
    rows = {(m, line): ks for m, line, _, ks in table2_generate([3, 4, 6])}
    np.testing.assert_allclose(rows[(4, "PQ")], [-PI / 2, 0, PI / 2, PI], atol=1e-12)
    np.testing.assert_allclose(rows[(6, "RS")], [-5 * PI / 6, -PI / 2, -PI / 6, PI / 6, PI / 2, 5 * PI / 6],
                               atol=1e-12)
    np.testing.assert_allclose(rows[(3, "EF")], [PI], atol=1e-12)


def test_odd_order_type2_locations():
    # k = (2j + 1) pi / m for the line c_ab_neg_m = +c_ab0
    np.testing.assert_allclose(ep_list(5, "RS").k, [-3 * PI / 5, -PI / 5, PI / 5, 3 * PI / 5, PI], atol=1e-12)


@pytest.mark.parametrize("m", range(2, 13))
def test_ep_counts(m):
    assert ep_list(m, "AB").count == 1
    assert ep_list(m, "EF").count == 1
    assert ep_list(m, "PQ").count == m
    assert ep_list(m, "RS").count == m


def test_ep_points_are_defective():
    for k in ep_list(4, "PQ").k:
        assert is_defective(line_model(4, "PQ"), k)
    assert not is_defective(line_model(4, "PQ"), 0.3)


def test_classify_type1():
    t = classify_transition(ModelSpec.h1(1.0, 0.5, 0.5, 2, 1), "c_ba_n", 1.0)
    assert t.transition_type == "Type1"
    assert (t.xi_before, t.xi_after) == (0, 1)
    np.testing.assert_allclose(t.eps.k, [PI])
    assert t.consistent


def test_classify_type2():
    t = classify_transition(ModelSpec.h1(1.0, 0.5, 0.5, 2, 1), "c_ab_neg_m", -1.0)
    assert t.transition_type == "Type2"
    assert {t.xi_before, t.xi_after} == {0, -2}
    np.testing.assert_allclose(t.eps.k, [0, PI], atol=1e-12)
    assert t.consistent


def test_classify_errors():
    template = ModelSpec.h1(1.0, 0.5, 0.5, 2, 1)
    with pytest.raises(ValueError):
        classify_transition(template, "c_ba_n", 1.0, eps=0.0)
    with pytest.raises(DomainError, match="not a transition"):
        classify_transition(template, "c_ba_n", 0.3)


def test_bisection_finds_boundary():
    template = ModelSpec.h2(1.0, 0.5, 0.5, 3, 1, c_i=0.8)
    v = bisect_transition(template, "c_ba_n", 0.2, 3.0)
    t = classify_transition(template, "c_ba_n", v, 1e-6)
    assert t.xi_before != t.xi_after


def test_line_model_validation():
    with pytest.raises(ValueError):
        line_model(3, "XY")
    with pytest.raises(ValueError):
        line_model(3, "AB", other=1.0)
    with pytest.raises(ValueError):
        table2_generate([13])


def test_table_csv():
    lines = table_to_csv(table2_generate([2])).splitlines()
    assert lines[0] == "m,boundary,type,count,k_values"
    assert lines[1] == "2,AB,Type1,1,0.0"
    assert lines[4].startswith("2,RS,Type2,2,")


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 8), st.sampled_from(["AB", "EF", "PQ", "RS"]),
       st.floats(-0.9, 0.9).filter(lambda v: abs(v) > 0.05))
def test_ep_sets_symmetric(m, line, other):
    ks = ep_list(m, line, other).k
    mirrored = np.sort(np.where(np.isclose(-ks, -PI), PI, -ks))
    np.testing.assert_allclose(np.sort(ks), mirrored, atol=1e-9)
