from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from e2rc import gf2
from e2rc.matrix import (
    AlistError,
    BitMatrix,
    DegreeDistribution,
    cycle_free_within_columns,
    degree_histograms,
    edge_fractions,
    from_alist,
    is_valid_cycle,
    mod2_syndrome,
    to_alist,
)

from oracles import H2_M7, H2_M8, has_cycle_dfs


def dense_matrices(max_rows=8, max_cols=8):
    shapes = st.tuples(st.integers(1, max_rows), st.integers(1, max_cols))
    return shapes.flatmap(lambda s: arrays(np.uint8, s, elements=st.integers(0, 1)))


# -- BitMatrix --------------------------------------------------------


def test_dense_round_trip_and_supports():
    m = BitMatrix.from_dense(H2_M7)
    assert np.array_equal(m.to_dense(), H2_M7)
    assert m.col_support[3] == (3, 5)
    assert m.row_support[6] == (4, 5, 6)
    assert m.nnz == 13


def test_inconsistent_supports_rejected():
    with pytest.raises(ValueError):
        BitMatrix(2, 2, ((0,), (1,)), ((1,), (0,)))
    with pytest.raises(ValueError):
        BitMatrix(2, 1, ((0, 2),))
    with pytest.raises(ValueError):
        BitMatrix(2, 1, ((1, 0),))


def test_equality_ignores_construction_path():
    a = BitMatrix.from_dense(H2_M8)
    b = BitMatrix.from_columns(8, [np.flatnonzero(H2_M8[:, c]) for c in range(8)])
    assert a == b and hash(a) == hash(b)
    assert a != a.with_entry(0, 7)


def test_hstack_and_select():
    a = BitMatrix.from_dense(H2_M7)
    both = a.hstack(a)
    assert both.shape == (7, 14)
    assert both.select_columns(range(7, 14)) == a


def test_degree_histograms_eq2():
    cols, rows = degree_histograms(BitMatrix.from_dense(H2_M8))
    assert cols == {1: 1, 2: 7}
    assert rows == {1: 4, 2: 2, 3: 1, 4: 1}


# -- alist ------------------------------------------------------------


def test_alist_known_text():
    m = BitMatrix.from_dense([[1, 1, 0], [0, 1, 1]])
    assert to_alist(m) == "3 2\n2 2\n1 2 1\n2 2\n1 0\n1 2\n2 0\n1 2\n2 3\n"


@settings(max_examples=150, deadline=None)
@given(dense_matrices(10, 10))
def test_alist_round_trip(dense):
    m = BitMatrix.from_dense(dense)
    text = to_alist(m)
    back = from_alist(text)
    assert back == m
    assert to_alist(back) == text


def test_alist_tolerates_blank_lines():
    m = BitMatrix.from_dense(H2_M7)
    text = "\n\n" + to_alist(m).replace("\n", "\n\n")
    assert from_alist(text) == m


def test_alist_empty_columns_round_trip():
    m = BitMatrix.zeros(3, 2)
    assert from_alist(to_alist(m)) == m


@pytest.mark.parametrize(
    "text, line",
    [
        ("2 2\n1 1\n1 1\n1 1\n1\n3\n1\n2\n", 6),  # row index 3 > M
        ("2 2\n1 1\n1 1\n1 1\n1\n2\n2\n2\n", None),  # row lists disagree with columns
        ("2 2\n1 1\n1 1\n1 1\n1\n", None),  # truncated
        ("2 x\n", 1),
        ("2 2\n1 1\n1 1 1\n", 3),
    ],
)
def test_alist_errors_point_at_line(text, line):
    with pytest.raises(AlistError) as exc:
        from_alist(text)
    assert exc.value.line == line


# -- arithmetic -------------------------------------------------------


@settings(max_examples=100, deadline=None)
@given(dense_matrices(), st.data())
def test_syndrome_is_linear(dense, data):
    m = BitMatrix.from_dense(dense)
    n = dense.shape[1]
    u = data.draw(arrays(np.uint8, n, elements=st.integers(0, 1)))
    v = data.draw(arrays(np.uint8, n, elements=st.integers(0, 1)))
    assert np.array_equal(mod2_syndrome(m, u ^ v), mod2_syndrome(m, u) ^ mod2_syndrome(m, v))
    assert np.array_equal(mod2_syndrome(m, u), dense.astype(int) @ u % 2)


def test_syndrome_batch_matches_rows(rng):
    m = BitMatrix.from_dense(H2_M8)
    v = rng.integers(0, 2, (5, 8))
    batch = mod2_syndrome(m, v)
    assert batch.shape == (5, 8)
    for i in range(5):
        assert np.array_equal(batch[i], mod2_syndrome(m, v[i]))


def test_syndrome_length_mismatch():
    with pytest.raises(ValueError):
        mod2_syndrome(BitMatrix.from_dense(H2_M7), np.zeros(6))


# -- cycles -----------------------------------------------------------


@settings(max_examples=300, deadline=None)
@given(dense_matrices(), st.data())
def test_cycle_check_matches_dfs(dense, data):
    m = BitMatrix.from_dense(dense)
    cols = data.draw(st.sets(st.integers(0, dense.shape[1] - 1)))
    result = cycle_free_within_columns(m, cols)
    assert result.cycle_free == (not has_cycle_dfs(dense, cols))
    if not result.cycle_free:
        assert is_valid_cycle(m, result.witness)
        assert set(result.witness.columns) <= set(cols)


def test_weight_two_columns_of_fixtures_are_acyclic():
    for dense in (H2_M7, H2_M8):
        m = BitMatrix.from_dense(dense)
        assert cycle_free_within_columns(m, range(dense.shape[1] - 1)).cycle_free


def test_four_cycle_witness():
    m = BitMatrix.from_dense([[1, 1, 0], [1, 1, 0], [0, 0, 1]])
    res = cycle_free_within_columns(m, [0, 1, 2])
    assert not res.cycle_free
    assert sorted(res.witness.columns) == [0, 1]
    assert sorted(res.witness.rows) == [0, 1]


def test_invalid_witness_detected():
    m = BitMatrix.from_dense(H2_M7)
    from e2rc.matrix import CycleWitness

    assert not is_valid_cycle(m, CycleWitness((0, 3), (3, 5)))


# -- gf2 --------------------------------------------------------------


@settings(max_examples=100, deadline=None)
@given(dense_matrices(6, 6))
def test_dependent_rows_witness_sums_to_zero(dense):
    dep = gf2.dependent_rows(dense)
    r = gf2.rank(dense)
    if dep is None:
        assert r == dense.shape[0]
    else:
        assert r < dense.shape[0]
        assert not (dense[dep].sum(axis=0) % 2).any()


def test_inverse_round_trip():
    inv = gf2.inverse(H2_M7)
    assert np.array_equal(H2_M7.astype(int) @ inv % 2, np.eye(7, dtype=int))
    with pytest.raises(gf2.SingularMatrixError) as exc:
        gf2.inverse(np.array([[1, 1], [1, 1]]))
    assert exc.value.dependent_rows == [0, 1]


def test_independent_columns_greedy():
    a = np.array([[1, 1, 0, 1], [0, 0, 1, 1]])
    assert gf2.independent_columns(a) == [0, 2]


# -- degree distributions ---------------------------------------------


def test_distribution_validation():
    with pytest.raises(ValueError):
        DegreeDistribution({2: 0.5, 3: 0.4})
    with pytest.raises(ValueError):
        DegreeDistribution({0: 1.0})
    with pytest.raises(ValueError):
        DegreeDistribution({})
    d = DegreeDistribution.normalized({2: 0.3, 3: 0.69999})
    assert abs(sum(d.variable_edge_coeffs.values()) - 1) < 1e-12


def test_distribution_text_round_trip():
    text = "# rate one half\n[variable]\n2: 0.5\n3:0.5\n\n[check]\n6:1.0\n"
    d = DegreeDistribution.from_text(text)
    assert d.variable_edge_coeffs == {2: 0.5, 3: 0.5}
    assert d.check_edge_coeffs == {6: 1.0}
    assert DegreeDistribution.from_text(d.to_text()) == d
    with pytest.raises(ValueError):
        DegreeDistribution.from_text("2:1.0\n")
    with pytest.raises(ValueError):
        DegreeDistribution.from_text("[variable]\n2=1.0\n")


def test_node_fractions_and_average_degree():
    d = DegreeDistribution({2: 0.5, 4: 0.5})
    nodes = d.variable_node_fractions()
    assert nodes[2] == pytest.approx(2 / 3)
    assert d.edges_per_variable_node() == pytest.approx(8 / 3)


def test_edge_fractions():
    assert edge_fractions([2, 2, 4]) == {2: 0.5, 4: 0.5}
