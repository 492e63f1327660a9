from collections import Counter

import pytest

from essdag.census import (REFERENCE_TABLE, edges_filter, essential_bounded, essential_by_indegree,
                           essential_filtered, essential_total, indegree_vectors, matches_reference,
                           round_significant, sources_filter, table)
from essdag.oracle import essential_graphs, indegree_profile


@pytest.mark.parametrize("n,expected", [(0, 1), (1, 1), (2, 1), (3, 4), (4, 59), (5, 2616), (6, 306117)])
def test_total(n, expected):
    assert essential_total(n) == expected


def test_total_brute_force():
    for n in range(1, 6):
        assert essential_total(n) == len(essential_graphs(n))


@pytest.mark.parametrize("n,d,expected", [(3, 2, 4), (4, 2, 55), (5, 3, 2341), (7, 3, 32268692)])
def test_bounded(n, d, expected):
    assert essential_bounded(n, d) == expected


def test_all_sources():
    for n in range(6):
        assert essential_by_indegree((n, 0, 0)) == 1


@pytest.mark.parametrize("n", range(1, 6))
def test_histogram_matches_brute_force(n):
    d = max(n - 1, 1)
    hist = Counter(indegree_profile(g, d) for g in essential_graphs(n))
    for k in indegree_vectors(n, d):
        assert essential_by_indegree(k) == hist.get(k, 0), k


def test_filters():
    assert essential_filtered(3, 2, sources_filter(3)) == 1
    assert essential_filtered(3, 2, edges_filter(0)) == 1
    graphs = essential_graphs(3, 2)
    one_source = sum(1 for g in graphs if sum(1 for v in g.nodes if not g.parents(v)) == 1)
    assert essential_filtered(3, 2, sources_filter(1)) == one_source


@pytest.mark.parametrize("n", range(1, 7))
@pytest.mark.parametrize("d", range(0, 4))
def test_filter_totals(n, d):
    total = essential_bounded(n, d)
    assert sum(essential_filtered(n, d, sources_filter(s)) for s in range(n + 1)) == total
    assert sum(essential_filtered(n, d, edges_filter(e)) for e in range(n * d + 1)) == total


def test_diagonal():
    for n in range(1, 9):
        assert essential_bounded(n, n - 1) == essential_total(n)


def test_reference_rows_small():
    rows = table(8, 5)
    for n, row in rows.items():
        for d, v in row.items():
            assert matches_reference(v, REFERENCE_TABLE[n][d]), (n, d, v)


def test_significant_digits():
    assert round_significant(455173909) == "4.6e8"
    assert round_significant(455173909, rounding="ROUND_DOWN") == "4.5e8"
    assert round_significant(9960) == "1.0e4"
    assert matches_reference(455173909, 4.5e8)
    assert matches_reference(455173909, 4.6e8)
    assert not matches_reference(455173909, 4.4e8)
    assert not matches_reference(55, 54)


def test_negative_input():
    with pytest.raises(ValueError):
        essential_by_indegree((1, -1))
    with pytest.raises(ValueError):
        essential_bounded(-1, 2)
