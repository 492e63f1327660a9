import random

import pytest

from essdag.arith import binomial, compositions
from essdag.cells import CellTable, SymmetricWeights
from essdag.essential import (CountingInvariantError, EssentialContext, _check_reachable, essential_grouped,
                              extension_count_N, fomc_essential, fomc_essential_total, fomc_sink_restricted,
                              g_count, sink_layer_wfomc)
from essdag.logic import Vocabulary, parse_formula, parse_sentence
from essdag.oracle import EssentialDagSpec, brute_wfomc, essential_graphs, sinks
from essdag.pipeline import count

from corpus import ATOMS_XY, VOCAB, _qf

R = Vocabulary.parse("pred R/2", distinguished="R")
UR = VOCAB.with_distinguished("R")
UNIT = SymmetricWeights()


def context(vocab=R, phi="~R(x,x)", d=2, weights=UNIT):
    return EssentialContext(CellTable(parse_formula(phi, vocab), vocab, "R"), weights, d)


def test_g_count_examples():
    assert g_count({(0, (0,)): 2}, (1,), 1) == 0
    assert g_count({(0, (0,)): 2}, (0,), 1) == 1
    assert g_count({}, (0, 0), 2) == 1


def test_g_count_single_type_formula():
    rng = random.Random(3)
    for _ in range(200):
        d = rng.randint(1, 4)
        k2 = {(0, (t,)): rng.randint(0, 3) for t in range(d + 1)}
        t = rng.randint(0, d)
        size = sum(k2.values())
        assert g_count(k2, (t,), 1) == binomial(size, t) - (k2[(0, (t - 1,))] if t else 0)


def test_extension_count_r_only():
    ctx = context(d=3)
    k2 = {(0, (0,)): 2, (0, (1,)): 1, (0, (2,)): 1}
    k1 = {(0, (1,)): 2, (0, (3,)): 1}
    expected = g_count(k2, (1,), 1) ** 2 * g_count(k2, (3,), 1)
    assert extension_count_N(ctx, k1, k2) == expected
    assert extension_count_N(ctx, {}, k2) == 1
    assert extension_count_N(ctx, {(0, (2,)): 1}, {(0, (0,)): 2}) == 1


def test_sink_layer_is_multinomial():
    ctx = context(d=2)
    assert sink_layer_wfomc(ctx, {(0, (0,)): 2, (0, (1,)): 1, (0, (2,)): 1}) == 12


def _filled_memo(ctx, size):
    memo = {}
    for s in range(size + 1):
        for k in compositions(s, len(ctx.ext)):
            fomc_essential(ctx, k, memo)
    return memo


@pytest.mark.parametrize("vocab,phi,factor", [(R, "~R(x,x)", 1), (UR, "~R(x,x)", 2)])
@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("d", [1, 2])
def test_sink_completeness(vocab, phi, factor, n, d):
    """Sum over k of the m-sink count equals the DAGs whose first m nodes are sinks."""
    ctx = context(vocab, phi, d)
    memo = _filled_memo(ctx, n - 1)
    graphs = essential_graphs(n, d)
    for m in range(1, n + 1):
        engine = sum(fomc_sink_restricted(ctx, m, k, memo) for k in compositions(n, len(ctx.ext)))
        brute = sum(1 for g in graphs if set(range(1, m + 1)) <= set(sinks(g)))
        assert engine == brute * factor ** n


def test_fomc_essential_examples():
    ctx = context(d=2)
    assert fomc_essential(ctx, tuple(0 for _ in ctx.ext)) == 1
    assert fomc_essential_total(ctx, 3) == 4
    assert fomc_essential_total(context(UR, "~R(x,x)", 2), 3) == 32


def test_pipeline_examples():
    assert count("forall x forall y. true", R, 4, essential=("R", 3)) == 59
    s = parse_sentence("forall x forall y. R(x,y) -> U(y)", VOCAB)
    assert count(s, VOCAB, 3, essential=("R", 2)) == brute_wfomc(s, VOCAB, None, 3, EssentialDagSpec("R", 2)) == 20
    assert count("forall x forall y. R(x,y) -> R(y,x)", R, 1, essential=("R", 2)) == 1


def test_degree_zero_is_edgeless():
    assert count("forall x. true", VOCAB, 3, essential=("R", 0)) == 8


@pytest.mark.parametrize("n", range(1, 6))
def test_monotone_in_d(n):
    values = [count("forall x. true", R, n, essential=("R", d)) for d in range(n + 1)]
    assert values == sorted(values)
    assert len(set(values[n - 1:])) == 1


@pytest.mark.parametrize("seed", range(8))
def test_two_dp_paths_agree(seed):
    rng = random.Random(seed)
    phi = "~R(x,x) & " + _qf(rng, ATOMS_XY, 2)
    w = SymmetricWeights({"U": (rng.randint(1, 3), 1), "R": (rng.randint(1, 2), 1)})
    for d in (1, 2):
        ctx = context(UR, phi, d, w)
        for n in range(5):
            grouped = essential_grouped(ctx.cells, w, d, n, ())
            assert sum(grouped.values()) == fomc_essential_total(ctx, n)


def test_unreachable_vector_is_reported():
    with pytest.raises(CountingInvariantError):
        _check_reachable({(0, (1,)): 2}, {(0, (2,)): 1}, 1)


def test_context_requires_relation():
    with pytest.raises(ValueError):
        EssentialContext(CellTable(parse_formula("true", R), R), UNIT, 2)
    with pytest.raises(ValueError):
        context(d=-1)
