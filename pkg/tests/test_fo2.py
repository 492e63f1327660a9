import random

import pytest

from essdag.cells import CellTable, SymmetricWeights
from essdag.fo2 import all_vectors, wfomc, wfomc_fixed_k
from essdag.logic import Forall, Vocabulary, parse_formula
from essdag.normal_form import NormalizedProblem, PredicateCount, CardinalityConstraint
from essdag.oracle import EssentialDagSpec, brute_wfomc
from essdag.pipeline import wfomc_with_cc

from corpus import ATOMS_XY, _qf

U = Vocabulary.parse("pred U/1")
R = Vocabulary.parse("pred R/2")
UR = Vocabulary.parse("pred U/1 R/2")
UNIT = SymmetricWeights()


def closed(phi):
    return Forall("x", Forall("y", phi))


def test_fixed_k_multinomial():
    assert wfomc_fixed_k(parse_formula("true", U), U, UNIT, (2, 1)) == 3


def test_fixed_k_loopfree():
    assert wfomc_fixed_k(parse_formula("~R(x,x)", R), R, UNIT, (2,)) == 4


def test_fixed_k_wrong_length():
    with pytest.raises(ValueError):
        wfomc_fixed_k(parse_formula("true", U), U, UNIT, (1,))


def test_symmetric_sum():
    phi = parse_formula("R(x,y) -> R(y,x)", R)
    cells = CellTable(phi, R)
    assert sum(wfomc_fixed_k(phi, R, UNIT, k, cells) for k in all_vectors(cells.u, 2)) == 8


def test_wfomc_examples():
    assert wfomc(parse_formula("true", U), U, UNIT, 3) == 8
    assert wfomc(parse_formula("U(x) & R(x,y)", UR), UR, UNIT, 0) == 1


def test_skolemized_forall_exists():
    # forall x exists y. R(x,y) becomes S(x) | ~R(x,y) with w(S) = (1, -1)
    v = Vocabulary.parse("pred R/2 S/1")
    w = SymmetricWeights({"S": (1, -1)})
    assert wfomc(parse_formula("S(x) | ~R(x,y)", v), v, w, 2) == 9


@pytest.mark.parametrize("seed", range(12))
def test_universal_matches_oracle(seed):
    rng = random.Random(seed)
    phi = parse_formula(_qf(rng, ATOMS_XY, 3), UR)
    w = SymmetricWeights({"U": (rng.randint(1, 3), 1), "R": (1, rng.randint(1, 2))})
    for n in range(4):
        assert wfomc(phi, UR, w, n) == brute_wfomc(closed(phi), UR, w, n)


def _cc_problem(phi, vocab, pred, cmp, bound):
    cc = CardinalityConstraint(pred, cmp, bound)
    return NormalizedProblem(phi, vocab, UNIT.total_over(vocab), (PredicateCount(cc, vocab.arity(pred)),), ())


def test_cardinality_examples():
    assert wfomc_with_cc(_cc_problem(parse_formula("true", U), U, "U", "=", 2), 3) == 3
    assert wfomc_with_cc(_cc_problem(parse_formula("~R(x,x)", R), R, "R", "=", 0), 2) == 1
    rd = R.with_distinguished("R")
    p = _cc_problem(parse_formula("~R(x,x)", rd), rd, "R", ">=", 1)
    assert wfomc_with_cc(p, 3, EssentialDagSpec("R", 2)) == 3
