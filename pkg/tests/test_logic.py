import itertools

import pytest
from hypothesis import given, settings, strategies as st

from essdag.logic import (FALSE, TRUE, And, Atom, Const, CountExists, Forall, Implies, Interpretation,
                          LogicError, Not, ParseError, Vocabulary, VocabularyError, canonical_variables,
                          evaluate_ground, ground, parse_formula, parse_problem, parse_sentence,
                          project_relation, restrict, to_text)
from essdag.oracle import models

from corpus import KINDS, VOCAB, sentences

V = VOCAB


def test_parse_implication():
    s = parse_sentence("forall x forall y. R(x,y) -> U(y)", V)
    assert s == Forall("x", Forall("y", Implies(Atom("R", ("x", "y")), Atom("U", ("y",)))))


def test_parse_counting_quantifier():
    s = parse_sentence("forall x exists[=2] y. R(x,y)", V)
    assert s == Forall("x", CountExists("y", Atom("R", ("x", "y")), "=", 2))


def test_third_variable_rejected():
    with pytest.raises(LogicError, match="two variables"):
        parse_sentence("forall x forall y forall z. R(x,z)", V)


@pytest.mark.parametrize("text", [
    "forall x. U(y)",          # free variable
    "forall x. Q(x)",          # undeclared
    "forall x. R(x)",          # wrong arity
    "forall x. (U(x)",         # unbalanced
    "forall x. @sk1(x)",       # reserved prefix
    "exists[=-1] x. U(x)",
])
def test_bad_sentences(text):
    with pytest.raises(LogicError):
        parse_sentence(text, V)


def test_parse_error_has_position():
    with pytest.raises(ParseError) as info:
        parse_sentence("forall x. U(x", V)
    assert info.value.pos is not None


def test_vocabulary_rules():
    with pytest.raises(VocabularyError):
        Vocabulary.parse("pred R/3")
    with pytest.raises(VocabularyError):
        Vocabulary.parse("pred U/1 U/2")
    with pytest.raises(VocabularyError):
        Vocabulary((("U", 1),), distinguished="U")
    v = Vocabulary.parse("pred U/1 R/2", distinguished="R")
    assert v.arity("R") == 2 and v.of_arity(1) == ("U",)


def test_alpha_renaming():
    a = parse_sentence("forall a exists b. R(a,b)", V)
    b = parse_sentence("forall x exists y. R(x,y)", V)
    assert a == b


def test_problem_header():
    vocab, s = parse_problem("pred U/1\nexists x. U(x)")
    assert vocab.names == ("U",)
    assert to_text(s) == "exists x. U(x)"


def test_ground_examples():
    assert ground(parse_formula("R(x,y) & x!=y", V), {"x": 1, "y": 1}) == And((Atom("R", (1, 1)), FALSE))
    assert ground(parse_formula("U(x)", V), {"x": 3}) == Atom("U", (3,))
    assert ground(parse_formula("R(x,y) -> R(y,x)", V), {"x": 1, "y": 2}) == \
        Implies(Atom("R", (1, 2)), Atom("R", (2, 1)))


def test_ground_requires_binding():
    with pytest.raises(LogicError):
        ground(parse_formula("U(x)", V), {})


def test_evaluate_ground():
    g = ground(parse_formula("R(x,y) -> R(y,x)", V), {"x": 1, "y": 2})
    assert evaluate_ground(g, lambda p, a: (p, a) == ("R", (2, 1)))
    assert not evaluate_ground(g, lambda p, a: (p, a) == ("R", (1, 2)))


# the interpretation drawn for the projection example: G(2), blue 2->1,
# 2->3, 3->2, 3->4, red loop at 3
EX_VOCAB = Vocabulary.parse("pred R/2 B/2 G/1")
EX_OMEGA = Interpretation.over(EX_VOCAB, 4, [
    ("G", (2,)), ("B", (2, 1)), ("B", (2, 3)), ("B", (3, 2)), ("B", (3, 4)), ("R", (3, 3))])


def test_restrict_example():
    low = restrict(EX_OMEGA, {1, 2})
    assert low.domain == (1, 2)
    assert low.true_atoms == {("G", (2,)), ("B", (2, 1))}
    high = restrict(EX_OMEGA, {3, 4})
    assert high.true_atoms == {("R", (3, 3)), ("B", (3, 4))}


def test_restrict_identity_and_empty():
    assert restrict(EX_OMEGA, EX_OMEGA.domain) == EX_OMEGA
    empty = restrict(EX_OMEGA, ())
    assert empty.domain == () and not empty.true_atoms
    with pytest.raises(ValueError):
        restrict(EX_OMEGA, {5})


def test_project_relation():
    g = project_relation(EX_OMEGA, "R")
    assert g.edges == {(3, 3)} and g.nodes == (1, 2, 3, 4)
    one = Interpretation.over(Vocabulary.parse("pred R/2"), 2, [("R", (1, 2))])
    assert project_relation(one, "R").edges == {(1, 2)}
    none = Interpretation.over(Vocabulary.parse("pred R/2"), 3)
    assert project_relation(none, "R").edges == frozenset()
    with pytest.raises(VocabularyError):
        project_relation(EX_OMEGA, "G")


def test_interpretation_checks_atoms():
    with pytest.raises(VocabularyError):
        Interpretation.over(EX_VOCAB, 2, [("R", (1, 3))])


@pytest.mark.parametrize("text", sentences(40, 11, KINDS))
def test_print_parse_roundtrip(text):
    s = parse_sentence(text, V)
    assert parse_sentence(to_text(s), V) == s


def test_printer_constants():
    assert to_text(parse_sentence("forall x. true", V)) == "forall x. true"
    assert to_text(parse_sentence("forall x forall y. x != y | x = y", V)) == "forall x. forall y. x!=y | x=y"


subsets = st.sets(st.integers(1, 4))


@settings(max_examples=60, deadline=None)
@given(st.sets(st.sampled_from(list(itertools.product([1, 2, 3, 4], repeat=2)))), subsets, subsets)
def test_restrict_idempotent_and_monotone(edges, a, b):
    omega = Interpretation.over(Vocabulary.parse("pred R/2"), 4, [("R", e) for e in edges])
    b = b & a
    assert restrict(restrict(omega, a), b) == restrict(omega, b)
    assert restrict(omega, b).true_atoms <= restrict(omega, a).true_atoms


@settings(max_examples=60, deadline=None)
@given(st.sets(st.sampled_from(list(itertools.product([1, 2, 3, 4], repeat=2)))),
       st.sets(st.integers(1, 4)), subsets)
def test_universal_models_restrict(edges, us, a):
    omega = Interpretation.over(V, 4, [("R", e) for e in edges] + [("U", (u,)) for u in us])
    for text in ["forall x forall y. R(x,y) -> U(y)", "forall x forall y. R(x,y) -> R(y,x)",
                 "forall x forall y. (U(x) & R(x,y)) -> U(y)"]:
        s = parse_sentence(text, V)
        if models(omega, s):
            assert models(restrict(omega, a), s)


def test_canonical_variables_idempotent():
    s = parse_sentence("forall a. exists b. R(a,b) & U(b)", V)
    assert canonical_variables(s) == s


def test_constants_and_not():
    assert parse_formula("~true", V) == Not(TRUE)
    assert isinstance(parse_formula("false", V), Const)
