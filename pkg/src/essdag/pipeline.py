"""End-to-end counting: parse, normalize, resolve side constraints, count."""
from __future__ import annotations

from fractions import Fraction
from itertools import product
from typing import Mapping, Sequence

from .arith import Number, interpolate_grid
from .cells import CellTable, SymmetricWeights
from .essential import essential_grouped
from .fo2 import wfomc_grouped
from .logic import (TRUE, And, Atom, Const, Formula, LogicError, Vocabulary, children, conj, free_vars,
                    parse_sentence, rebuild, simplify)
from .normal_form import CardinalityConstraint, NormalizedProblem, SymbolicGroup, normalize
from .oracle import EssentialDagSpec


def fix_nullary(f: Formula, values: Mapping[str, bool]) -> Formula:
    if isinstance(f, Atom) and not f.args and f.pred in values:
        return Const(values[f.pred])
    kids = children(f)
    if not kids:
        return f
    return rebuild(f, tuple(fix_nullary(c, values) for c in kids))


def _num(value: Number) -> Number:
    if isinstance(value, Fraction) and value.denominator == 1:
        return value.numerator
    return value


def wfomc_with_cc(problem: NormalizedProblem, n: int, axiom: EssentialDagSpec | None = None) -> Number:
    """Weighted count of the normalized problem on a domain of size n.

    Unary counts needed by constraints are read off the 1-type vectors;
    binary counts are recovered by evaluating with a symbolic weight at the
    abscissas 1, 2, ... and interpolating.
    """
    vocab = problem.vocab
    relation = None
    if axiom is not None:
        relation = axiom.relation
        if relation not in vocab or vocab.arity(relation) != 2:
            raise LogicError(f"{relation} must be a declared binary predicate")
    nullary = vocab.of_arity(0)
    cell_vocab = Vocabulary(tuple(p for p in vocab.predicates if p[1] > 0), relation)
    tracked: list[str] = []
    groups: dict[str, SymbolicGroup] = {}
    for c in problem.constraints:
        for p in c.unary:
            if p not in tracked:
                tracked.append(p)
        for g in c.groups:
            groups.setdefault(g.name, g)
    group_list = list(groups.values())
    axes = [list(range(1, g.degree(n) + 2)) for g in group_list]
    weights = problem.weights

    # closed conjuncts hold or fail outside the universal quantifiers; on an
    # empty domain they must not become vacuous
    parts = problem.matrix.args if isinstance(problem.matrix, And) else (problem.matrix,)
    gate = conj(*(p for p in parts if not free_vars(p)))
    body = conj(*(p for p in parts if free_vars(p)))

    total: Number = 0
    for bits in product((False, True), repeat=len(nullary)):
        values = dict(zip(nullary, bits))
        nw: Number = 1
        for p, on in values.items():
            w, wb = weights[p]
            nw *= w if on else wb
        if not nw:
            continue
        if simplify(fix_nullary(gate, values)) != TRUE:
            continue
        matrix = simplify(fix_nullary(body, values))
        cells = CellTable(matrix, cell_vocab, relation)
        grid: dict[tuple, dict[tuple, Number]] = {}
        for point in product(*axes):
            w_here = dict(weights.items())
            for g, z in zip(group_list, point):
                for p in g.predicates:
                    w, wb = weights[p]
                    w_here[p] = (w * z, wb)
            sw = SymmetricWeights(w_here)
            if axiom is None:
                grid[point] = wfomc_grouped(cells, sw, n, tracked)
            else:
                grid[point] = essential_grouped(cells, sw, axiom.d, n, tracked)
        signatures = {s for res in grid.values() for s in res}
        for sig in signatures:
            if group_list:
                coeffs = interpolate_grid(axes, {pt: res.get(sig, 0) for pt, res in grid.items()})
            else:
                coeffs = {(): grid[()].get(sig, 0)}
            for exps, coef in coeffs.items():
                counts = dict(zip(tracked, sig))
                counts.update({g.name: e for g, e in zip(group_list, exps)})
                counts.update({p: int(v) for p, v in values.items()})
                factor: Number = 1
                for c in problem.constraints:
                    factor *= c.weight(counts, n)
                    if not factor:
                        break
                total += nw * coef * factor
    return _num(total)


def count(sentence: Formula | str, vocab: Vocabulary, n: int, weights: Mapping | None = None,
          essential: EssentialDagSpec | tuple | None = None,
          cardinality: Sequence[CardinalityConstraint | str] = ()) -> Number:
    """Weighted model count of a C2 sentence, optionally with EssentialDAG(R, d)."""
    if n < 0:
        raise LogicError("domain size must be non-negative")
    if isinstance(essential, tuple):
        essential = EssentialDagSpec(*essential)
    if essential is not None:
        if essential.relation not in vocab or vocab.arity(essential.relation) != 2:
            raise LogicError(f"{essential.relation} must be a declared binary predicate")
        vocab = vocab.with_distinguished(essential.relation)
    if isinstance(sentence, str):
        sentence = parse_sentence(sentence, vocab)
    ccs = [CardinalityConstraint.parse(c) if isinstance(c, str) else c for c in cardinality]
    sw = SymmetricWeights(weights or {}).total_over(vocab)
    problem = normalize(sentence, vocab, sw, essential.relation if essential else None, ccs)
    return wfomc_with_cc(problem, n, essential)
