"""Closed-form WFOMC of universally quantified two-variable sentences.

For a cardinality vector k over the live 1-types of a matrix phi,

    WFOMC(phi, k) = multinomial(k) * prod_i w_i^k_i * prod_{i<=j} r_ij^k(i,j)

with k(i,i) = k_i (k_i - 1) / 2 and k(i,j) = k_i k_j.
"""
from __future__ import annotations

from itertools import combinations_with_replacement
from typing import Mapping, Sequence

from .arith import Number, compositions, multinomial
from .cells import CellTable, SymmetricWeights
from .logic import Formula, Vocabulary


def closed_form_value(k: Sequence[int], w: Sequence[Number], r: Sequence[Sequence[Number]]) -> Number:
    """The closed form for a single vector k (over whatever index set w, r use)."""
    support = [i for i, ki in enumerate(k) if ki]
    value: Number = multinomial(k[i] for i in support)
    for a, i in enumerate(support):
        ki = k[i]
        value *= w[i] ** ki
        if ki > 1:
            value *= r[i][i] ** (ki * (ki - 1) // 2)
        for j in support[a + 1:]:
            value *= r[i][j] ** (ki * k[j])
        if not value:
            return 0
    return value


def wfomc_fixed_k_generic(k: Sequence[int], w: Sequence[Number], r: Sequence[Sequence[Number]]) -> Number:
    return closed_form_value(k, w, r)


def wfomc_fixed_k(phi: Formula, vocab: Vocabulary, weights: Mapping, k: Sequence[int],
                  cells: CellTable | None = None) -> Number:
    """WFOMC of forall x y. phi restricted to the 1-type vector k.

    ``k`` is indexed by the live 1-types of ``CellTable(phi, vocab)``.
    """
    cells = cells or CellTable(phi, vocab)
    if len(k) != cells.u:
        raise ValueError(f"vector has length {len(k)}, expected {cells.u} live 1-types")
    return closed_form_value(k, cells.type_weights(weights), cells.r_matrix(weights))


def _multisets(u: int, n: int):
    """Cardinality vectors of size n over u types, as sorted index tuples."""
    return combinations_with_replacement(range(u), n)


def wfomc_grouped(cells: CellTable, weights: Mapping, n: int,
                  tracked: Sequence[str] = ()) -> dict[tuple, Number]:
    """Sum over |k| = n, grouped by the number of elements satisfying each tracked unary predicate."""
    w = cells.type_weights(weights)
    r = cells.r_matrix(weights)
    marks = [tuple(int(cells.has_pred(i, p)) for p in tracked) for i in range(cells.u)]
    out: dict[tuple, Number] = {}
    if n == 0:
        return {tuple(0 for _ in tracked): 1}
    for combo in _multisets(cells.u, n):
        k = [0] * cells.u
        for i in combo:
            k[i] += 1
        value = closed_form_value(k, w, r)
        if not value:
            continue
        sig = tuple(sum(marks[i][q] for i in combo) for q in range(len(tracked)))
        out[sig] = out.get(sig, 0) + value
    return out


def wfomc(phi: Formula, vocab: Vocabulary, weights: Mapping | None, n: int) -> Number:
    """Sum of the closed form over all cardinality vectors with |k| = n."""
    cells = CellTable(phi, vocab)
    weights = weights if weights is not None else SymmetricWeights()
    return sum(wfomc_grouped(cells, weights, n).values())


def all_vectors(u: int, n: int):
    """Cardinality vectors with |k| = n, in lexicographic order."""
    return compositions(n, u)


def wfomc_with_cc(problem, n: int, axiom=None) -> Number:
    """Count a normalized problem with side constraints (see pipeline)."""
    from .pipeline import wfomc_with_cc as run

    return run(problem, n, axiom)
