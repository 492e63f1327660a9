"""1-types, 2-tables, extended 1-types and the weight matrices built from them.

A 1-type assigns every atom over the single variable ``x`` (``P(x)`` for
unary ``P`` and ``Q(x,x)`` for binary ``Q``).  A 2-table assigns
``Q(x,y)`` and ``Q(y,x)`` for every binary ``Q``.  Both are enumerated in
lexicographic order over the vocabulary order, false before true.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Mapping, Sequence

from .arith import Number, as_exact, compositions
from .logic import (And, Atom, Const, Eq, Formula, Iff, Implies, LogicError, Not, Or,
                    Vocabulary, free_vars, is_quantifier_free)


class SymmetricWeights(Mapping):
    """Predicate name -> (w, wbar); predicates not listed weigh (1, 1)."""

    def __init__(self, pairs: Mapping | Iterable = ()):
        items = pairs.items() if isinstance(pairs, Mapping) else pairs
        self._w = {name: (as_exact(w), as_exact(wb)) for name, (w, wb) in items}

    def __getitem__(self, name: str) -> tuple[Number, Number]:
        return self._w.get(name, (1, 1))

    def __iter__(self):
        return iter(self._w)

    def __len__(self):
        return len(self._w)

    def __contains__(self, name) -> bool:
        return name in self._w

    def replace(self, **pairs) -> "SymmetricWeights":
        return self.updated(pairs)

    def updated(self, pairs: Mapping) -> "SymmetricWeights":
        merged = dict(self._w)
        merged.update({k: (as_exact(w), as_exact(wb)) for k, (w, wb) in pairs.items()})
        return SymmetricWeights(merged)

    def total_over(self, vocab: Vocabulary) -> "SymmetricWeights":
        unknown = set(self._w) - set(vocab.names)
        if unknown:
            raise LogicError(f"weights given for undeclared predicates: {', '.join(sorted(unknown))}")
        return SymmetricWeights({p: self[p] for p in vocab.names})

    def is_unit(self) -> bool:
        return all(v == (1, 1) for v in self._w.values())

    def __eq__(self, other):
        if not isinstance(other, SymmetricWeights):
            return NotImplemented
        names = set(self._w) | set(other._w)
        return all(self[n] == other[n] for n in names)

    def __repr__(self):
        return f"SymmetricWeights({self._w!r})"


@dataclass(frozen=True)
class OneType:
    index: int
    atoms: tuple[Atom, ...]
    values: tuple[bool, ...]

    def holds(self, pred: str) -> bool:
        for atom, val in zip(self.atoms, self.values):
            if atom.pred == pred:
                return val
        raise KeyError(pred)

    def literals(self) -> list[Formula]:
        return [a if v else Not(a) for a, v in zip(self.atoms, self.values)]


@dataclass(frozen=True)
class TwoTable:
    index: int
    atoms: tuple[Atom, ...]
    values: tuple[bool, ...]

    def holds(self, atom: Atom) -> bool:
        return self.values[self.atoms.index(atom)]

    def literals(self) -> list[Formula]:
        return [a if v else Not(a) for a, v in zip(self.atoms, self.values)]


def one_type_atoms(vocab: Vocabulary) -> tuple[Atom, ...]:
    out = []
    for pred, arity in vocab:
        if arity == 1:
            out.append(Atom(pred, ("x",)))
        elif arity == 2:
            out.append(Atom(pred, ("x", "x")))
    return tuple(out)


def two_table_atoms(vocab: Vocabulary) -> tuple[Atom, ...]:
    out = []
    for pred in vocab.of_arity(2):
        out.append(Atom(pred, ("x", "y")))
        out.append(Atom(pred, ("y", "x")))
    return tuple(out)


def enumerate_1types(vocab: Vocabulary) -> list[OneType]:
    atoms = one_type_atoms(vocab)
    return [OneType(i, atoms, vals) for i, vals in enumerate(product((False, True), repeat=len(atoms)))]


def enumerate_2tables(vocab: Vocabulary) -> list[TwoTable]:
    atoms = two_table_atoms(vocab)
    return [TwoTable(i, atoms, vals) for i, vals in enumerate(product((False, True), repeat=len(atoms)))]


def enumerate_T(u: int, d: int) -> list[tuple[int, ...]]:
    """All t in N^u with |t| <= d, by total and then largest-first."""
    out = []
    for s in range(d + 1):
        out.extend(sorted(compositions(s, u), reverse=True))
    return out


def alpha(k: Mapping[tuple, int], u: int) -> tuple[int, ...]:
    """Collapse counts over extended types (i, t) to base 1-type counts."""
    out = [0] * u
    for (i, _t), c in k.items():
        out[i] += c
    return tuple(out)


# ---------------------------------------------------------------------------
# Compiled evaluation


def _compile(phi: Formula, vocab: Vocabulary, diagonal: bool):
    """Compile a QF matrix into ``f(a, b, l)`` (or ``f(a)`` on the diagonal).

    ``a`` and ``b`` are 1-type value tuples for x and y, ``l`` a 2-table tuple.
    """
    if not is_quantifier_free(phi):
        raise LogicError("matrix must be quantifier-free")
    if not free_vars(phi) <= {"x", "y"}:
        raise LogicError("matrix variables must be x and y")
    pos1 = {a.pred: n for n, a in enumerate(one_type_atoms(vocab))}
    pos2 = {(a.pred, a.args): n for n, a in enumerate(two_table_atoms(vocab))}

    def term(v):
        return "x" if diagonal else v

    def go(f) -> str:
        if isinstance(f, Const):
            return "True" if f.value else "False"
        if isinstance(f, Eq):
            return "True" if term(f.left) == term(f.right) else "False"
        if isinstance(f, Atom):
            if f.pred not in vocab:
                raise LogicError(f"unknown predicate {f.pred} in matrix")
            arity = vocab.arity(f.pred)
            if arity == 0:
                raise LogicError(f"nullary atom {f.pred} must be fixed before compiling")
            args = tuple(term(a) for a in f.args)
            if arity == 1 or args[0] == args[1]:
                return f"{'a' if args[0] == 'x' else 'b'}[{pos1[f.pred]}]"
            return f"l[{pos2[(f.pred, args)]}]"
        if isinstance(f, Not):
            return f"(not {go(f.arg)})"
        if isinstance(f, And):
            return "(" + " and ".join(go(a) for a in f.args) + ")"
        if isinstance(f, Or):
            return "(" + " or ".join(go(a) for a in f.args) + ")"
        if isinstance(f, Implies):
            return f"((not {go(f.left)}) or {go(f.right)})"
        if isinstance(f, Iff):
            return f"({go(f.left)} == {go(f.right)})"
        raise LogicError(f"cannot compile {f!r}")

    src = ("lambda a: " if diagonal else "lambda a, b, l: ") + go(phi)
    return eval(src, {"__builtins__": {}})


def _flip(l: tuple) -> tuple:
    out = list(l)
    for q in range(0, len(l), 2):
        out[q], out[q + 1] = l[q + 1], l[q]
    return tuple(out)


def two_type_consistent(i: OneType, j: OneType, l: TwoTable, phi: Formula, vocab: Vocabulary) -> bool:
    """Whether the 2-type ijl entails phi(x,x) & phi(x,y) & phi(y,x) & phi(y,y)."""
    diag = _compile(phi, vocab, True)
    pair = _compile(phi, vocab, False)
    return bool(diag(i.values) and diag(j.values) and pair(i.values, j.values, l.values)
                and pair(j.values, i.values, _flip(l.values)))


def _weight_product(atoms: Sequence[Atom], values: Sequence[bool], weights: Mapping) -> Number:
    out: Number = 1
    for atom, val in zip(atoms, values):
        w, wb = weights[atom.pred]
        out *= w if val else wb
    return out


def type_weight(t: OneType, weights: Mapping) -> Number:
    return _weight_product(t.atoms, t.values, weights)


def table_weight(l: TwoTable, weights: Mapping) -> Number:
    return _weight_product(l.atoms, l.values, weights)


class CellTable:
    """Consistency structure of a matrix: live 1-types and consistent 2-tables.

    Only 1-types satisfying phi(x,x) are kept ("live"); indices below refer
    to positions in ``self.types``.  Weight-dependent quantities are computed
    on demand so one table serves many weightings.
    """

    def __init__(self, phi: Formula, vocab: Vocabulary, relation: str | None = None):
        self.phi = phi
        self.vocab = vocab
        self.relation = relation
        all_types = enumerate_1types(vocab)
        self.tables = enumerate_2tables(vocab)
        diag = _compile(phi, vocab, True)
        pair = _compile(phi, vocab, False)
        self.types = [t for t in all_types if diag(t.values)]
        self.u = len(self.types)
        if relation is not None:
            q = vocab.of_arity(2).index(relation)
            self._rel = (2 * q, 2 * q + 1)
        else:
            self._rel = None
        flipped = [_flip(l.values) for l in self.tables]
        # consistent[i][j]: table indices l with ijl consistent
        self.consistent: list[list[list[int]]] = [[[] for _ in range(self.u)] for _ in range(self.u)]
        for i, ti in enumerate(self.types):
            for j in range(i, self.u):
                tj = self.types[j]
                ok = [l.index for l, fl in zip(self.tables, flipped)
                      if pair(ti.values, tj.values, l.values) and pair(tj.values, ti.values, fl)]
                self.consistent[i][j] = ok
                if i != j:
                    self.consistent[j][i] = [self._flip_index(idx) for idx in ok]
                    self.consistent[j][i].sort()

    def _flip_index(self, idx: int) -> int:
        vals = _flip(self.tables[idx].values)
        out = 0
        for v in vals:
            out = 2 * out + int(v)
        return out

    def type_weights(self, weights: Mapping) -> list[Number]:
        return [type_weight(t, weights) for t in self.types]

    def table_weights(self, weights: Mapping) -> list[Number]:
        return [table_weight(l, weights) for l in self.tables]

    def r_matrix(self, weights: Mapping) -> list[list[Number]]:
        v = self.table_weights(weights)
        return [[sum(v[l] for l in self.consistent[i][j]) for j in range(self.u)] for i in range(self.u)]

    def cd_matrices(self, weights: Mapping) -> tuple[list[list[Number]], list[list[Number]]]:
        """c[i][j]: x (type i) -> y (type j) only;  d[i][j]: no R edge either way."""
        if self._rel is None:
            raise LogicError("c/d matrices need a distinguished relation")
        fwd, back = self._rel
        v = self.table_weights(weights)
        c = [[0] * self.u for _ in range(self.u)]
        d = [[0] * self.u for _ in range(self.u)]
        for i in range(self.u):
            for j in range(self.u):
                for l in self.consistent[i][j]:
                    vals = self.tables[l].values
                    if vals[back]:
                        continue
                    if vals[fwd]:
                        c[i][j] += v[l]
                    else:
                        d[i][j] += v[l]
        return c, d

    def has_pred(self, i: int, pred: str) -> bool:
        return self.types[i].holds(pred)


def r_matrix(phi: Formula, vocab: Vocabulary, weights: Mapping) -> list[list[Number]]:
    """r over live 1-types of phi."""
    return CellTable(phi, vocab).r_matrix(weights)


def cd_matrices(phi: Formula, vocab: Vocabulary, weights: Mapping, relation: str):
    return CellTable(phi, vocab, relation).cd_matrices(weights)
