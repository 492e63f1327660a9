"""Count-preserving rewrites down to a single universally quantified matrix.

The pipeline is

1. ``to_nnf``: negation normal form; counting quantifiers under negation
   are complemented.
2. ``reduce_c2``: every counting quantifier is replaced by FO2 definitions
   over fresh predicates plus a side constraint on predicate counts.
3. ``skolemize``: remaining existentials are removed with fresh predicates
   weighted (1, -1); nested quantifiers are named first.
4. ``conjoin_loopfree``: ``~R(x,x)`` is added when R must be a DAG.

Fresh predicates carry the prefixes ``@sk`` (Skolem), ``@cq`` (counting
gadgets) and ``@A`` (names for subformulas).  The parser rejects ``@`` so
they never collide with user predicates.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .arith import Number, factorial
from .cells import SymmetricWeights
from .logic import (FALSE, TRUE, And, Atom, Const, CountExists, Eq, Exists, Forall, Formula, Iff,
                    Implies, LogicError, Not, Or, Vocabulary, conj, disj, free_vars, is_quantifier_free,
                    neg, rebuild, children, rename, simplify)

SKOLEM_PREFIX = "@sk"
COUNTING_PREFIX = "@cq"
NAME_PREFIX = "@A"
COMPARATORS = {
    "=": lambda a, b: a == b,
    "<=": lambda a, b: a <= b,
    ">=": lambda a, b: a >= b,
}


# ---------------------------------------------------------------------------
# Constraints


@dataclass(frozen=True)
class CardinalityConstraint:
    """``|predicate| comparator bound`` over the ground atoms of one predicate."""

    predicate: str
    comparator: str
    bound: int

    def __post_init__(self):
        if self.comparator not in COMPARATORS:
            raise LogicError(f"comparator must be one of {', '.join(COMPARATORS)}")
        if self.bound < 0:
            raise LogicError("cardinality bounds must be non-negative")

    @classmethod
    def parse(cls, text: str) -> "CardinalityConstraint":
        import re

        m = re.fullmatch(r"\s*([A-Za-z_][A-Za-z0-9_]*)\s*(<=|>=|=)\s*([0-9]+)\s*", text)
        if not m:
            raise LogicError(f"bad cardinality constraint {text!r}; use e.g. 'R<=3'")
        return cls(m.group(1), m.group(2), int(m.group(3)))

    def __str__(self):
        return f"{self.predicate}{self.comparator}{self.bound}"


@dataclass(frozen=True)
class SymbolicGroup:
    """Binary predicates sharing one symbolic weight; ``disjoint`` when no pair can be true together."""

    name: str
    predicates: tuple[str, ...]
    disjoint: bool = True

    def degree(self, n: int) -> int:
        return n * n if self.disjoint else n * n * len(self.predicates)


class Constraint:
    """Side condition evaluated on predicate counts.

    ``counts`` maps tracked unary predicates to their number of true
    elements, symbolic group names to the exponent of their weight and
    nullary predicates to 0/1.
    """

    unary: tuple[str, ...] = ()
    groups: tuple[SymbolicGroup, ...] = ()
    nullary: tuple[str, ...] = ()

    def weight(self, counts: Mapping[str, int], n: int) -> Number:
        raise NotImplementedError


@dataclass(frozen=True)
class PredicateCount(Constraint):
    constraint: CardinalityConstraint
    arity: int

    @property
    def unary(self):
        return (self.constraint.predicate,) if self.arity == 1 else ()

    @property
    def groups(self):
        if self.arity == 2:
            return (SymbolicGroup("#" + self.constraint.predicate, (self.constraint.predicate,)),)
        return ()

    @property
    def nullary(self):
        return (self.constraint.predicate,) if self.arity == 0 else ()

    def weight(self, counts, n):
        key = "#" + self.constraint.predicate if self.arity == 2 else self.constraint.predicate
        ok = COMPARATORS[self.constraint.comparator](counts[key], self.constraint.bound)
        return 1 if ok else 0


@dataclass(frozen=True)
class WitnessBalance(Constraint):
    """Total witness edges equal the sum of the declared classes; divides out witness orderings.

    An element of class j has its j witnesses spread over j disjoint
    witness relations in j! ways, so each such element contributes 1/j!.
    ``forced`` is the class of every element when no class predicates exist.
    """

    group: SymbolicGroup
    classes: tuple[tuple[str, int], ...]
    forced: int | None = None

    @property
    def unary(self):
        return tuple(name for name, _ in self.classes)

    @property
    def groups(self):
        return (self.group,)

    def weight(self, counts, n):
        target = sum(j * counts[name] for name, j in self.classes)
        if self.forced is not None:
            target += self.forced * n
        if counts[self.group.name] != target:
            return 0
        value = Fraction(1)
        for name, j in self.classes:
            value /= factorial(j) ** counts[name]
        if self.forced is not None:
            value /= factorial(self.forced) ** n
        return value.numerator if value.denominator == 1 else value


@dataclass(frozen=True)
class CountGuard(Constraint):
    """``guard <-> (|pred| cmp bound)``; without a guard the comparison must hold."""

    pred: str
    comparator: str
    bound: int
    guard: str | None = None

    @property
    def unary(self):
        return (self.pred,)

    @property
    def nullary(self):
        return (self.guard,) if self.guard else ()

    def weight(self, counts, n):
        holds = COMPARATORS[self.comparator](counts[self.pred], self.bound)
        want = bool(counts[self.guard]) if self.guard else True
        return 1 if holds == want else 0


@dataclass(frozen=True)
class NormalizedProblem:
    matrix: Formula
    vocab: Vocabulary
    weights: SymmetricWeights
    constraints: tuple = ()
    introduced: tuple[str, ...] = ()

    def introduced_weights(self) -> dict[str, tuple]:
        return {p: self.weights[p] for p in self.introduced}


# ---------------------------------------------------------------------------
# Negation normal form


def to_nnf(f: Formula, positive: bool = True) -> Formula:
    """Push negations to atoms; implications and equivalences are expanded."""
    if isinstance(f, Const):
        return f if positive else Const(not f.value)
    if isinstance(f, (Atom, Eq)):
        return f if positive else Not(f)
    if isinstance(f, Not):
        return to_nnf(f.arg, not positive)
    if isinstance(f, (And, Or)):
        kids = tuple(to_nnf(a, positive) for a in f.args)
        same = isinstance(f, And) == positive
        return And(kids) if same else Or(kids)
    if isinstance(f, Implies):
        if positive:
            return Or((to_nnf(f.left, False), to_nnf(f.right, True)))
        return And((to_nnf(f.left, True), to_nnf(f.right, False)))
    if isinstance(f, Iff):
        a, b = f.left, f.right
        if positive:
            return And((Or((to_nnf(a, False), to_nnf(b, True))), Or((to_nnf(a, True), to_nnf(b, False)))))
        return Or((And((to_nnf(a, True), to_nnf(b, False))), And((to_nnf(a, False), to_nnf(b, True)))))
    if isinstance(f, Forall):
        body = to_nnf(f.body, positive)
        return Forall(f.var, body) if positive else Exists(f.var, body)
    if isinstance(f, Exists):
        body = to_nnf(f.body, positive)
        return Exists(f.var, body) if positive else Forall(f.var, body)
    if isinstance(f, CountExists):
        body = to_nnf(f.body, True)
        if positive:
            return CountExists(f.var, body, f.cmp, f.m)
        v, m = f.var, f.m
        if f.cmp == "=":
            if m == 0:
                return CountExists(v, body, ">=", 1)
            return Or((CountExists(v, body, "<=", m - 1), CountExists(v, body, ">=", m + 1)))
        if f.cmp == "<=":
            return CountExists(v, body, ">=", m + 1)
        if m == 0:
            return FALSE
        return CountExists(v, body, "<=", m - 1)
    raise TypeError(f"not a formula: {f!r}")


def _split_top(f: Formula) -> list[Formula]:
    """Top-level conjuncts, distributing universal quantifiers over conjunctions."""
    if isinstance(f, And):
        out = []
        for a in f.args:
            out.extend(_split_top(a))
        return out
    if isinstance(f, Forall) and isinstance(f.body, (And, Forall)):
        inner = _split_top(f.body)
        if len(inner) > 1:
            return [p for part in inner for p in _split_top(Forall(f.var, part))]
    if f == TRUE:
        return []
    return [f]


def _complement(c: CountExists) -> Formula:
    """The negation of a counting quantifier, leaving its body untouched."""
    v, body, m = c.var, c.body, c.m
    if c.cmp == "=":
        if m == 0:
            return CountExists(v, body, ">=", 1)
        return Or((CountExists(v, body, "<=", m - 1), CountExists(v, body, ">=", m + 1)))
    if c.cmp == "<=":
        return CountExists(v, body, ">=", m + 1)
    if m == 0:
        return FALSE
    return CountExists(v, body, "<=", m - 1)


def _counting_shortcut(var: str, body: Formula, cmp: str, m: int) -> Formula | None:
    """Counting quantifiers expressible without a gadget."""
    if cmp == ">=" and m == 0:
        return TRUE
    if cmp == ">=" and m == 1:
        return Exists(var, body)
    if cmp in ("=", "<=") and m == 0:
        return Forall(var, to_nnf(body, False))
    return None


# ---------------------------------------------------------------------------
# The shared rewriting context


class _Normalizer:
    def __init__(self, vocab: Vocabulary, weights: Mapping | None):
        self.preds: list[tuple[str, int]] = list(vocab.predicates)
        self.distinguished = vocab.distinguished
        self.weights: dict[str, tuple] = {p: (weights or SymmetricWeights())[p] for p in vocab.names}
        if weights:
            for p in weights:
                if p not in vocab.names:
                    raise LogicError(f"weights given for unknown predicate {p}")
        self.introduced: list[str] = []
        self.constraints: list[Constraint] = []
        self.pending: list[Formula] = []
        self.cache: dict = {}
        self.counter = 0

    @property
    def vocab(self) -> Vocabulary:
        return Vocabulary(tuple(self.preds), self.distinguished)

    def fresh(self, prefix: str, arity: int, weight=(1, 1)) -> str:
        names = {p for p, _ in self.preds}
        while True:
            self.counter += 1
            name = f"{prefix}{self.counter}"
            if name not in names:
                break
        self.preds.append((name, arity))
        self.weights[name] = weight
        self.introduced.append(name)
        return name

    # -- naming quantified subformulas ---------------------------------

    def qf_ify(self, f: Formula) -> Formula:
        """Replace every maximal quantified subformula by a defined atom."""
        if isinstance(f, (Forall, Exists)):
            return self.define(f)
        if isinstance(f, CountExists):
            raise LogicError("counting quantifiers must be eliminated first")
        kids = children(f)
        if not kids:
            return f
        return rebuild(f, tuple(self.qf_ify(c) for c in kids))

    def define(self, q: Formula) -> Formula:
        body = self.qf_ify(q.body)
        free = sorted(free_vars(body) - {q.var})
        if free:
            (u,) = free
            mapping = {u: "x", q.var: "y"}
        else:
            u = None
            mapping = {q.var: "x"}
        cbody = rename(body, mapping)
        key = (type(q).__name__, u is None, cbody)
        if key not in self.cache:
            if u is None:
                name = self.fresh(NAME_PREFIX, 0)
                a = Atom(name, ())
                if isinstance(q, Exists):
                    self.pending.append(Forall("x", Implies(cbody, a)))
                    self.pending.append(Or((neg(a), Exists("x", cbody))))
                else:
                    self.pending.append(Forall("x", Implies(a, cbody)))
                    self.pending.append(Or((a, Exists("x", to_nnf(cbody, False)))))
            else:
                name = self.fresh(NAME_PREFIX, 1)
                a = Atom(name, ("x",))
                if isinstance(q, Exists):
                    self.pending.append(Forall("x", Forall("y", Implies(cbody, a))))
                    self.pending.append(Forall("x", Exists("y", disj(neg(a), cbody))))
                else:
                    self.pending.append(Forall("x", Forall("y", Implies(a, cbody))))
                    self.pending.append(Forall("x", Exists("y", disj(a, to_nnf(cbody, False)))))
            self.cache[key] = name
        name = self.cache[key]
        return Atom(name, ()) if u is None else Atom(name, (u,))

    # -- counting quantifiers -----------------------------------------

    def eliminate(self, f: Formula) -> Formula:
        if isinstance(f, CountExists):
            body = self.eliminate(f.body)
            short = _counting_shortcut(f.var, body, f.cmp, f.m)
            if short is not None:
                return short
            return self.counting_atom(f.var, body, f.cmp, f.m)
        kids = children(f)
        if not kids:
            return f
        return rebuild(f, tuple(self.eliminate(c) for c in kids))

    def counting_atom(self, var: str, body: Formula, cmp: str, m: int) -> Formula:
        body = self.qf_ify(body)
        free = sorted(free_vars(body) - {var})
        key = ("count", var, tuple(free), body, cmp, m)
        if key in self.cache:
            return self.cache[key]
        if not free:
            guard = self.fresh(NAME_PREFIX, 0)
            self.count_elements(var, body, cmp, m, guard)
            out: Formula = Atom(guard, ())
        else:
            (u,) = free
            head = self.fresh(NAME_PREFIX, 1)
            self.witness_gadget(u, var, body, cmp, m, head)
            out = Atom(head, (u,))
        self.cache[key] = out
        return out

    def top_level(self, c: Formula) -> Formula:
        """Counting quantifiers that are whole conjuncts need no head predicate."""
        if isinstance(c, Not) and isinstance(c.arg, CountExists):
            c = _complement(c.arg)
        elif (isinstance(c, Forall) and isinstance(c.body, Not)
              and isinstance(c.body.arg, CountExists)):
            c = Forall(c.var, _complement(c.body.arg))
        if isinstance(c, CountExists):
            body = self.eliminate(c.body)
            short = _counting_shortcut(c.var, body, c.cmp, c.m)
            if short is not None:
                return short
            body = self.qf_ify(body)
            if free_vars(body) <= {c.var}:
                self.count_elements(c.var, body, c.cmp, c.m, None)
                return TRUE
            return self.counting_atom(c.var, body, c.cmp, c.m)
        if isinstance(c, Forall) and isinstance(c.body, CountExists) and c.body.var != c.var:
            inner = c.body
            body = self.eliminate(inner.body)
            short = _counting_shortcut(inner.var, body, inner.cmp, inner.m)
            if short is not None:
                return Forall(c.var, short)
            body = self.qf_ify(body)
            self.witness_gadget(c.var, inner.var, body, inner.cmp, inner.m, None)
            return TRUE
        return self.eliminate(c)

    def count_elements(self, var: str, body: Formula, cmp: str, m: int, guard: str | None) -> None:
        """``guard <-> exists[cmp m] var. body`` for a body with no other free variable."""
        body = rename(body, {var: "x"})
        if isinstance(body, Atom) and len(body.args) == 1:
            pred = body.pred
        else:
            pred = self.fresh(COUNTING_PREFIX, 1)
            self.pending.append(Forall("x", Iff(Atom(pred, ("x",)), body)))
        self.constraints.append(CountGuard(pred, cmp, m, guard))

    def witness_gadget(self, free: str, var: str, body: Formula, cmp: str, m: int, head: str | None) -> None:
        """Constrain each element x by the number of y with body(x, y).

        The condition is an exact class j for the count, or "any count".
        Counts outside a finite set are written as "any" minus the
        excluded classes, using a predicate of weight (-1, 1).  An element
        of class j >= 1 picks its witnesses through j disjoint relations,
        each forced nonempty; a global constraint then pins the number of
        witnesses at exactly j per element.
        """
        psi = rename(body, {free: "x", var: "y"}) if free != var else rename(body, {var: "y"})
        x = ("x",)
        finite = cmp in ("=", "<=")
        if cmp == "=":
            classes = [m]
        elif cmp == "<=":
            classes = list(range(m + 1))
        else:
            classes = list(range(m))
        forced = head is None and cmp == "="
        axioms: list[Formula] = []
        if forced:
            cls = {m: TRUE}
        else:
            sign = (-1, 1) if head is None and not finite else (1, 1)
            cls = {j: Atom(self.fresh(COUNTING_PREFIX, 1, sign), x) for j in classes}
            names = list(cls.values())
            for a in range(len(names)):
                for b in range(a + 1, len(names)):
                    axioms.append(neg(conj(names[a], names[b])))
            any_cls = disj(*names)
            if head is None:
                if finite:
                    axioms.append(any_cls)
            else:
                lit = Atom(head, x) if finite else Not(Atom(head, x))
                axioms.append(Implies(lit, any_cls))
                minus = Atom(self.fresh(COUNTING_PREFIX, 1, (-1, 1)), x)
                axioms.append(Iff(minus, conj(neg(lit), any_cls)))
        if 0 in cls:
            axioms.append(Implies(cls[0], to_nnf(psi, False)))
        top = max(classes)
        if top >= 1:
            fs = [Atom(self.fresh(COUNTING_PREFIX, 2), ("x", "y")) for _ in range(top)]
            at_least = [disj(*(cls[j] for j in classes if j >= i)) for i in range(1, top + 1)]
            for i, f in enumerate(fs):
                axioms.append(Implies(f, conj(psi, at_least[i])))
                for g in fs[i + 1:]:
                    axioms.append(neg(conj(f, g)))
                self.pending.append(Forall("x", Exists("y", disj(neg(at_least[i]), f))))
            axioms.append(Implies(conj(psi, at_least[0]), disj(*fs)))
            group = SymbolicGroup(fs[0].pred, tuple(f.pred for f in fs), disjoint=True)
            declared = tuple((cls[j].pred, j) for j in classes if j >= 1 and not forced)
            self.constraints.append(WitnessBalance(group, declared, m if forced else None))
        for a in axioms:
            self.pending.append(Forall("x", Forall("y", a)))

    # -- Skolemization --------------------------------------------------

    def skolem_parts(self, f: Formula) -> list[Formula]:
        """QF pieces of the matrix for one conjunct (definitions go to ``pending``)."""
        prefix: list[str] = []
        body = f
        while isinstance(body, Forall):
            prefix.append(body.var)
            body = body.body
        if is_quantifier_free(body):
            return [body]
        if not prefix and isinstance(body, Or):
            ex = [a for a in body.args if isinstance(a, Exists)]
            rest = [a for a in body.args if not isinstance(a, Exists)]
            if len(ex) == 1 and all(is_quantifier_free(a) for a in rest):
                # L | exists x. g : the Skolem atom false demands ~L and no witness
                inner = rename(self.qf_ify(ex[0].body), {ex[0].var: "x"})
                sk = Atom(self.fresh(SKOLEM_PREFIX, 0, (1, -1)), ())
                return [disj(sk, to_nnf(disj(*rest), False)), disj(sk, to_nnf(inner, False))]
        if isinstance(body, Exists) and len(set(prefix)) <= 1:
            inner = self.qf_ify(body.body)
            if prefix:
                outer = prefix[0]
                mapping = {body.var: "y"} if outer == body.var else {outer: "x", body.var: "y"}
                sk = Atom(self.fresh(SKOLEM_PREFIX, 1, (1, -1)), ("x",))
                return [disj(sk, to_nnf(rename(inner, mapping), False))]
            sk = Atom(self.fresh(SKOLEM_PREFIX, 0, (1, -1)), ())
            inner = rename(inner, {body.var: "x"})
            return [disj(sk, to_nnf(inner, False))]
        return [self.qf_ify(body)]

    def drain(self) -> list[Formula]:
        parts: list[Formula] = []
        while self.pending:
            item = simplify(to_nnf(self.pending.pop(0)))
            for c in _split_top(item):
                parts.extend(self.skolem_parts(c))
        return parts

    def problem(self, matrix: Formula) -> NormalizedProblem:
        return NormalizedProblem(matrix, self.vocab, SymmetricWeights(self.weights),
                                 tuple(self.constraints), tuple(self.introduced))


# ---------------------------------------------------------------------------
# Public entry points


def reduce_c2(s: Formula, vocab: Vocabulary, weights: Mapping | None = None):
    """Remove counting quantifiers.

    Returns ``(sentence, vocab, weights, constraints)``: an FO2 sentence over
    an extended vocabulary whose weighted count under the constraints
    equals that of ``s``.
    """
    ctx = _Normalizer(vocab, weights)
    if not _has_counting(s):
        return s, ctx.vocab, SymmetricWeights(ctx.weights), ()
    return _reduce(ctx, s) + (tuple(ctx.constraints),)


def _has_counting(f: Formula) -> bool:
    return isinstance(f, CountExists) or any(_has_counting(c) for c in children(f))


def _reduce(ctx: _Normalizer, s: Formula):
    # counting quantifiers are named before negations are pushed: a head
    # predicate is defined by an equivalence, so a negated occurrence costs
    # nothing while its complement would need further gadgets
    s = simplify(s)
    parts = [ctx.top_level(c) for c in _split_top(s)]
    out = conj(*parts, *ctx.pending)
    ctx.pending = []
    return out, ctx.vocab, SymmetricWeights(ctx.weights)


def skolemize(s: Formula, vocab: Vocabulary, weights: Mapping | None = None):
    """Return ``(matrix, vocab, weights)`` with forall x y. matrix count-equivalent to ``s``."""
    ctx = _Normalizer(vocab, weights)
    return _skolemize(ctx, s), ctx.vocab, SymmetricWeights(ctx.weights)


def _skolemize(ctx: _Normalizer, s: Formula) -> Formula:
    ctx.pending.append(s)
    return simplify(conj(*ctx.drain()))


def conjoin_loopfree(matrix: Formula, relation: str) -> Formula:
    return conj(matrix, Not(Atom(relation, ("x", "x"))))


def normalize(s: Formula, vocab: Vocabulary, weights: Mapping | None = None,
              relation: str | None = None, cardinality: Sequence[CardinalityConstraint] = ()) -> NormalizedProblem:
    """Full rewrite to a matrix plus constraints; ``relation`` adds loop-freedom."""
    if relation is not None:
        vocab = vocab.with_distinguished(relation)
    ctx = _Normalizer(vocab, weights)
    user = []
    for cc in cardinality:
        if cc.predicate not in vocab:
            raise LogicError(f"cardinality constraint on unknown predicate {cc.predicate}")
        user.append(PredicateCount(cc, vocab.arity(cc.predicate)))
    fo2, _, _ = _reduce(ctx, s)
    matrix = _skolemize(ctx, fo2)
    if relation is not None:
        matrix = conjoin_loopfree(matrix, relation)
    ctx.constraints.extend(user)
    return ctx.problem(matrix)
