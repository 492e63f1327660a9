"""Brute-force ground truth: enumerate interpretations and check them directly.

Nothing here shares code with the counting engine beyond the syntax tree.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from graphlib import CycleError, TopologicalSorter
from itertools import product
from typing import Iterable, Mapping

from .arith import Number, as_exact
from .logic import (And, Atom, Const, CountExists, DirectedGraph, Eq, Exists, Forall, Formula, Iff,
                    Implies, Interpretation, LogicError, Not, Or, Vocabulary, herbrand_base)

MAX_INTERPRETATIONS = 2 ** 24


class InstanceTooLarge(LogicError):
    pass


@dataclass(frozen=True)
class EssentialDagSpec:
    relation: str
    d: int

    def __post_init__(self):
        if self.d < 0:
            raise ValueError("indegree bound must be non-negative")


# ---------------------------------------------------------------------------
# Graph checks


def _graph(g: DirectedGraph | Iterable, nodes: Iterable[int] | None = None) -> DirectedGraph:
    if isinstance(g, DirectedGraph):
        return g
    edges = frozenset(tuple(e) for e in g)
    if nodes is None:
        nodes = sorted({v for e in edges for v in e})
    return DirectedGraph(tuple(nodes), edges)


def is_dag(g) -> bool:
    g = _graph(g)
    if any(a == b for a, b in g.edges):
        return False
    ts = TopologicalSorter({v: g.parents(v) for v in g.nodes})
    try:
        ts.prepare()
    except CycleError:
        return False
    return True


def is_protected(g, edge: tuple[int, int]) -> bool:
    """An edge a->b is protected when parents(a) differs from parents(b) minus a."""
    g = _graph(g)
    a, b = edge
    if (a, b) not in g.edges:
        raise ValueError(f"edge {a}->{b} is not in the graph")
    return g.parents(a) != g.parents(b) - {a}


def is_essential(g, d: int | None = None) -> bool:
    g = _graph(g)
    if not is_dag(g):
        return False
    if d is not None and any(len(g.parents(v)) > d for v in g.nodes):
        return False
    return all(is_protected(g, e) for e in g.edges)


def sinks(g) -> list[int]:
    g = _graph(g)
    return [v for v in g.nodes if not g.children(v)]


def remove_node(g, v: int) -> DirectedGraph:
    g = _graph(g)
    return DirectedGraph(tuple(x for x in g.nodes if x != v),
                         frozenset(e for e in g.edges if v not in e))


def indegree_profile(g, d: int) -> tuple[int, ...]:
    g = _graph(g)
    k = [0] * (d + 1)
    for v in g.nodes:
        k[len(g.parents(v))] += 1
    return tuple(k)


def _acyclic_masks(parents: tuple[int, ...]) -> bool:
    """Kahn's algorithm on parent bitmasks (node v is bit v)."""
    remaining = (1 << len(parents)) - 1
    while remaining:
        free = 0
        for v, pm in enumerate(parents):
            if remaining >> v & 1 and not pm & remaining:
                free |= 1 << v
        if not free:
            return False
        remaining &= ~free
    return True


@lru_cache(maxsize=64)
def essential_graphs(n: int, d: int | None = None) -> tuple[DirectedGraph, ...]:
    """All essential DAGs on [n] with indegree at most d.

    Parent sets are assigned node by node, abandoning a branch as soon as
    the edges fixed so far contain a cycle; every complete acyclic
    assignment is then checked against the protected-edge definition.
    """
    if n * (n - 1) > 24:
        raise InstanceTooLarge(f"2^{n * (n - 1)} edge sets on {n} nodes exceeds the enumeration guard")
    nodes = tuple(range(1, n + 1))
    bound = n - 1 if d is None else min(d, n - 1)
    choices = [[m for m in range(1 << n) if not m >> v & 1 and bin(m).count("1") <= bound]
               for v in range(n)]
    parents = [0] * n
    out = []

    def rec(v: int):
        if v == n:
            edges = frozenset((a + 1, b + 1) for b, pm in enumerate(parents) for a in range(n) if pm >> a & 1)
            g = DirectedGraph(nodes, edges)
            if is_essential(g, d):
                out.append(g)
            return
        for pm in choices[v]:
            parents[v] = pm
            if _acyclic_masks(tuple(parents)):
                rec(v + 1)
        parents[v] = 0

    rec(0)
    return tuple(out)


# ---------------------------------------------------------------------------
# Model checking


def _compile(f: Formula, domain: tuple[int, ...]):
    """Closure ``ev(truth, env)``; ``truth`` is the set of true ground atoms."""
    if isinstance(f, Const):
        val = f.value
        return lambda truth, env: val
    if isinstance(f, Atom):
        pred, args = f.pred, f.args
        if not args:
            key = (pred, ())
            return lambda truth, env: key in truth
        if len(args) == 1:
            a0 = args[0]
            return lambda truth, env: (pred, (env[a0],)) in truth
        a0, a1 = args
        return lambda truth, env: (pred, (env[a0], env[a1])) in truth
    if isinstance(f, Eq):
        l, r = f.left, f.right
        return lambda truth, env: env[l] == env[r]
    if isinstance(f, Not):
        sub = _compile(f.arg, domain)
        return lambda truth, env: not sub(truth, env)
    if isinstance(f, And):
        subs = [_compile(a, domain) for a in f.args]
        return lambda truth, env: all(s(truth, env) for s in subs)
    if isinstance(f, Or):
        subs = [_compile(a, domain) for a in f.args]
        return lambda truth, env: any(s(truth, env) for s in subs)
    if isinstance(f, Implies):
        a, b = _compile(f.left, domain), _compile(f.right, domain)
        return lambda truth, env: (not a(truth, env)) or b(truth, env)
    if isinstance(f, Iff):
        a, b = _compile(f.left, domain), _compile(f.right, domain)
        return lambda truth, env: a(truth, env) == b(truth, env)
    if isinstance(f, (Forall, Exists, CountExists)):
        var = f.var
        body = _compile(f.body, domain)

        def witnesses(truth, env):
            inner = dict(env)
            count = 0
            for c in domain:
                inner[var] = c
                if body(truth, inner):
                    count += 1
            return count

        if isinstance(f, Forall):
            return lambda truth, env: witnesses(truth, env) == len(domain)
        if isinstance(f, Exists):
            return lambda truth, env: witnesses(truth, env) >= 1
        m, cmp = f.m, f.cmp
        if cmp == "=":
            return lambda truth, env: witnesses(truth, env) == m
        if cmp == "<=":
            return lambda truth, env: witnesses(truth, env) <= m
        return lambda truth, env: witnesses(truth, env) >= m
    raise TypeError(f"not a formula: {f!r}")


def models(omega: Interpretation, s: Formula) -> bool:
    """Herbrand-semantics check of a closed sentence."""
    return bool(_compile(s, tuple(omega.domain))(omega.true_atoms, {}))


def brute_wfomc(s: Formula, vocab: Vocabulary, weights: Mapping | None, n: int,
                axiom: EssentialDagSpec | None = None) -> Number:
    """Weighted sum over every interpretation on [n] that satisfies s (and the axiom)."""
    weights = weights or {}

    def wpair(pred):
        w, wb = weights.get(pred, (1, 1)) if hasattr(weights, "get") else weights[pred]
        return as_exact(w), as_exact(wb)

    domain = tuple(range(1, n + 1))
    atoms = herbrand_base(vocab, domain)
    if 2 ** len(atoms) > MAX_INTERPRETATIONS:
        raise InstanceTooLarge(
            f"{len(atoms)} ground atoms give 2^{len(atoms)} interpretations; the limit is 2^24")
    check = _compile(s, domain)
    pairs = {p: wpair(p) for p in vocab.names}

    if axiom is None:
        graphs = [None]
        rest = atoms
    else:
        if vocab.arity(axiom.relation) != 2:
            raise LogicError(f"{axiom.relation} is not binary")
        graphs = essential_graphs(n, axiom.d) if n else (DirectedGraph((), frozenset()),)
        rest = [a for a in atoms if a[0] != axiom.relation]

    total: Number = 0
    for g in graphs:
        base_true: set = set()
        base_w: Number = 1
        if g is not None:
            w, wb = pairs[axiom.relation]
            for a in atoms:
                if a[0] == axiom.relation:
                    on = a[1] in g.edges
                    if on:
                        base_true.add(a)
                    base_w *= w if on else wb
        for bits in product((False, True), repeat=len(rest)):
            truth = set(base_true)
            weight = base_w
            for atom, on in zip(rest, bits):
                w, wb = pairs[atom[0]]
                if on:
                    truth.add(atom)
                    weight *= w
                else:
                    weight *= wb
            if weight and check(truth, {}):
                total += weight
    return total
