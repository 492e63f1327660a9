"""Abstract syntax, parsing, printing and grounding for C2 sentences.

Formulas are immutable trees built from the node classes below.  Variables
are always named ``x`` and ``y``; other names in the input are renamed at
parse time.  Constants are the integers of the domain and never appear in
the input language.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

VARIABLES = ("x", "y")
RESERVED_PREFIX = "@"
COMPARATORS = ("=", "<=", ">=")


class LogicError(ValueError):
    """Base class for user-facing errors raised by the logic layer."""


class ParseError(LogicError):
    def __init__(self, message: str, pos: int | None = None, expected: Iterable[str] = ()):
        self.pos = pos
        self.expected = tuple(expected)
        detail = message
        if pos is not None:
            detail += f" at position {pos}"
        if self.expected:
            detail += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(detail)


class VocabularyError(LogicError):
    pass


# ---------------------------------------------------------------------------
# Vocabulary


@dataclass(frozen=True)
class Vocabulary:
    predicates: tuple[tuple[str, int], ...]
    distinguished: str | None = None

    def __post_init__(self):
        names = [p for p, _ in self.predicates]
        if len(set(names)) != len(names):
            raise VocabularyError(f"duplicate predicate names in {names}")
        for name, arity in self.predicates:
            if arity not in (0, 1, 2):
                raise VocabularyError(f"predicate {name} has arity {arity}; only 0, 1, 2 allowed")
        if self.distinguished is not None:
            if self.distinguished not in names:
                raise VocabularyError(f"distinguished relation {self.distinguished} not declared")
            if self.arity(self.distinguished) != 2:
                raise VocabularyError(f"distinguished relation {self.distinguished} must be binary")

    @classmethod
    def parse(cls, text: str, distinguished: str | None = None) -> "Vocabulary":
        """Parse ``"pred U/1 R/2"`` (the leading ``pred`` keyword is optional)."""
        items = text.split()
        if items and items[0] == "pred":
            items = items[1:]
        preds = []
        for item in items:
            m = re.fullmatch(r"([A-Za-z_][A-Za-z0-9_]*)/([0-9]+)", item)
            if not m:
                raise VocabularyError(f"bad predicate declaration {item!r}; use NAME/ARITY")
            preds.append((m.group(1), int(m.group(2))))
        return cls(tuple(preds), distinguished)

    def __contains__(self, name: str) -> bool:
        return any(p == name for p, _ in self.predicates)

    def __iter__(self):
        return iter(self.predicates)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(p for p, _ in self.predicates)

    def arity(self, name: str) -> int:
        for p, a in self.predicates:
            if p == name:
                return a
        raise VocabularyError(f"unknown predicate {name}")

    def of_arity(self, arity: int) -> tuple[str, ...]:
        return tuple(p for p, a in self.predicates if a == arity)

    def extend(self, extra: Iterable[tuple[str, int]]) -> "Vocabulary":
        return Vocabulary(self.predicates + tuple(extra), self.distinguished)

    def with_distinguished(self, name: str | None) -> "Vocabulary":
        return Vocabulary(self.predicates, name)

    def header(self) -> str:
        return "pred " + " ".join(f"{p}/{a}" for p, a in self.predicates)


# ---------------------------------------------------------------------------
# Formula nodes


@dataclass(frozen=True)
class Const:
    value: bool


TRUE = Const(True)
FALSE = Const(False)


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple = ()


@dataclass(frozen=True)
class Eq:
    left: Union[str, int]
    right: Union[str, int]


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    args: tuple


@dataclass(frozen=True)
class Or:
    args: tuple


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class CountExists:
    """``exists[cmp m] var. body`` -- the number of witnesses compares to ``m``."""

    var: str
    body: "Formula"
    cmp: str
    m: int

    def __post_init__(self):
        if self.cmp not in COMPARATORS:
            raise ValueError(f"bad comparator {self.cmp}")
        if self.m < 0:
            raise ValueError("counting threshold must be non-negative")


Formula = Union[Const, Atom, Eq, Not, And, Or, Implies, Iff, Forall, Exists, CountExists]
QUANTIFIERS = (Forall, Exists, CountExists)


def conj(*parts: Formula) -> Formula:
    """Conjunction with flattening and constant folding."""
    out = []
    for p in parts:
        if isinstance(p, And):
            out.extend(p.args)
        elif p == TRUE:
            continue
        elif p == FALSE:
            return FALSE
        else:
            out.append(p)
    if not out:
        return TRUE
    if len(out) == 1:
        return out[0]
    return And(tuple(out))


def disj(*parts: Formula) -> Formula:
    out = []
    for p in parts:
        if isinstance(p, Or):
            out.extend(p.args)
        elif p == FALSE:
            continue
        elif p == TRUE:
            return TRUE
        else:
            out.append(p)
    if not out:
        return FALSE
    if len(out) == 1:
        return out[0]
    return Or(tuple(out))


def neg(f: Formula) -> Formula:
    if isinstance(f, Const):
        return Const(not f.value)
    if isinstance(f, Not):
        return f.arg
    return Not(f)


def children(f: Formula) -> tuple:
    if isinstance(f, Not):
        return (f.arg,)
    if isinstance(f, (And, Or)):
        return f.args
    if isinstance(f, (Implies, Iff)):
        return (f.left, f.right)
    if isinstance(f, QUANTIFIERS):
        return (f.body,)
    return ()


def rebuild(f: Formula, kids: tuple) -> Formula:
    if isinstance(f, Not):
        return Not(kids[0])
    if isinstance(f, And):
        return And(tuple(kids))
    if isinstance(f, Or):
        return Or(tuple(kids))
    if isinstance(f, Implies):
        return Implies(*kids)
    if isinstance(f, Iff):
        return Iff(*kids)
    if isinstance(f, Forall):
        return Forall(f.var, kids[0])
    if isinstance(f, Exists):
        return Exists(f.var, kids[0])
    if isinstance(f, CountExists):
        return CountExists(f.var, kids[0], f.cmp, f.m)
    return f


def is_quantifier_free(f: Formula) -> bool:
    if isinstance(f, QUANTIFIERS):
        return False
    return all(is_quantifier_free(c) for c in children(f))


def free_vars(f: Formula) -> frozenset:
    if isinstance(f, Atom):
        return frozenset(a for a in f.args if isinstance(a, str))
    if isinstance(f, Eq):
        return frozenset(a for a in (f.left, f.right) if isinstance(a, str))
    if isinstance(f, QUANTIFIERS):
        return free_vars(f.body) - {f.var}
    out = frozenset()
    for c in children(f):
        out |= free_vars(c)
    return out


def variables(f: Formula) -> list[str]:
    """All variable names, bound or free, in order of first appearance."""
    seen: list[str] = []

    def visit(g):
        names = []
        if isinstance(g, Atom):
            names = [a for a in g.args if isinstance(a, str)]
        elif isinstance(g, Eq):
            names = [a for a in (g.left, g.right) if isinstance(a, str)]
        elif isinstance(g, QUANTIFIERS):
            names = [g.var]
        for v in names:
            if v not in seen:
                seen.append(v)
        for c in children(g):
            visit(c)

    visit(f)
    return seen


def predicates_of(f: Formula) -> set[str]:
    if isinstance(f, Atom):
        return {f.pred}
    out: set[str] = set()
    for c in children(f):
        out |= predicates_of(c)
    return out


def rename(f: Formula, mapping: Mapping[str, str]) -> Formula:
    """Rename variables everywhere (bound and free) according to ``mapping``."""
    if isinstance(f, Atom):
        return Atom(f.pred, tuple(mapping.get(a, a) if isinstance(a, str) else a for a in f.args))
    if isinstance(f, Eq):
        return Eq(*(mapping.get(a, a) if isinstance(a, str) else a for a in (f.left, f.right)))
    if isinstance(f, Forall):
        return Forall(mapping.get(f.var, f.var), rename(f.body, mapping))
    if isinstance(f, Exists):
        return Exists(mapping.get(f.var, f.var), rename(f.body, mapping))
    if isinstance(f, CountExists):
        return CountExists(mapping.get(f.var, f.var), rename(f.body, mapping), f.cmp, f.m)
    kids = children(f)
    if not kids:
        return f
    return rebuild(f, tuple(rename(c, mapping) for c in kids))


def substitute(f: Formula, binding: Mapping[str, object]) -> Formula:
    """Replace free occurrences of variables by terms (variables or constants)."""
    if isinstance(f, Atom):
        return Atom(f.pred, tuple(binding.get(a, a) if isinstance(a, str) else a for a in f.args))
    if isinstance(f, Eq):
        return Eq(*(binding.get(a, a) if isinstance(a, str) else a for a in (f.left, f.right)))
    if isinstance(f, QUANTIFIERS):
        inner = {k: v for k, v in binding.items() if k != f.var}
        return rebuild(f, (substitute(f.body, inner),))
    kids = children(f)
    if not kids:
        return f
    return rebuild(f, tuple(substitute(c, binding) for c in kids))


def simplify(f: Formula) -> Formula:
    """Constant folding and trivial equality resolution; structure otherwise kept."""
    if isinstance(f, Eq):
        if f.left == f.right:
            return TRUE
        if isinstance(f.left, int) and isinstance(f.right, int):
            return FALSE
        return f
    if isinstance(f, (Atom, Const)):
        return f
    if isinstance(f, Not):
        return neg(simplify(f.arg))
    if isinstance(f, And):
        return conj(*(simplify(a) for a in f.args))
    if isinstance(f, Or):
        return disj(*(simplify(a) for a in f.args))
    if isinstance(f, Implies):
        return disj(neg(simplify(f.left)), simplify(f.right))
    if isinstance(f, Iff):
        a, b = simplify(f.left), simplify(f.right)
        if isinstance(a, Const):
            return b if a.value else neg(b)
        if isinstance(b, Const):
            return a if b.value else neg(a)
        return Iff(a, b)
    if isinstance(f, QUANTIFIERS):
        body = simplify(f.body)
        if isinstance(body, Const) and not isinstance(f, CountExists):
            # the domain may be empty: forall-true is true, exists-false is false,
            # but forall-false / exists-true depend on emptiness
            if isinstance(f, Forall) and body.value:
                return TRUE
            if isinstance(f, Exists) and not body.value:
                return FALSE
        return rebuild(f, (body,))
    return f


# ---------------------------------------------------------------------------
# Printing

_PRIMARY = (Const, Atom, Eq)


def to_text(f: Formula) -> str:
    """Render a formula in the input grammar; ``parse_sentence`` inverts it."""
    if isinstance(f, Const):
        return "true" if f.value else "false"
    if isinstance(f, Atom):
        return f"{f.pred}({','.join(str(a) for a in f.args)})"
    if isinstance(f, Eq):
        return f"{f.left}={f.right}"
    if isinstance(f, Not):
        if isinstance(f.arg, Eq):
            return f"{f.arg.left}!={f.arg.right}"
        return "~" + _wrap(f.arg, allow_not=True)
    if isinstance(f, And):
        return " & ".join(_wrap(a) for a in f.args)
    if isinstance(f, Or):
        return " | ".join(_wrap(a) for a in f.args)
    if isinstance(f, Implies):
        return f"{_wrap(f.left)} -> {_wrap(f.right)}"
    if isinstance(f, Iff):
        return f"{_wrap(f.left)} <-> {_wrap(f.right)}"
    if isinstance(f, Forall):
        return f"forall {f.var}. {to_text(f.body)}"
    if isinstance(f, Exists):
        return f"exists {f.var}. {to_text(f.body)}"
    if isinstance(f, CountExists):
        return f"exists[{f.cmp}{f.m}] {f.var}. {to_text(f.body)}"
    raise TypeError(f"not a formula: {f!r}")


def _wrap(f: Formula, allow_not: bool = False) -> str:
    if isinstance(f, _PRIMARY):
        return to_text(f)
    if isinstance(f, Not) and (allow_not or True) and isinstance(f.arg, _PRIMARY + (Not,)):
        return to_text(f)
    return f"({to_text(f)})"


# ---------------------------------------------------------------------------
# Parsing

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<count>exists\[(?P<cmp><=|>=|=)(?P<m>[0-9]+)\])"
    r"|(?P<op><->|->|!=|[=&|~(),.])"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r")"
)
_KEYWORDS = {"forall", "exists", "true", "false", "pred"}


@dataclass
class _Tok:
    kind: str  # 'op', 'ident', 'count', 'kw', 'end'
    text: str
    pos: int
    cmp: str = ""
    m: int = 0


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastgroup) if m.lastgroup else pos
        if m.group("count"):
            toks.append(_Tok("count", m.group("count"), start, m.group("cmp"), int(m.group("m"))))
        elif m.group("op"):
            toks.append(_Tok("op", m.group("op"), start))
        else:
            word = m.group("ident")
            toks.append(_Tok("kw" if word in _KEYWORDS else "ident", word, start))
        pos = m.end()
    toks.append(_Tok("end", "<end>", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, vocab: Vocabulary):
        self.toks = _tokenize(text)
        self.i = 0
        self.vocab = vocab

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def accept(self, text: str) -> bool:
        t = self.peek()
        if t.kind in ("op", "kw") and t.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> None:
        if not self.accept(text):
            t = self.peek()
            raise ParseError(f"unexpected {t.text!r}", t.pos, [text])

    def formula(self) -> Formula:
        left = self.implication()
        while self.accept("<->"):
            left = Iff(left, self.implication())
        return left

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.accept("->"):
            return Implies(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        parts = [self.conjunction()]
        while self.accept("|"):
            parts.append(self.conjunction())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def conjunction(self) -> Formula:
        parts = [self.unary()]
        while self.accept("&"):
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def unary(self) -> Formula:
        t = self.peek()
        if self.accept("~"):
            return Not(self.unary())
        if t.kind == "kw" and t.text in ("forall", "exists") or t.kind == "count":
            self.take()
            var = self.variable()
            self.accept(".")
            body = self.formula()
            if t.kind == "count":
                return CountExists(var, body, t.cmp, t.m)
            return Forall(var, body) if t.text == "forall" else Exists(var, body)
        return self.primary()

    def variable(self) -> str:
        t = self.take()
        if t.kind != "ident":
            raise ParseError(f"unexpected {t.text!r}", t.pos, ["variable"])
        return t.text

    def primary(self) -> Formula:
        t = self.peek()
        if self.accept("("):
            f = self.formula()
            self.expect(")")
            return f
        if self.accept("true"):
            return TRUE
        if self.accept("false"):
            return FALSE
        if t.kind != "ident":
            raise ParseError(f"unexpected {t.text!r}", t.pos,
                             ["(", "~", "forall", "exists", "true", "false", "atom"])
        self.take()
        nxt = self.peek()
        if nxt.kind == "op" and nxt.text == "(":
            return self.atom(t)
        if nxt.kind == "op" and nxt.text in ("=", "!="):
            self.take()
            right = self.variable()
            eq = Eq(t.text, right)
            return Not(eq) if nxt.text == "!=" else eq
        raise ParseError(f"unexpected {nxt.text!r} after {t.text!r}", nxt.pos, ["(", "=", "!="])

    def atom(self, name: _Tok) -> Formula:
        self.expect("(")
        args: list[str] = []
        if not self.accept(")"):
            args.append(self.variable())
            while self.accept(","):
                args.append(self.variable())
            self.expect(")")
        if name.text not in self.vocab:
            raise VocabularyError(f"unknown predicate {name.text} at position {name.pos}")
        arity = self.vocab.arity(name.text)
        if arity != len(args):
            raise VocabularyError(
                f"predicate {name.text}/{arity} applied to {len(args)} arguments at position {name.pos}")
        return Atom(name.text, tuple(args))


def parse_formula(text: str, vocab: Vocabulary) -> Formula:
    """Parse ``text`` without any closure or variable-count checks."""
    p = _Parser(text, vocab)
    f = p.formula()
    t = p.peek()
    if t.kind != "end":
        raise ParseError(f"unexpected {t.text!r}", t.pos, ["<end>", "&", "|", "->", "<->"])
    return f


def canonical_variables(f: Formula) -> Formula:
    names = variables(f)
    if len(names) > 2:
        raise ParseError(f"more than two variables: {', '.join(names)}")
    mapping = {v: v for v in names if v in VARIABLES}
    spare = [v for v in VARIABLES if v not in mapping]
    for v in names:
        if v not in mapping:
            mapping[v] = spare.pop(0)
    return rename(f, mapping)


def parse_sentence(text: str, vocab: Vocabulary) -> Formula:
    """Parse a closed C2 sentence over ``vocab``."""
    f = canonical_variables(parse_formula(text, vocab))
    fv = free_vars(f)
    if fv:
        raise ParseError(f"free variables {', '.join(sorted(fv))}; sentences must be closed")
    return f


def parse_problem(text: str, vocab: Vocabulary | None = None) -> tuple[Vocabulary, Formula]:
    """Parse an optional ``pred ...`` header line followed by one sentence."""
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.strip().startswith("#")]
    declared: list[tuple[str, int]] = list(vocab.predicates) if vocab else []
    body = []
    for ln in lines:
        if ln.strip().startswith("pred ") or ln.strip() == "pred":
            for p in Vocabulary.parse(ln).predicates:
                if p not in declared:
                    declared.append(p)
        else:
            body.append(ln)
    v = Vocabulary(tuple(declared), vocab.distinguished if vocab else None)
    return v, parse_sentence("\n".join(body) or "true", v)


# ---------------------------------------------------------------------------
# Interpretations and grounding


@dataclass(frozen=True)
class Interpretation:
    """A total truth assignment over the Herbrand base of ``vocab`` on ``domain``.

    Ground atoms not listed in ``true_atoms`` are false.
    """

    vocab: Vocabulary
    domain: tuple[int, ...]
    true_atoms: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        dom = set(self.domain)
        for pred, args in self.true_atoms:
            if self.vocab.arity(pred) != len(args) or not set(args) <= dom:
                raise VocabularyError(f"ground atom {pred}{args} not in the Herbrand base")

    @classmethod
    def over(cls, vocab: Vocabulary, n: int, true_atoms: Iterable = ()) -> "Interpretation":
        return cls(vocab, tuple(range(1, n + 1)), frozenset((p, tuple(a)) for p, a in true_atoms))

    @property
    def domain_size(self) -> int:
        return len(self.domain)

    def holds(self, pred: str, args: tuple = ()) -> bool:
        return (pred, tuple(args)) in self.true_atoms

    def herbrand_base(self) -> list[tuple[str, tuple]]:
        return herbrand_base(self.vocab, self.domain)


def herbrand_base(vocab: Vocabulary, domain: Iterable[int]) -> list[tuple[str, tuple]]:
    """Ground atoms sorted by (predicate, tuple)."""
    dom = sorted(domain)
    atoms = []
    for pred, arity in sorted(vocab.predicates):
        if arity == 0:
            atoms.append((pred, ()))
        elif arity == 1:
            atoms.extend((pred, (c,)) for c in dom)
        else:
            atoms.extend((pred, (c, d)) for c in dom for d in dom)
    return atoms


def restrict(omega: Interpretation, subset: Iterable[int]) -> Interpretation:
    """The interpretation on ``subset`` induced by ``omega``."""
    sub = set(subset)
    if not sub <= set(omega.domain):
        raise ValueError("subset is not contained in the domain")
    kept = frozenset((p, a) for p, a in omega.true_atoms if set(a) <= sub)
    return Interpretation(omega.vocab, tuple(sorted(sub)), kept)


@dataclass(frozen=True)
class DirectedGraph:
    nodes: tuple[int, ...]
    edges: frozenset

    def parents(self, v: int) -> frozenset:
        return frozenset(a for a, b in self.edges if b == v)

    def children(self, v: int) -> frozenset:
        return frozenset(b for a, b in self.edges if a == v)


def project_relation(omega: Interpretation, rel: str) -> DirectedGraph:
    if omega.vocab.arity(rel) != 2:
        raise VocabularyError(f"{rel} is not binary")
    return DirectedGraph(omega.domain, frozenset(a for p, a in omega.true_atoms if p == rel))


def ground(phi: Formula, binding: Mapping[str, int]) -> Formula:
    """Instantiate a quantifier-free formula; equalities become constants."""
    if not is_quantifier_free(phi):
        raise LogicError("ground expects a quantifier-free formula")
    missing = free_vars(phi) - set(binding)
    if missing:
        raise LogicError(f"unbound variables {', '.join(sorted(missing))}")

    def go(f):
        if isinstance(f, Atom):
            return Atom(f.pred, tuple(binding[a] if isinstance(a, str) else a for a in f.args))
        if isinstance(f, Eq):
            left = binding[f.left] if isinstance(f.left, str) else f.left
            right = binding[f.right] if isinstance(f.right, str) else f.right
            return Const(left == right)
        kids = children(f)
        if not kids:
            return f
        out = rebuild(f, tuple(go(c) for c in kids))
        if isinstance(out, Not) and isinstance(out.arg, Const):
            return Const(not out.arg.value)
        return out

    return go(phi)


def evaluate_ground(f: Formula, truth) -> bool:
    """Evaluate a ground formula; ``truth(pred, args)`` gives atom values."""
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Atom):
        return bool(truth(f.pred, f.args))
    if isinstance(f, Eq):
        return f.left == f.right
    if isinstance(f, Not):
        return not evaluate_ground(f.arg, truth)
    if isinstance(f, And):
        return all(evaluate_ground(a, truth) for a in f.args)
    if isinstance(f, Or):
        return any(evaluate_ground(a, truth) for a in f.args)
    if isinstance(f, Implies):
        return (not evaluate_ground(f.left, truth)) or evaluate_ground(f.right, truth)
    if isinstance(f, Iff):
        return evaluate_ground(f.left, truth) == evaluate_ground(f.right, truth)
    raise LogicError("evaluate_ground expects a ground quantifier-free formula")
