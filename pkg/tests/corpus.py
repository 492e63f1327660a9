"""Seeded random C2 sentences over {U/1, R/2} for oracle comparisons."""
from __future__ import annotations

import random
import re

from essdag.logic import Vocabulary

VOCAB = Vocabulary.parse("pred U/1 R/2")
R_ONLY = Vocabulary.parse("pred R/2")

ATOMS_XY = ["U(x)", "U(y)", "R(x,y)", "R(y,x)", "R(x,x)", "x=y"]
ATOMS_X = ["U(x)", "R(x,x)"]
OPS = ["&", "|", "->", "<->"]
CMPS = ["=", "<=", ">="]


def _qf(rng: random.Random, atoms: list[str], depth: int) -> str:
    if depth == 0 or rng.random() < 0.3:
        a = rng.choice(atoms)
        return f"~{a}" if rng.random() < 0.4 else a
    op = rng.choice(OPS)
    return f"({_qf(rng, atoms, depth - 1)} {op} {_qf(rng, atoms, depth - 1)})"


def _count(rng: random.Random) -> str:
    return f"exists[{rng.choice(CMPS)}{rng.randint(0, 2)}]"


def _block(rng: random.Random, kind: str) -> str:
    qxy = _qf(rng, ATOMS_XY, 2)
    qx = _qf(rng, ATOMS_X, 1)
    if kind == "universal":
        return f"forall x forall y. {qxy}"
    if kind == "forall-exists":
        return f"forall x exists y. {qxy}"
    if kind == "forall-count":
        return f"forall x {_count(rng)} y. {qxy}"
    if kind == "exists":
        return rng.choice([f"exists x. {qx}", f"exists x forall y. {qxy}", f"exists x exists y. {qxy}"])
    if kind == "count-unary":
        return f"{_count(rng)} x. {qx}"
    if kind == "guarded":
        inner = rng.choice(["exists", _count(rng)])
        return f"forall x ({qx} -> {inner} y. {qxy})"
    if kind == "iff":
        return f"forall x (U(x) <-> {_count(rng)} y. {rng.choice(['R(x,y)', 'R(y,x)'])})"
    raise ValueError(kind)


KINDS = ["universal", "forall-exists", "forall-count", "exists", "count-unary", "guarded", "iff"]
EXISTS_KINDS = ["forall-exists", "exists", "guarded"]


def sentences(count: int, seed: int, kinds: list[str] = KINDS, pairs: float = 0.25) -> list[str]:
    """``count`` distinct sentences, cycling through ``kinds``; some are conjunctions of two blocks."""
    rng = random.Random(seed)
    out: list[str] = []
    seen = set()
    i = 0
    while len(out) < count:
        kind = kinds[i % len(kinds)]
        i += 1
        text = _block(rng, kind)
        if rng.random() < pairs:
            other = _block(rng, rng.choice(["universal", "forall-exists", "exists", "count-unary"]))
            text = f"({text}) & ({other})"
        if text not in seen:
            seen.add(text)
            out.append(text)
    return out


def existential_sentences(count: int, seed: int) -> list[str]:
    """Sentences with at least one plain (non-counting) existential quantifier."""
    pool = sentences(4 * count, seed, EXISTS_KINDS, pairs=0.2)
    return [t for t in pool if re.search(r"exists [xy]", t)][:count]
