"""Counting models of forall x y. phi(x,y) & EssentialDAG(R, d).

Elements carry extended 1-types (i, t): a live 1-type i of phi together
with a vector t counting the element's R-parents per base 1-type.  Models
are built by repeatedly adding a layer of sinks on top of a smaller
essential DAG; inclusion-exclusion over the size of the sink layer gives
the count.
"""
from __future__ import annotations

from typing import Mapping, Sequence

from .arith import Number, binomial, bounded_vectors, factorial
from .cells import CellTable, alpha, enumerate_T
from .fo2 import closed_form_value


class CountingInvariantError(AssertionError):
    """An internal invariant of the sink recursion was violated."""


class EssentialContext:
    """Weight matrices and extended types for one (matrix, weights, d)."""

    def __init__(self, cells: CellTable, weights: Mapping, d: int):
        if cells.relation is None:
            raise ValueError("the cell table needs a distinguished relation")
        if d < 0:
            raise ValueError("indegree bound must be non-negative")
        self.cells = cells
        self.u = cells.u
        self.d = d
        self.w = cells.type_weights(weights)
        self.c, self.dm = cells.cd_matrices(weights)
        self.T = enumerate_T(self.u, d)
        self.ext = [(i, t) for i in range(self.u) for t in self.T]
        self.ext_index = {e: n for n, e in enumerate(self.ext)}

    def as_mapping(self, k: Sequence[int]) -> dict[tuple, int]:
        return {e: c for e, c in zip(self.ext, k) if c}


def g_count(k2: Mapping[tuple, int], t: Sequence[int], u: int) -> int:
    """Admissible parent sets with profile t for a new sink above the DAG counted by k2.

    All C(alpha_i, t_i) choices, minus one per existing node of type
    (i, t - e_i): picking that node together with its own parents would
    leave the new edge unprotected.
    """
    a = alpha(k2, u)
    value = 1
    for ai, ti in zip(a, t):
        value *= binomial(ai, ti)
    for i, ti in enumerate(t):
        if ti > 0:
            prev = tuple(tj - (1 if j == i else 0) for j, tj in enumerate(t))
            value -= k2.get((i, prev), 0)
    return value


def extension_count_N(ctx: EssentialContext, k1: Mapping[tuple, int], k2: Mapping[tuple, int]) -> Number:
    """Weighted number of ways to attach the sinks k1 to a fixed model of k2."""
    a = alpha(k2, ctx.u)
    value: Number = 1
    for (j, t), cnt in k1.items():
        if not cnt:
            continue
        base = g_count(k2, t, ctx.u)
        for i in range(ctx.u):
            base *= ctx.c[i][j] ** t[i] * ctx.dm[i][j] ** (a[i] - t[i]) if a[i] >= t[i] else 0
        value *= base ** cnt
        if not value:
            return 0
    return value


def sink_layer_wfomc(ctx: EssentialContext, k1: Mapping[tuple, int]) -> Number:
    """WFOMC of phi & ~R(x,y) on the sink layer; parent labels are free."""
    keys = [e for e, c in k1.items() if c]
    k = [k1[e] for e in keys]
    w = [ctx.w[e[0]] for e in keys]
    r = [[ctx.dm[a[0]][b[0]] for b in keys] for a in keys]
    return closed_form_value(k, w, r)


def fomc_sink_restricted(ctx: EssentialContext, m: int, k: Sequence[int], memo: Mapping[tuple, Number]) -> Number:
    """Weighted count of models on k whose elements with the first m labels are sinks.

    ``memo`` must hold the full count for every vector below k of size |k| - m.
    """
    total: Number = 0
    for k1 in bounded_vectors(k):
        if sum(k1) != m:
            continue
        k2 = tuple(a - b for a, b in zip(k, k1))
        rest = memo.get(k2, 0)
        if not rest:
            continue
        m1, m2 = ctx.as_mapping(k1), ctx.as_mapping(k2)
        _check_reachable(m2, m1, ctx.u)
        n_ext = extension_count_N(ctx, m1, m2)
        if not n_ext:
            continue
        total += n_ext * sink_layer_wfomc(ctx, m1) * rest
    return total


def _check_reachable(k2: Mapping[tuple, int], k1: Mapping[tuple, int], u: int) -> None:
    for (_j, t), cnt in k1.items():
        if cnt and g_count(k2, t, u) < 0:
            raise CountingInvariantError(f"negative parent-set count for t={t} over {dict(k2)}")


def fomc_essential(ctx: EssentialContext, k: Sequence[int], memo: dict | None = None) -> Number:
    """Count for one extended cardinality vector, filling ``memo`` bottom-up in lexicographic order."""
    memo = {} if memo is None else memo
    zero = tuple(0 for _ in k)
    memo.setdefault(zero, 1)
    for p in bounded_vectors(k):
        if p in memo:
            continue
        size = sum(p)
        value: Number = 0
        for l in range(size):
            m = size - l
            sign = 1 if (m + 1) % 2 == 0 else -1
            value += sign * binomial(size, l) * fomc_sink_restricted(ctx, m, p, memo)
        memo[p] = value
    return memo[tuple(k)]


def fomc_essential_total(ctx: EssentialContext, n: int) -> Number:
    """Sum of fomc_essential over all extended vectors of size n (shared memo)."""
    from .arith import compositions

    memo: dict = {}
    return sum(fomc_essential(ctx, k, memo) for k in compositions(n, len(ctx.ext)))


# ---------------------------------------------------------------------------
# Sparse forward evaluation


def _merge(key: tuple, add: Sequence[tuple]) -> tuple:
    out = dict(key)
    for e, c in add:
        out[e] = out.get(e, 0) + c
    return tuple(sorted(out.items()))


def _parent_profiles(a: Sequence[int], d: int):
    """All t <= a componentwise with |t| <= d."""
    def rec(i, left):
        if i == len(a):
            yield ()
            return
        for ti in range(min(a[i], left) + 1):
            for rest in rec(i + 1, left - ti):
                yield (ti,) + rest
    return rec(0, d)


def essential_levels(ctx: EssentialContext, n: int) -> dict[tuple, Number]:
    """All nonzero counts for extended vectors of size n, as sparse sorted keys."""
    u, d = ctx.u, ctx.d
    c, dm, w = ctx.c, ctx.dm, ctx.w
    levels: list[dict[tuple, Number]] = [dict() for _ in range(n + 1)]
    levels[0][()] = 1
    for s in range(n):
        for key, val in levels[s].items():
            if not val:
                continue
            k2 = dict(key)
            a = alpha(k2, u)
            cands = []
            for t in _parent_profiles(a, d):
                g = g_count(k2, t, u)
                if g < 0:
                    raise CountingInvariantError(f"negative parent-set count for t={t} over {k2}")
                if g == 0:
                    continue
                for j in range(u):
                    h = g * w[j]
                    for i in range(u):
                        if a[i]:
                            h *= c[i][j] ** t[i] * dm[i][j] ** (a[i] - t[i])
                    if h:
                        cands.append(((j, t), j, h))
            _extend(levels, s, n, key, val, cands, dm)
    return levels[n]


def _extend(levels, s, n, key, val, cands, dm):
    """Add every nonempty sink multiset drawn from ``cands`` to the levels above s."""
    limit = n - s
    chosen: list[tuple] = []

    def rec(start: int, m: int, factor: Number, denom: int):
        for idx in range(start, len(cands)):
            e, j, h = cands[idx]
            cross = h
            for _e2, j2, c2 in chosen:
                cross *= dm[j][j2] ** c2
            if not cross:
                continue
            f = factor
            for cnt in range(1, limit - m + 1):
                # the cnt-th copy couples with the previous copies of the same type
                f = f * cross * dm[j][j] ** (cnt - 1)
                if not f:
                    break
                mm = m + cnt
                dd = denom * factorial(cnt)
                sign = 1 if mm % 2 == 1 else -1
                term = sign * binomial(s + mm, mm) * (factorial(mm) // dd) * f * val
                nk = _merge(key, [(e2, c2) for e2, _j2, c2 in chosen] + [(e, cnt)])
                target = levels[s + mm]
                target[nk] = target.get(nk, 0) + term
                if mm < limit:
                    chosen.append((e, j, cnt))
                    rec(idx + 1, mm, f, dd)
                    chosen.pop()

    rec(0, 0, 1, 1)


def essential_grouped(cells: CellTable, weights: Mapping, d: int, n: int,
                      tracked: Sequence[str] = ()) -> dict[tuple, Number]:
    """Sum over all extended vectors of size n, grouped by tracked unary counts."""
    marks = [tuple(int(cells.has_pred(i, p)) for p in tracked) for i in range(cells.u)]
    if n == 0:
        return {tuple(0 for _ in tracked): 1}
    ctx = EssentialContext(cells, weights, d)
    out: dict[tuple, Number] = {}
    for key, val in essential_levels(ctx, n).items():
        if not val:
            continue
        sig = [0] * len(tracked)
        for (i, _t), cnt in key:
            for q, mark in enumerate(marks[i]):
                sig[q] += mark * cnt
        sig_t = tuple(sig)
        out[sig_t] = out.get(sig_t, 0) + val
    return {k: v for k, v in out.items() if v}
