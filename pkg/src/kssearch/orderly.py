"""Orderly enumeration of canonical adjacency matrices.

A labelling is canonical when its upper-triangle code is lexicographically
greatest over all relabelings.  Enumeration grows canonical matrices one
column at a time, discarding non-canonical extensions immediately; with the
square-free and connected filters this yields exactly one representative per
isomorphism class of connected square-free graphs.

Connected graphs admit a strong search restriction: every prefix of a
canonical matrix of a connected graph is connected, so candidate vertices in
the canonicity search may be limited to neighbours of the placed ones.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .graphs import (
    Graph,
    code_from_hex,
    code_to_hex,
    encode_upper_triangle,
    graph_from_code,
    is_connected,
)

DEFAULT_NODE_LIMIT = 5_000_000
ORACLE_MAX_N = 7


class CanonicalBudgetExceeded(RuntimeError):
    """Canonical-labelling branch-and-bound hit its node limit."""


@dataclass(frozen=True, slots=True)
class Filters:
    """Hereditary filters applied during enumeration."""

    square_free: bool = True
    connected: bool = True


def _identity_columns(n: int, rows) -> list[int]:
    """Per-column code values of the identity labelling; bit (0,j) is the MSB."""
    cols = [0] * n
    for d in range(1, n):
        rd = rows[d]
        c = 0
        for i in range(d):
            c = c << 1 | (rd >> i & 1)
        cols[d] = c
    return cols


def _spread_rows(n: int, rows, width: int) -> list[int]:
    """Adjacency rows re-spread so vertex u's bit sits at position u*width.

    All per-vertex partial column values then live in one integer: appending
    a column bit to every value at once is a single shift-and-or, and
    backtracking is free because ints are immutable.
    """
    out = [0] * n
    for w in range(n):
        rw = rows[w]
        s = 0
        while rw:
            b = rw & -rw
            rw ^= b
            s |= 1 << ((b.bit_length() - 1) * width)
        out[w] = s
    return out


def _is_canonical_rows(
    n: int, rows, connected: bool, cols: list[int] | None = None
) -> bool:
    if n <= 2:
        return True
    if cols is None:
        cols = _identity_columns(n, rows)
    width = n
    fmask = (1 << width) - 1
    spread = _spread_rows(n, rows, width)
    full = (1 << n) - 1
    restrict = connected

    def rec(depth: int, used: int, frontier: int, packed: int) -> bool:
        if depth == n:
            return True
        target = cols[depth]
        cand = (frontier if (restrict and depth) else full) & ~used
        eqs = []
        m = cand
        while m:
            b = m & -m
            m ^= b
            w = b.bit_length() - 1
            cv = packed >> w * width & fmask
            if cv > target:
                return False
            if cv == target:
                eqs.append(w)
        for w in eqs:
            if not rec(depth + 1, used | 1 << w, frontier | rows[w], packed << 1 | spread[w]):
                return False
        return True

    return rec(0, 0, 0, 0)


def is_canonical(g: Graph, connected: bool | None = None) -> bool:
    """Exact check that no relabeling yields a strictly greater code.

    Branch-and-bound over partial placements: a branch is pruned as soon as
    its partial code drops below the identity's, and the whole search aborts
    the moment any partial code exceeds it.
    """
    if connected is None:
        connected = is_connected(g)
    return _is_canonical_rows(g.n, g.rows, connected)


def canonical_label(g: Graph, node_limit: int = DEFAULT_NODE_LIMIT) -> Graph:
    """The relabeling of g with the greatest code.

    Two graphs are isomorphic iff their canonical labels have equal codes.
    Raises :class:`CanonicalBudgetExceeded` when the search tree outgrows
    ``node_limit`` nodes.
    """
    n = g.n
    if n == 1:
        return g
    rows = g.rows
    restrict = is_connected(g)
    full = (1 << n) - 1
    width = n
    fmask = (1 << width) - 1
    spread = _spread_rows(n, rows, width)
    best_cols = [-1] * n
    best_cols[0] = 0
    best_perm: list[int] | None = None
    perm = [0] * n
    nodes = 0

    def rec(depth: int, used: int, frontier: int, packed: int) -> None:
        nonlocal nodes, best_perm
        nodes += 1
        if nodes > node_limit:
            raise CanonicalBudgetExceeded(
                f"canonical_label exceeded {node_limit} nodes on n={n}"
            )
        if depth == n:
            best_perm = perm.copy()
            return
        cand = (frontier if (restrict and depth) else full) & ~used
        cands = []
        m = cand
        while m:
            b = m & -m
            m ^= b
            w = b.bit_length() - 1
            cands.append((-(packed >> w * width & fmask), w))
        cands.sort()
        for negcv, w in cands:
            cv = -negcv
            t = best_cols[depth]
            if t >= 0 and cv < t:
                break
            if cv > t:
                best_cols[depth] = cv
                for d in range(depth + 1, n):
                    best_cols[d] = -1
            perm[depth] = w
            rec(depth + 1, used | 1 << w, frontier | rows[w], packed << 1 | spread[w])

    rec(0, 0, 0, 0)
    assert best_perm is not None
    new_rows = [0] * n
    for i in range(n):
        ri = rows[best_perm[i]]
        r = 0
        for j in range(n):
            if ri >> best_perm[j] & 1:
                r |= 1 << j
        new_rows[i] = r
    return Graph(n, tuple(new_rows))


def canonical_code(g: Graph, node_limit: int = DEFAULT_NODE_LIMIT) -> str:
    return encode_upper_triangle(canonical_label(g, node_limit))


# ---------------------------------------------------------------------------
# Matrix extension

def extend(prefix: Graph, filters: Filters = Filters()) -> list[Graph]:
    """All canonical one-vertex extensions of a canonical prefix.

    Candidate last columns are tried in descending code order and filtered:
    square-free incrementally (the new vertex must close no 4-cycle, i.e. its
    neighbours must have pairwise disjoint neighbourhoods), connected-prefix
    rule (empty column discarded), canonicity last.
    """
    k = prefix.n
    rows = prefix.rows
    if k >= 64:
        return []
    conf = [0] * k
    if filters.square_free:
        for i in range(k):
            ri = rows[i]
            for j in range(i + 1, k):
                if ri & rows[j]:
                    conf[i] |= 1 << j
                    conf[j] |= 1 << i
    out = []
    connected = filters.connected
    prefix_cols = _identity_columns(k, rows)

    def emit(S: int) -> None:
        if S == 0 and connected and k >= 1:
            return
        child_rows = tuple(
            rows[i] | (1 << k) if S >> i & 1 else rows[i] for i in range(k)
        ) + (S,)
        newcol = 0
        for i in range(k):
            newcol = newcol << 1 | (S >> i & 1)
        conn = True if connected else is_connected(Graph._unchecked(k + 1, child_rows))
        if _is_canonical_rows(k + 1, child_rows, conn, prefix_cols + [newcol]):
            out.append(Graph._unchecked(k + 1, child_rows))

    def dfs(v: int, S: int, allowed: int) -> None:
        if v == k:
            emit(S)
            return
        if allowed >> v & 1:
            dfs(v + 1, S | (1 << v), allowed & ~conf[v])
        dfs(v + 1, S, allowed)

    dfs(0, 0, (1 << k) - 1)
    return out


# ---------------------------------------------------------------------------
# Subtree tickets (parallel partitioning / checkpointing)

@dataclass(frozen=True, slots=True)
class SubtreeTicket:
    """One independent DFS subtree, identified by its canonical prefix."""

    prefix: Graph

    @property
    def ticket_id(self) -> str:
        code = encode_upper_triangle(self.prefix)
        return f"{self.prefix.n}:{code_to_hex(code) or '0'}"

    @staticmethod
    def from_id(text: str) -> "SubtreeTicket":
        head, _, hexpart = text.partition(":")
        n = int(head)
        if n == 1:
            return SubtreeTicket(Graph(1, (0,)))
        return SubtreeTicket(graph_from_code(n, code_from_hex(n, hexpart)))


def list_tickets(depth: int, filters: Filters = Filters()) -> list[SubtreeTicket]:
    """Tickets at a fixed split depth; they partition the enumeration exactly."""
    return [SubtreeTicket(g) for g in enumerate_graphs(depth, filters)]


def enumerate_graphs(
    n_target: int,
    filters: Filters = Filters(),
    ticket: SubtreeTicket | None = None,
) -> Iterator[Graph]:
    """Stream one canonical representative per isomorphism class at n_target.

    Deterministic DFS order (descending candidate column code).  With a
    ticket, only that subtree is walked.
    """
    if not 1 <= n_target <= 64:
        raise ValueError("n_target outside 1..64")
    if ticket is None:
        start = Graph(1, (0,))
    else:
        start = ticket.prefix
        if start.n > n_target:
            raise ValueError("ticket deeper than enumeration target")

    def walk(g: Graph) -> Iterator[Graph]:
        if g.n == n_target:
            yield g
            return
        for child in extend(g, filters):
            yield from walk(child)

    yield from walk(start)


# ---------------------------------------------------------------------------
# Brute-force oracle (independent of the branch-and-bound machinery)

def brute_force_classes(
    n: int, square_free: bool = True, connected: bool = True
) -> list[Graph]:
    """One representative per isomorphism class by exhaustive enumeration.

    Walks all 2^(n(n-1)/2) labelled graphs as code integers, filters with
    vectorised bitmask arithmetic, then sweeps the surviving codes in
    descending order: the first code of each orbit is the orbit maximum, and
    its whole orbit (all n! relabelings, computed exhaustively) is marked
    seen.  No branch-and-bound involved.  Representatives come back in
    descending code order.
    """
    if not 1 <= n <= ORACLE_MAX_N:
        raise ValueError(f"oracle limited to n <= {ORACLE_MAX_N}")
    if n == 1:
        return [Graph(1, (0,))]
    L = n * (n - 1) // 2
    pairs = [(i, j) for j in range(1, n) for i in range(j)]
    # pair k occupies bit L-1-k, so the integer orders exactly like the code
    shift = {p: L - 1 - k for k, p in enumerate(pairs)}
    survivors = []
    chunk = 1 << 16
    total = 1 << L
    for start in range(0, total, chunk):
        codes = np.arange(start, min(start + chunk, total), dtype=np.int64)
        rows = np.zeros((n, len(codes)), dtype=np.int32)
        for (i, j), s in shift.items():
            b = (codes >> s & 1).astype(np.int32)
            rows[i] |= b << j
            rows[j] |= b << i
        ok = np.ones(len(codes), dtype=bool)
        if square_free:
            pop = np.array([bin(v).count("1") for v in range(1 << n)], dtype=np.int8)
            for i in range(n):
                for j in range(i + 1, n):
                    ok &= pop[rows[i] & rows[j]] <= 1
        if connected:
            reach = np.ones(len(codes), dtype=np.int32)
            for _ in range(n - 1):
                nbr = np.zeros_like(reach)
                for i in range(n):
                    nbr |= np.where(reach >> i & 1 == 1, rows[i], 0)
                reach |= nbr
            ok &= reach == (1 << n) - 1
        survivors.append(codes[ok])
    codes = np.concatenate(survivors)
    codes[::-1].sort()

    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
    src = np.array([shift[(i, j)] for (i, j) in pairs], dtype=np.int64)
    dst = np.zeros((len(perms), L), dtype=np.int64)
    for k, (i, j) in enumerate(pairs):
        a, b = perms[:, i], perms[:, j]
        lo, hi = np.minimum(a, b), np.maximum(a, b)
        dst[:, k] = L - 1 - (hi * (hi - 1) // 2 + lo)
    seen: set[int] = set()
    reps = []
    for code in codes:
        c = int(code)
        if c in seen:
            continue
        reps.append(c)
        orbit = np.zeros(len(perms), dtype=np.int64)
        for k in range(L):
            orbit |= (c >> int(src[k]) & 1) << dst[:, k]
        seen.update(int(v) for v in orbit)
    return [graph_from_code(n, format(c, f"0{L}b")) for c in reps]
