"""Exact 101-colourability and k-colourability.

A 101-colouring assigns 0/1 to vertices so that no edge has both endpoints 0
and no triangle has all three vertices 1.  The solver is a backtracking
search with unit propagation over vertex bitmasks:

  - a 0 forces every neighbour to 1 (edge rule);
  - two adjacent 1s force all their common neighbours to 0 (triangle rule).

Vertices outside the triangle core (vertices left after repeatedly peeling
those in no triangle) can always take 1, so the search runs on the core only.
Every triangle of the graph lies inside the core: the first member of a
triangle to be peeled would still have its two partners alive, so no member
is ever peeled.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .graphs import (
    Graph,
    _bits,
    every_vertex_in_triangle,
    is_square_free,
    min_degree,
    triangle_core,
    triangles,
)


def validate_101(g: Graph, assignment) -> bool:
    """Direct scan of both rules; independent of the solver's bookkeeping."""
    if len(assignment) != g.n or any(a not in (0, 1) for a in assignment):
        return False
    for u, v in g.edges():
        if assignment[u] == 0 and assignment[v] == 0:
            return False
    for a, b, c in triangles(g):
        if assignment[a] == 1 and assignment[b] == 1 and assignment[c] == 1:
            return False
    return True


def solve_101(g: Graph) -> tuple[int, ...] | None:
    """A satisfying 101-colouring, or None when exhaustive search refutes all.

    Deterministic: branch on the highest-degree unassigned core vertex,
    value 0 first.
    """
    core_mask = triangle_core(g)
    if core_mask == 0:
        return (1,) * g.n
    core = _bits(core_mask)
    sub = _solve_core(g.induced(core))
    if sub is None:
        return None
    out = [1] * g.n
    for i, v in enumerate(core):
        out[v] = sub[i]
    return tuple(out)


def _solve_core(g: Graph) -> tuple[int, ...] | None:
    n, rows = g.n, g.rows
    order = sorted(range(n), key=lambda v: (-rows[v].bit_count(), v))

    def propagate(zeros: int, ones: int, pend0: int, pend1: int):
        while pend0 or pend1:
            if pend0:
                b = pend0 & -pend0
                pend0 ^= b
                v = b.bit_length() - 1
                nb = rows[v]
                if nb & zeros:
                    return None
                new1 = nb & ~ones
                ones |= new1
                pend1 |= new1
                continue
            b = pend1 & -pend1
            pend1 ^= b
            v = b.bit_length() - 1
            m = ones & rows[v]
            forced = 0
            while m:
                c = m & -m
                m ^= c
                forced |= rows[c.bit_length() - 1] & rows[v]
            if forced & ones:
                return None
            new0 = forced & ~zeros
            zeros |= new0
            pend0 |= new0
        return zeros, ones

    def choose(assigned: int) -> int:
        for v in order:
            if not assigned >> v & 1:
                return v
        return -1

    frames: list[tuple[int, int, int, int]] = []
    zeros = ones = 0
    v = choose(0)
    if v < 0:
        return ()
    val = 0
    while True:
        if val == 0:
            res = propagate(zeros | 1 << v, ones, 1 << v, 0)
        else:
            res = propagate(zeros, ones | 1 << v, 0, 1 << v)
        if res is not None:
            frames.append((zeros, ones, v, val))
            zeros, ones = res
            v = choose(zeros | ones)
            if v < 0:
                return tuple(1 if ones >> u & 1 else 0 for u in range(n))
            val = 0
        else:
            while True:
                if val == 0:
                    val = 1
                    break
                if not frames:
                    return None
                zeros, ones, v, val = frames.pop()


# ---------------------------------------------------------------------------
# Proper k-colouring (k = 2..4)

def is_k_colourable(g: Graph, k: int) -> tuple[bool, tuple[int, ...] | None]:
    """Exact decision with a witness (colours 1..k) when colourable."""
    if not 2 <= k <= 4:
        raise ValueError("k must be in 2..4")
    if k == 2:
        return _bipartite(g)
    return _backtrack_colour(g, k)


def _bipartite(g: Graph):
    n, rows = g.n, g.rows
    colour = [0] * n
    for s in range(n):
        if colour[s]:
            continue
        colour[s] = 1
        queue = [s]
        while queue:
            u = queue.pop()
            for w in _bits(rows[u]):
                if colour[w] == 0:
                    colour[w] = 3 - colour[u]
                    queue.append(w)
                elif colour[w] == colour[u]:
                    return False, None
    return True, tuple(colour)


def _backtrack_colour(g: Graph, k: int):
    n, rows = g.n, g.rows
    deg = [r.bit_count() for r in rows]
    colours = [0] * n
    forb = [0] * n
    kmask = (1 << k) - 1

    def rec(ncoloured: int, max_used: int) -> bool:
        if ncoloured == n:
            return True
        best = -1
        bkey = None
        for u in range(n):
            if colours[u] == 0:
                key = (forb[u].bit_count(), deg[u], -u)
                if bkey is None or key > bkey:
                    bkey = key
                    best = u
        v = best
        avail = ~forb[v] & kmask
        # colours beyond max_used+1 are symmetric to it
        cap = min(k, max_used + 1)
        for c in range(1, cap + 1):
            if not avail >> (c - 1) & 1:
                continue
            bit = 1 << (c - 1)
            colours[v] = c
            changed = []
            dead = False
            m = rows[v]
            while m:
                b = m & -m
                m ^= b
                u = b.bit_length() - 1
                if colours[u] == 0 and not forb[u] & bit:
                    forb[u] |= bit
                    changed.append(u)
                    if forb[u] == kmask:
                        dead = True
            if not dead and rec(ncoloured + 1, max(max_used, c)):
                return True
            for u in changed:
                forb[u] &= ~bit
            colours[v] = 0
        return False

    if rec(0, 0):
        return True, tuple(colours)
    return False, None


def colouring_from_3colouring(witness) -> tuple[int, ...]:
    """Turn a proper 3-colouring into a 101-colouring (class 1 becomes 0).

    Adjacent vertices never share a colour class, so no edge is 0-0; a
    triangle uses all three classes, so one vertex of each triangle gets 0.
    """
    return tuple(0 if c == 1 else 1 for c in witness)


# ---------------------------------------------------------------------------
# Minimal-KS candidate pre-screen

@dataclass(frozen=True, slots=True)
class FilterResult:
    passed: bool
    reason: str | None = None


FILTER_ORDER = ("square", "3-colourable", "not-4-colourable", "min-degree", "no-triangle")


def candidate_filter(g: Graph) -> FilterResult:
    """Cheap necessary conditions for a minimal KS candidate, in order:
    square-free, not 3-colourable, 4-colourable, minimum degree 3, every
    vertex in a triangle.  Returns the first failed condition as reason.
    """
    if not is_square_free(g):
        return FilterResult(False, "square")
    if is_k_colourable(g, 3)[0]:
        return FilterResult(False, "3-colourable")
    if not is_k_colourable(g, 4)[0]:
        return FilterResult(False, "not-4-colourable")
    if min_degree(g) < 3:
        return FilterResult(False, "min-degree")
    if not every_vertex_in_triangle(g):
        return FilterResult(False, "no-triangle")
    return FilterResult(True)


# ---------------------------------------------------------------------------
# Exports

def export_dimacs_101(g: Graph) -> str:
    """DIMACS CNF with one variable per vertex (true = assigned 1).

    Edge (u,v) gives clause (u | v); triangle (a,b,c) gives (-a | -b | -c).
    Satisfiable iff the graph is 101-colourable.
    """
    edges = g.edges()
    tris = triangles(g)
    lines = [f"p cnf {g.n} {len(edges) + len(tris)}"]
    for u, v in edges:
        lines.append(f"{u + 1} {v + 1} 0")
    for a, b, c in tris:
        lines.append(f"-{a + 1} -{b + 1} -{c + 1} 0")
    return "\n".join(lines) + "\n"


def witness_to_json(assignment) -> str:
    return json.dumps({str(v): int(a) for v, a in enumerate(assignment)})
