"""Canonicity, orderly enumeration, tickets and the brute-force oracle."""

import random

import pytest

from kssearch.graphs import Graph, encode_upper_triangle, graph_from_code, is_connected
from kssearch.orderly import (
    CanonicalBudgetExceeded,
    Filters,
    SubtreeTicket,
    brute_force_classes,
    canonical_code,
    canonical_label,
    enumerate_graphs,
    extend,
    is_canonical,
    list_tickets,
)

K1 = Graph(1, (0,))
K2 = Graph.from_edges(2, [(0, 1)])
K3 = Graph.from_edges(3, [(0, 1), (0, 2), (1, 2)])


def random_graph(rng, n, p=0.4):
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    return Graph.from_edges(n, edges)


def relabel(g, perm):
    return Graph.from_edges(g.n, [(perm[u], perm[v]) for u, v in g.edges()])


def test_canonicity_examples():
    for perm in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        assert is_canonical(relabel(K3, perm))
    assert is_canonical(graph_from_code(3, "110"))
    assert not is_canonical(graph_from_code(3, "101"))
    assert is_canonical(graph_from_code(4, "110100"))  # star, centre first


def test_canonical_label_examples():
    for code in ("110", "101", "011"):
        assert encode_upper_triangle(canonical_label(graph_from_code(3, code))) == "110"
    assert canonical_code(K3) != canonical_code(graph_from_code(3, "110"))


def test_canonical_label_invariant_under_relabeling():
    rng = random.Random(99)
    for _ in range(150):
        n = rng.randint(2, 9)
        g = random_graph(rng, n, p=rng.choice([0.2, 0.5, 0.8]))
        perm = list(range(n))
        rng.shuffle(perm)
        assert canonical_code(g) == canonical_code(relabel(g, perm))
        assert is_canonical(canonical_label(g))


def test_canonical_label_budget():
    g = random_graph(random.Random(1), 9, 0.5)
    with pytest.raises(CanonicalBudgetExceeded):
        canonical_label(g, node_limit=3)


def test_extend_from_k1():
    both = extend(K1, Filters(square_free=True, connected=False))
    assert sorted(encode_upper_triangle(g) for g in both) == ["0", "1"]
    connected = extend(K1, Filters(square_free=True, connected=True))
    assert [encode_upper_triangle(g) for g in connected] == ["1"]


def test_extend_from_k2():
    children = extend(K2, Filters(True, True))
    assert sorted(encode_upper_triangle(g) for g in children) == ["110", "111"]


def test_extend_never_closes_squares():
    for g in enumerate_graphs(5):
        for child in extend(g):
            from kssearch.graphs import is_square_free

            assert is_square_free(child)


def test_enumerate_small_counts():
    assert sum(1 for _ in enumerate_graphs(3)) == 2
    assert sum(1 for _ in enumerate_graphs(4)) == 3
    codes = {encode_upper_triangle(g) for g in enumerate_graphs(4)}
    # path, star, paw (triangle plus pendant)
    assert codes == {
        canonical_code(Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])),
        canonical_code(Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)])),
        canonical_code(Graph.from_edges(4, [(0, 1), (0, 2), (1, 2), (2, 3)])),
    }


@pytest.mark.parametrize("n", range(1, 7))
def test_enumerate_matches_oracle(n):
    oracle = {encode_upper_triangle(g) for g in brute_force_classes(n)}
    enum = [encode_upper_triangle(g) for g in enumerate_graphs(n)]
    assert len(set(enum)) == len(enum)  # pairwise distinct canonical codes
    assert oracle == set(enum)


def test_oracle_connected_only_counts():
    # all connected graphs on 4 vertices: 6 classes
    assert len(brute_force_classes(4, square_free=False, connected=True)) == 6
    assert len(brute_force_classes(2)) == 1


def test_prefix_closedness_and_connectedness():
    for n in range(2, 8):
        for g in enumerate_graphs(n):
            for k in range(1, n + 1):
                prefix = Graph(k, tuple(r & ((1 << k) - 1) for r in g.rows[:k]))
                assert is_canonical(prefix)
                assert is_connected(prefix)


def test_connected_mode_equals_posthoc_filtering():
    for n in range(2, 8):
        pruned = {encode_upper_triangle(g) for g in enumerate_graphs(n, Filters(True, True))}
        unpruned = {
            encode_upper_triangle(g)
            for g in enumerate_graphs(n, Filters(True, False))
            if is_connected(g)
        }
        assert pruned == unpruned


@pytest.mark.parametrize("depth", [1, 2, 3, 4, 5])
def test_ticket_partition(depth):
    n = 9
    full = [encode_upper_triangle(g) for g in enumerate_graphs(n)]
    merged = []
    for t in list_tickets(depth):
        merged.extend(encode_upper_triangle(g) for g in enumerate_graphs(n, ticket=t))
    assert sorted(merged) == sorted(full)
    assert len(set(merged)) == len(merged)


def test_ticket_id_roundtrip():
    for t in list_tickets(5):
        assert SubtreeTicket.from_id(t.ticket_id).prefix == t.prefix
