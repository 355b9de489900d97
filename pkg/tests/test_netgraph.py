from collections import deque
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dtasync.netgraph import Network, NetworkError, NetworkSpec, aspl, generate, load_edge_list


def bfs_aspl(net):
    """Independent all-pairs BFS on the neighbour lists."""
    total = 0
    for src in range(net.n):
        dist = {src: 0}
        q = deque([src])
        while q:
            u = q.popleft()
            for v in net.neighbors[u]:
                if v not in dist:
                    dist[int(v)] = dist[u] + 1
                    q.append(int(v))
        assert len(dist) == net.n
        total += sum(dist.values())
    return total / (net.n * (net.n - 1))


def check_invariants(net):
    A = net.adjacency.toarray()
    assert np.array_equal(A, A.T)
    assert not np.diag(A).any()
    assert np.array_equal(A.sum(axis=1).astype(int), net.degrees)
    assert net.degrees.min() >= 1


def test_complete_n4():
    net = generate(NetworkSpec("complete", n=4))
    assert net.adjacency.nnz == 12
    assert np.all(net.degrees == 3)
    check_invariants(net)


def test_ring_lattice_aspl_matches_bfs():
    net = generate(NetworkSpec("watts-strogatz", n=10, k=4, p=0.0))
    assert np.all(net.degrees == 4)
    # distances from any node on the 10-ring with k=4: 1,1,1,1,2,2,2,2,3
    assert aspl(net) == pytest.approx(15 / 9, abs=1e-12)
    assert aspl(net) == pytest.approx(bfs_aspl(net), abs=1e-12)


def test_er_deterministic():
    spec = NetworkSpec("erdos-renyi", n=200, p=0.5, seed=7)
    a, b = generate(spec), generate(spec)
    assert np.array_equal(a.edges(), b.edges())
    assert a.content_hash() == b.content_hash()


@pytest.mark.parametrize("spec", [
    NetworkSpec("watts-strogatz", n=50, k=4, p=0.3, seed=1),
    NetworkSpec("erdos-renyi", n=50, p=0.2, seed=2),
    NetworkSpec("barabasi-albert", n=50, m=2, seed=3),
])
def test_generated_invariants_and_aspl_oracle(spec):
    net = generate(spec)
    check_invariants(net)
    assert aspl(net) == pytest.approx(bfs_aspl(net), abs=1e-12)


@pytest.mark.parametrize("spec", [
    NetworkSpec("watts-strogatz", n=10, k=3),
    NetworkSpec("watts-strogatz", n=10, k=10),
    NetworkSpec("watts-strogatz", n=10, k=4, p=1.5),
    NetworkSpec("erdos-renyi", n=10, p=-0.1),
    NetworkSpec("barabasi-albert", n=10, m=10),
    NetworkSpec("barabasi-albert", n=10, m=0),
    NetworkSpec("complete", n=1),
    NetworkSpec("lattice", n=10),
])
def test_invalid_specs(spec):
    with pytest.raises(NetworkError):
        generate(spec)


def test_connectivity_budget_exhausted():
    with pytest.raises(NetworkError, match="connected"):
        generate(NetworkSpec("erdos-renyi", n=100, p=0.001))


def test_edge_list_path(tmp_path):
    f = tmp_path / "g.txt"
    f.write_text("# comment\n% other\n1 2\n\n2 3\n")
    net = load_edge_list(f, indexing=1)
    assert net.n == 3
    assert net.degrees.tolist() == [1, 2, 1]
    assert aspl(net) == pytest.approx(4 / 3)


def test_edge_list_zero_based(tmp_path):
    f = tmp_path / "g.txt"
    f.write_text("0 1\n1 2\n")
    assert load_edge_list(f, indexing=0).degrees.tolist() == [1, 2, 1]


def test_edge_list_duplicates_collapse(tmp_path):
    f = tmp_path / "g.txt"
    f.write_text("1 2\n2 1\n1 2\n")
    net = load_edge_list(f)
    assert net.n_edges == 1


def test_edge_list_self_loop(tmp_path):
    f = tmp_path / "g.txt"
    f.write_text("1 2\n5 5\n")
    with pytest.raises(NetworkError, match="self-loop"):
        load_edge_list(f)


def test_edge_list_parse_error_names_line(tmp_path):
    f = tmp_path / "g.txt"
    f.write_text("1 2\n2 x\n")
    with pytest.raises(NetworkError, match=":2:"):
        load_edge_list(f)


def test_edge_list_isolated_node(tmp_path):
    f = tmp_path / "g.txt"
    f.write_text("1 2\n4 5\n")  # node 3 never appears
    with pytest.raises(NetworkError, match="isolated"):
        load_edge_list(f)


def test_aspl_disconnected():
    net = Network.from_edges(4, [(0, 1), (2, 3)])
    with pytest.raises(NetworkError, match="disconnected"):
        aspl(net)


def test_network_rejects_asymmetric():
    A = np.zeros((3, 3))
    A[0, 1] = A[1, 2] = A[2, 1] = 1
    with pytest.raises(NetworkError, match="symmetric"):
        Network(A)


@settings(max_examples=25, deadline=None)
@given(n=st.integers(2, 60))
def test_complete_aspl_is_one(n):
    net = generate(NetworkSpec("complete", n=n))
    assert aspl(net) == 1.0
    assert np.all(net.degrees == n - 1)
    # the shortcut agrees with the generic path
    assert Network.from_edges(n, combinations(range(n), 2)).adjacency.nnz == n * (n - 1)


@settings(max_examples=20, deadline=None)
@given(n=st.integers(8, 40), half_k=st.integers(1, 3), p=st.floats(0, 1), seed=st.integers(0, 10**6))
def test_ws_generation_pure_and_valid(n, half_k, p, seed):
    spec = NetworkSpec("watts-strogatz", n=n, k=2 * half_k, p=p, seed=seed)
    a = generate(spec)
    check_invariants(a)
    assert (a.adjacency != generate(spec).adjacency).nnz == 0
