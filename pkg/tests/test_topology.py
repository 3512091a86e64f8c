import numpy as np
import pytest

from slrc.model import ConfigurationError
from slrc.topology import (
    bidirectional_ring_selffeedback,
    canonical_topology,
    make_topology,
    read_edge_list,
    ring_with_jumps,
    spectral_radius,
    unidirectional_ring,
    write_edge_list,
)


def test_ring_small():
    assert unidirectional_ring(1).tolist() == [[1.0]]
    assert unidirectional_ring(2).tolist() == [[0, 1], [1, 0]]


def test_ring_four_is_cyclic_shift():
    expected = np.array([[0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]], float)
    assert np.array_equal(unidirectional_ring(4), expected)


@pytest.mark.parametrize("n", [1, 2, 3, 5, 16, 64])
def test_ring_is_permutation(n):
    G = unidirectional_ring(n)
    assert np.all(G.sum(axis=0) == 1) and np.all(G.sum(axis=1) == 1)
    assert np.count_nonzero(G) == n


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_jumps_reduce_to_ring(n):
    assert np.array_equal(ring_with_jumps(n), unidirectional_ring(n))


def test_jumps_eight():
    G = ring_with_jumps(8)
    extra = G - unidirectional_ring(8)
    assert sorted(zip(*np.nonzero(extra))) == [(0, 4), (4, 0)]


@pytest.mark.parametrize("n", [5, 8, 9, 16, 64])
def test_jump_count(n):
    # sources 0, 4, 8, ...; a jump landing on an existing ring link would merge
    assert np.count_nonzero(ring_with_jumps(n)) == n + len(range(0, n, 4))


def test_bidirectional_three():
    assert bidirectional_ring_selffeedback(3).tolist() == [[-2, 1, 1], [1, -2, 1], [1, 1, -2]]


def test_bidirectional_two_merges_links():
    assert bidirectional_ring_selffeedback(2).tolist() == [[-2, 2], [2, -2]]


@pytest.mark.parametrize("n", [2, 3, 4, 7, 16])
def test_bidirectional_symmetric_zero_row_sums(n):
    G = bidirectional_ring_selffeedback(n)
    assert np.array_equal(G, G.T)
    assert np.all(G.sum(axis=1) == 0)


def test_bidirectional_one_warns():
    with pytest.warns(RuntimeWarning):
        G = bidirectional_ring_selffeedback(1)
    assert G.tolist() == [[0.0]]


@pytest.mark.parametrize("ctor", [unidirectional_ring, ring_with_jumps, bidirectional_ring_selffeedback])
def test_invalid_size(ctor):
    with pytest.raises(ConfigurationError):
        ctor(0)


@pytest.mark.parametrize("kind", ["ring", "ring_jumps", "bidirectional"])
@pytest.mark.parametrize("n", [2, 8, 16])
def test_generator_entries(kind, n):
    assert set(np.unique(make_topology(kind, n))) <= {-2.0, 0.0, 1.0, 2.0}
    if kind != "bidirectional" or n > 2:
        assert set(np.unique(make_topology(kind, n))) <= {-2.0, 0.0, 1.0}


def test_aliases_and_unknown():
    assert canonical_topology("A") == "ring"
    assert canonical_topology("bidir") == "bidirectional"
    with pytest.raises(ConfigurationError):
        make_topology("star", 4)


def test_spectral_radius():
    assert spectral_radius(unidirectional_ring(5)) == pytest.approx(1.0)
    assert spectral_radius(bidirectional_ring_selffeedback(4)) == pytest.approx(4.0)


def test_edge_list_round_trip(tmp_path):
    for G in (ring_with_jumps(12), bidirectional_ring_selffeedback(5), np.zeros((3, 3))):
        p = tmp_path / "g.txt"
        write_edge_list(G, p)
        assert np.array_equal(read_edge_list(p), G)


def test_edge_list_bad_line(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("# n 2\n0 1\n")
    with pytest.raises(ConfigurationError):
        read_edge_list(p)
