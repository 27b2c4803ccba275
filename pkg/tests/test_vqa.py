import heapq
import itertools
import random

import pytest

from chromaroute import (
    InvariantError,
    Mapping,
    SynthesisOptions,
    SynthesisTree,
    build_qubit_graph,
    delete_qubit,
    graph_center,
    kruskal_mst,
    mst,
    parse_pauli_program,
    pattern_cost,
    synthesize,
    synthesize_pauli_program,
    verify_routing,
)
from chromaroute.fixtures import chain_pair, grid6, h2_terms, ring6, tree7, zz_string
from chromaroute.jw import jw_encode
from chromaroute.vqa import assign_direction, calculate_depths, derive_gate_sets


def prufer_edges(seq, n):
    degree = [1] * n
    for i in seq:
        degree[i] += 1
    leaves = [i for i in range(n) if degree[i] == 1]
    heapq.heapify(leaves)
    edges = []
    for i in seq:
        leaf = heapq.heappop(leaves)
        edges.append((min(leaf, i), max(leaf, i)))
        degree[i] -= 1
        if degree[i] == 1:
            heapq.heappush(leaves, i)
    u = heapq.heappop(leaves)
    v = heapq.heappop(leaves)
    edges.append((min(u, v), max(u, v)))
    return edges


def exhaustive_min_tree_weight(n, weights):
    if n == 2:
        return weights[(0, 1)]
    best = None
    for seq in itertools.product(range(n), repeat=n - 2):
        total = sum(weights[e] for e in prufer_edges(seq, n))
        if best is None or total < best:
            best = total
    return best


def test_build_qubit_graph_hop_distances():
    hw, _ = tree7()
    m = Mapping(7, 7)
    weights = build_qubit_graph((0, 1, 3, 4), m, hw)
    assert weights == {
        (0, 1): 1,
        (0, 3): 2,
        (0, 4): 4,
        (1, 3): 1,
        (1, 4): 3,
        (3, 4): 2,
    }


def test_kruskal_known_tree():
    weights = {(0, 1): 1, (0, 2): 5, (1, 2): 2}
    assert kruskal_mst([0, 1, 2], weights) == [(0, 1), (1, 2)]


def test_kruskal_deterministic_ties():
    weights = {(0, 1): 1, (0, 2): 1, (1, 2): 1}
    assert kruskal_mst([0, 1, 2], weights) == [(0, 1), (0, 2)]
    weights4 = {e: 2 for e in itertools.combinations(range(4), 2)}
    assert kruskal_mst([0, 1, 2, 3], weights4) == [(0, 1), (0, 2), (0, 3)]


def test_kruskal_disconnected_rejected():
    with pytest.raises(InvariantError):
        kruskal_mst([0, 1, 2], {(0, 1): 1})


def test_mst_weight_matches_exhaustive_enumeration():
    rng = random.Random(7)
    for _ in range(30):
        n = rng.randint(2, 6)
        weights = {e: rng.randint(1, 9) for e in itertools.combinations(range(n), 2)}
        tree = kruskal_mst(list(range(n)), weights)
        assert sum(weights[e] for e in tree) == exhaustive_min_tree_weight(n, weights)


def test_tree7_mst_weight_is_4():
    hw, _ = tree7()
    m = Mapping(7, 7)
    weights = build_qubit_graph((0, 1, 3, 4), m, hw)
    tree = kruskal_mst([0, 1, 3, 4], weights)
    assert tree == [(0, 1), (1, 3), (3, 4)]
    assert sum(weights[e] for e in tree) == 4


def test_derive_gate_sets_rules():
    tree = [(0, 1), (1, 2), (2, 3)]
    weights = {(0, 1): 1, (1, 2): 3, (2, 3): 1}
    executable, routable = derive_gate_sets(tree, weights)
    assert executable == [(0, 1), (2, 3)]
    # (1,2) is distant but internal: routing toward it would disturb the rest
    assert routable == []
    star = [(0, 1), (0, 2), (0, 3)]
    weights = {(0, 1): 1, (0, 2): 2, (0, 3): 4}
    executable, routable = derive_gate_sets(star, weights)
    assert executable == [(0, 1)]
    assert routable == [(0, 2), (0, 3)]


def test_graph_center_ties_go_low():
    path4 = {0: [1], 1: [0, 2], 2: [1, 3], 3: [2]}
    assert graph_center(path4) == 1
    pair = {0: [1], 1: [0]}
    assert graph_center(pair) == 0
    star = {0: [9], 9: [0, 5, 7], 5: [9], 7: [9]}
    assert graph_center(star) == 9


def test_assign_direction_target_is_nearer_center():
    tree = {0: [1], 1: [0, 3], 3: [1, 4], 4: [3]}
    assert assign_direction((0, 1), tree, 1) == (0, 1)
    assert assign_direction((1, 3), tree, 1) == (3, 1)
    assert assign_direction((3, 4), tree, 1) == (4, 3)
    chain = {1: [3], 3: [1, 4], 4: [3]}
    assert assign_direction((1, 3), chain, 3) == (1, 3)
    assert assign_direction((3, 4), chain, 3) == (4, 3)


DEPTH_CASES = [
    # paths: depth n-1, no concurrent merges
    ({0: []}, (0, 0)),
    ({0: [1], 1: [0]}, (1, 0)),
    ({0: [1], 1: [0, 2], 2: [1]}, (2, 0)),
    ({0: [1], 1: [0, 2], 2: [1, 3], 3: [2]}, (3, 0)),
    ({0: [1], 1: [0, 2], 2: [1, 3], 3: [2, 4], 4: [3]}, (4, 0)),
    ({0: [1], 1: [0, 2], 2: [1, 3], 3: [2, 4], 4: [3, 5], 5: [4]}, (5, 0)),
    (
        {0: [1], 1: [0, 2], 2: [1, 3], 3: [2, 4], 4: [3, 5], 5: [4, 6], 6: [5]},
        (6, 0),
    ),
    # stars: k staggered leaf merges, every adjacent pair one step apart
    ({0: [1, 2, 3], 1: [0], 2: [0], 3: [0]}, (5, 4)),
    ({0: [1, 2, 3, 4], 1: [0], 2: [0], 3: [0], 4: [0]}, (7, 6)),
    ({0: [1, 2, 3, 4, 5], 1: [0], 2: [0], 3: [0], 4: [0], 5: [0]}, (9, 8)),
    # spiders
    (
        {0: [1, 3, 5], 1: [0, 2], 2: [1], 3: [0, 4], 4: [3], 5: [0, 6], 6: [5]},
        (7, 4),
    ),
    ({0: [1, 2, 3], 1: [0], 2: [0], 3: [0, 4], 4: [3]}, (5, 4)),
    ({0: [1, 2, 4], 1: [0], 2: [0, 3], 3: [2], 4: [0, 5], 5: [4]}, (5, 4)),
    (
        {0: [1, 2, 3, 4], 1: [0], 2: [0], 3: [0], 4: [0, 5], 5: [4]},
        (7, 6),
    ),
    # caterpillars
    (
        {0: [1], 1: [0, 2], 2: [1, 3, 5], 3: [2, 4], 4: [3], 5: [2]},
        (5, 4),
    ),
    (
        {0: [1], 1: [0, 2, 4], 2: [1, 3, 5], 3: [2], 4: [1], 5: [2]},
        (5, 4),
    ),
    (
        {0: [1], 1: [0, 2], 2: [1, 3], 3: [2, 4, 5], 4: [3], 5: [3]},
        (5, 2),
    ),
    ({0: [1], 1: [0, 2, 4], 2: [1, 3], 3: [2], 4: [1]}, (5, 4)),
    # balanced binary tree on 7 nodes
    (
        {0: [1, 2], 1: [0, 3, 4], 2: [0, 5, 6], 3: [1], 4: [1], 5: [2], 6: [2]},
        (7, 2),
    ),
    # graphs with cycles fall back to a BFS spanning tree
    ({0: [1, 2], 1: [0, 2], 2: [0, 1]}, (3, 2)),
    ({0: [1, 3], 1: [0, 2], 2: [1, 3], 3: [0, 2]}, (3, 2)),
    (
        {0: [1, 2, 3], 1: [0, 2, 3], 2: [0, 1, 3], 3: [0, 1, 2]},
        (5, 4),
    ),
]


@pytest.mark.parametrize("adj,expected", DEPTH_CASES)
def test_calculate_depths_hand_traces(adj, expected):
    assert calculate_depths(adj) == expected


def test_calculate_depths_rejects_empty():
    with pytest.raises(InvariantError):
        calculate_depths({})


def test_synthesis_tree_delete_qubit():
    t = SynthesisTree(remaining={0, 1, 3}, ladder=[])
    delete_qubit(t, 0, 1)
    delete_qubit(t, 1, 3)
    assert t.remaining == {3}
    assert t.ladder == [(0, 1), (1, 3)]
    with pytest.raises(InvariantError):
        delete_qubit(t, 1, 3)


def test_pattern_cost_values():
    hw, _ = ring6()
    m = Mapping(6, 6)
    # adjacent pair, no swaps: one merge layer
    assert pattern_cost([], {0, 1}, m, hw) == 1.0
    # separated pair stays disconnected without the swap
    assert pattern_cost([], {0, 2}, m, hw) == float("inf")
    # one swap reconnects it: depth 1 + 3 * w2 * 1
    assert pattern_cost([(1, 2)], {0, 2}, m, hw, w2=0.5) == 2.5
    assert pattern_cost([(1, 2)], {0, 2}, m, hw, w2=1.0) == 4.0


def test_synthesis_options_validation():
    with pytest.raises(InvariantError):
        SynthesisOptions(w1=0.0)
    with pytest.raises(InvariantError):
        SynthesisOptions(w2=1.5)
    SynthesisOptions(w1=1.0, w2=0.001)


def test_aliases():
    assert mst is kruskal_mst
    assert synthesize_pauli_program is synthesize


def test_weight4_string_trace_exact_layers():
    hw, prof = tree7()
    sched = synthesize(zz_string(), hw, prof, allowance=0.0)
    assert len(sched.layers) == 8
    got = [
        {(op.kind, op.qubits, op.slice_index) for op in layer} for layer in sched.layers
    ]
    assert got == [
        {("cx", (0, 1), None), ("swap", (4, 6), 1)},
        {("cx", (1, 3), None), ("swap", (4, 6), 2)},
        {("swap", (4, 6), 3)},
        {("cx", (6, 3), None)},
        {("rz", (3,), None)},
        {("cx", (6, 3), None)},
        {("cx", (1, 3), None)},
        {("cx", (0, 1), None)},
    ]
    rz = [op for layer in sched.layers for op in layer if op.kind == "rz"]
    assert rz[0].param == 0.25
    assert sched.crosstalk_ledger == []
    assert verify_routing(sched, hw, prof, allowance=0.0)


def test_lookahead_prefers_pattern_that_helps_the_next_string():
    hw, prof = grid6()
    prog = chain_pair()
    on = synthesize(prog, hw, prof, allowance=0.0, options=SynthesisOptions(lookahead=True))
    starts_on = [
        op.qubits
        for layer in on.layers
        for op in layer
        if op.kind == "swap" and op.slice_index == 1
    ]
    assert starts_on == [(3, 4)]
    assert len(on.layers) == 11
    off = synthesize(prog, hw, prof, allowance=0.0, options=SynthesisOptions(lookahead=False))
    starts_off = [
        op.qubits
        for layer in off.layers
        for op in layer
        if op.kind == "swap" and op.slice_index == 1
    ]
    assert starts_off == [(2, 4), (1, 2)]
    assert len(off.layers) == 14
    assert verify_routing(on, hw, prof, allowance=0.0)
    assert verify_routing(off, hw, prof, allowance=0.0)


def test_single_qubit_and_identity_strings():
    hw, prof = ring6()
    prog = parse_pauli_program("1.5 IIIIII\n0.5 IIZIII\n-0.25 IXIIII\n")
    sched = synthesize(prog, hw, prof, allowance=0.0)
    ops = [(op.kind, op.qubits, op.param, op.label) for layer in sched.layers for op in layer]
    assert ops == [
        ("rz", (2,), 0.5, None),
        ("u", (1,), None, "h"),
        ("rz", (1,), -0.25, None),
        ("u", (1,), None, "h"),
    ]
    assert verify_routing(sched, hw, prof, allowance=0.0)


def test_h2_program_synthesizes_cleanly():
    hw, prof = ring6()
    prog = jw_encode(h2_terms())
    sched = synthesize(prog, hw, prof, allowance=0.0)
    assert verify_routing(sched, hw, prof, allowance=0.0)
    assert sched.crosstalk_ledger == []
    counts = {}
    for layer in sched.layers:
        for op in layer:
            counts[op.kind] = counts.get(op.kind, 0) + 1
    # one rotation per non-identity string
    assert counts["rz"] == 14
    # four weight-4 strings, two X and two Y each, basis-changed twice
    assert counts["u"] == 32
    # ladders: 6 two-qubit strings need 2 CXs, 4 four-qubit strings need 6
    assert counts["cx"] == 36
    rz_params = sorted(op.param for layer in sched.layers for op in layer if op.kind == "rz")
    coeffs = sorted(s.coefficient for s in prog.strings if s.non_identity())
    assert rz_params == pytest.approx(coeffs)


def test_synthesis_is_deterministic():
    hw, prof = grid6()
    prog = chain_pair()
    a = synthesize(prog, hw, prof, allowance=0.0).to_json_dict()
    b = synthesize(prog, hw, prof, allowance=0.0).to_json_dict()
    assert a == b


def test_program_wider_than_device_rejected():
    hw, prof = ring6()
    with pytest.raises(InvariantError):
        synthesize(parse_pauli_program("0.5 " + "Z" * 7 + "\n"), hw, prof)
