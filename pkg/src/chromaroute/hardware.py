"""Hardware model: coupling graph, error rates, and the crosstalk profile.

The device is an undirected connected coupling graph.  Crosstalk is modeled
pairwise: for a pair of links (e1, e2) the profile stores the conditional
two-qubit error of each link while the other is driven simultaneously.  The
amount by which the conditional errors exceed the isolated ones is the
"excess" that the scheduler budgets against an allowance.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass

from .errors import HardwareError, MappingError

Edge = tuple[int, int]


def normalize_edge(a: int, b: int) -> Edge:
    if a == b:
        raise HardwareError(f"self-loop edge ({a},{b})")
    return (a, b) if a < b else (b, a)


class CouplingGraph:
    """Undirected connected device graph with per-edge and per-qubit rates.

    Missing error rates are allowed at load time; fidelity estimation raises
    if it actually needs one.  Missing T1/T2 entries mean "no decay data" and
    are treated as infinite.
    """

    def __init__(
        self,
        num_qubits: int,
        edges: list[Edge],
        edge_error: dict[Edge, float] | None = None,
        t1: dict[int, float] | None = None,
        t2: dict[int, float] | None = None,
        gate_time_cx: float = 1.0,
        single_qubit_error: dict[int, float] | None = None,
    ):
        if num_qubits <= 0:
            raise HardwareError("device needs a positive qubit count")
        self.num_qubits = num_qubits
        self.edges: set[Edge] = set()
        self.adjacency: list[list[int]] = [[] for _ in range(num_qubits)]
        for a, b in edges:
            e = normalize_edge(a, b)
            if not (0 <= e[0] < num_qubits and 0 <= e[1] < num_qubits):
                raise HardwareError(f"edge {e} out of range")
            if e in self.edges:
                raise HardwareError(f"duplicate edge {e}")
            self.edges.add(e)
            self.adjacency[e[0]].append(e[1])
            self.adjacency[e[1]].append(e[0])
        for neigh in self.adjacency:
            neigh.sort()
        self.edge_error = dict(edge_error or {})
        for e, eps in self.edge_error.items():
            if e not in self.edges:
                raise HardwareError(f"error rate for unknown edge {e}")
            if not 0.0 <= eps < 1.0:
                raise HardwareError(f"edge error {eps} outside [0,1) for {e}")
        self.t1 = dict(t1 or {})
        self.t2 = dict(t2 or {})
        for name, table in (("t1", self.t1), ("t2", self.t2)):
            for q, val in table.items():
                if val <= 0:
                    raise HardwareError(f"{name}[{q}] must be positive, got {val}")
        if gate_time_cx <= 0:
            raise HardwareError("gate_time_cx must be positive")
        self.gate_time_cx = gate_time_cx
        self.single_qubit_error = dict(single_qubit_error or {})
        for q, eps in self.single_qubit_error.items():
            if not 0.0 <= eps < 1.0:
                raise HardwareError(f"single-qubit error {eps} outside [0,1) for {q}")
        self._check_connected()
        self._dist: list[list[int]] | None = None

    def _check_connected(self):
        if self.num_qubits == 1:
            return
        seen = {0}
        todo = deque([0])
        while todo:
            cur = todo.popleft()
            for nxt in self.adjacency[cur]:
                if nxt not in seen:
                    seen.add(nxt)
                    todo.append(nxt)
        if len(seen) != self.num_qubits:
            missing = sorted(set(range(self.num_qubits)) - seen)
            raise HardwareError(f"coupling graph is disconnected; unreachable: {missing}")

    def has_edge(self, a: int, b: int) -> bool:
        return normalize_edge(a, b) in self.edges

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    def all_pairs_distance(self) -> list[list[int]]:
        """Hop-count distance matrix computed by BFS from every qubit."""
        if self._dist is None:
            n = self.num_qubits
            dist = [[-1] * n for _ in range(n)]
            for src in range(n):
                row = dist[src]
                row[src] = 0
                todo = deque([src])
                while todo:
                    cur = todo.popleft()
                    for nxt in self.adjacency[cur]:
                        if row[nxt] < 0:
                            row[nxt] = row[cur] + 1
                            todo.append(nxt)
            self._dist = dist
        return self._dist

    def distance(self, a: int, b: int) -> int:
        return self.all_pairs_distance()[a][b]

    def error_of(self, edge: Edge) -> float:
        e = normalize_edge(*edge)
        if e not in self.edges:
            raise HardwareError(f"unknown edge {e}")
        if e not in self.edge_error:
            raise HardwareError(f"missing error rate for edge {e}")
        return self.edge_error[e]

    def t1_of(self, q: int) -> float:
        return self.t1.get(q, math.inf)

    def t2_of(self, q: int) -> float:
        return self.t2.get(q, math.inf)

    def single_qubit_error_of(self, q: int) -> float:
        return self.single_qubit_error.get(q, 0.0)


@dataclass(frozen=True)
class CrosstalkRecord:
    e1: Edge
    e2: Edge
    e1_given_e2: float
    e2_given_e1: float


class CrosstalkProfile:
    """Pairwise conditional-error table over coupling edges."""

    def __init__(self, graph: CouplingGraph, records: list[CrosstalkRecord]):
        self._by_pair: dict[frozenset[Edge], CrosstalkRecord] = {}
        for rec in records:
            e1 = normalize_edge(*rec.e1)
            e2 = normalize_edge(*rec.e2)
            if e1 == e2:
                raise HardwareError(f"crosstalk record pairs edge {e1} with itself")
            for e in (e1, e2):
                if e not in graph.edges:
                    raise HardwareError(f"crosstalk record references unknown edge {e}")
            for cond in (rec.e1_given_e2, rec.e2_given_e1):
                if not 0.0 <= cond < 1.0:
                    raise HardwareError(f"conditional error {cond} outside [0,1)")
            base1 = graph.edge_error.get(e1)
            base2 = graph.edge_error.get(e2)
            if base1 is not None and rec.e1_given_e2 < base1:
                raise HardwareError(
                    f"conditional error for {e1} given {e2} below isolated rate"
                )
            if base2 is not None and rec.e2_given_e1 < base2:
                raise HardwareError(
                    f"conditional error for {e2} given {e1} below isolated rate"
                )
            key = frozenset((e1, e2))
            if key in self._by_pair:
                raise HardwareError(f"duplicate crosstalk record for {e1} / {e2}")
            self._by_pair[key] = CrosstalkRecord(e1, e2, rec.e1_given_e2, rec.e2_given_e1)
        self.graph = graph

    def __len__(self) -> int:
        return len(self._by_pair)

    def pairs(self) -> list[tuple[Edge, Edge]]:
        out = [tuple(sorted(key)) for key in self._by_pair]
        return sorted(out)

    def record_for(self, e1: Edge, e2: Edge) -> CrosstalkRecord | None:
        e1 = normalize_edge(*e1)
        e2 = normalize_edge(*e2)
        if e1 == e2:
            raise HardwareError("crosstalk lookup needs two distinct edges")
        for e in (e1, e2):
            if e not in self.graph.edges:
                raise HardwareError(f"unknown edge {e}")
        return self._by_pair.get(frozenset((e1, e2)))

    def conditional_error(self, of_edge: Edge, given_edge: Edge) -> float:
        """Error rate of ``of_edge`` while ``given_edge`` runs concurrently."""
        rec = self.record_for(of_edge, given_edge)
        of_edge = normalize_edge(*of_edge)
        if rec is None:
            return self.graph.error_of(of_edge)
        return rec.e1_given_e2 if of_edge == rec.e1 else rec.e2_given_e1

    def excess_error(self, e1: Edge, e2: Edge) -> float:
        """Total error inflation of running e1 and e2 simultaneously.

        Zero when the pair is not in the profile.  Never negative thanks to
        the load-time check against isolated rates.
        """
        rec = self.record_for(e1, e2)
        if rec is None:
            return 0.0
        excess = (rec.e1_given_e2 - self.graph.error_of(rec.e1)) + (
            rec.e2_given_e1 - self.graph.error_of(rec.e2)
        )
        return max(excess, 0.0)


def crosstalk_between(profile: CrosstalkProfile, e1: Edge, e2: Edge) -> CrosstalkRecord | None:
    """Profile entry for a pair of edges, or None when they do not interfere."""
    return profile.record_for(e1, e2)


class Mapping:
    """Injective placement of logical qubits onto physical qubits.

    Physical qubits without a logical occupant are allowed; SWAPs may move a
    state through them.
    """

    def __init__(self, num_logical: int, num_physical: int, placement: list[int] | None = None):
        if num_logical > num_physical:
            raise MappingError(
                f"{num_logical} logical qubits cannot map onto {num_physical} physical qubits"
            )
        if placement is None:
            placement = list(range(num_logical))
        if len(placement) != num_logical:
            raise MappingError("placement length != logical qubit count")
        if len(set(placement)) != len(placement):
            raise MappingError("placement is not injective")
        for p in placement:
            if not 0 <= p < num_physical:
                raise MappingError(f"physical qubit {p} out of range")
        self.num_logical = num_logical
        self.num_physical = num_physical
        self._l2p = list(placement)
        self._p2l: list[int | None] = [None] * num_physical
        for l, p in enumerate(self._l2p):
            self._p2l[p] = l

    def copy(self) -> "Mapping":
        return Mapping(self.num_logical, self.num_physical, list(self._l2p))

    def phys(self, logical: int) -> int:
        if not 0 <= logical < self.num_logical:
            raise MappingError(f"logical qubit {logical} out of range")
        return self._l2p[logical]

    def logical_at(self, physical: int) -> int | None:
        if not 0 <= physical < self.num_physical:
            raise MappingError(f"physical qubit {physical} out of range")
        return self._p2l[physical]

    def apply_swap(self, a: int, b: int):
        """Exchange the occupants of physical qubits a and b."""
        if a == b:
            raise MappingError("swap needs two distinct physical qubits")
        la, lb = self.logical_at(a), self.logical_at(b)
        self._p2l[a], self._p2l[b] = lb, la
        if la is not None:
            self._l2p[la] = b
        if lb is not None:
            self._l2p[lb] = a

    def as_dict(self) -> dict[int, int]:
        return {l: p for l, p in enumerate(self._l2p)}

    def __eq__(self, other) -> bool:
        return isinstance(other, Mapping) and self._l2p == other._l2p and (
            self.num_physical == other.num_physical
        )


_HW_FIELDS = {
    "num_qubits",
    "edges",
    "edge_error",
    "t1",
    "t2",
    "crosstalk",
    "gate_time_cx",
    "single_qubit_error",
}

_XT_FIELDS = {"e1", "e2", "e1_given_e2", "e2_given_e1"}


def _parse_edge_key(key: str) -> Edge:
    parts = key.split("-")
    if len(parts) != 2:
        raise HardwareError(f"bad edge key {key!r}, expected 'a-b'")
    try:
        return normalize_edge(int(parts[0]), int(parts[1]))
    except ValueError as exc:
        raise HardwareError(f"bad edge key {key!r}: {exc}") from exc


def load_hardware(data: dict) -> tuple[CouplingGraph, CrosstalkProfile]:
    """Build a device and profile from a parsed hardware JSON document.

    Unknown top-level fields are rejected so that typos do not silently turn
    into default behavior.
    """
    if not isinstance(data, dict):
        raise HardwareError("hardware document must be a JSON object")
    unknown = set(data) - _HW_FIELDS
    if unknown:
        raise HardwareError(f"unknown hardware field(s): {sorted(unknown)}")
    try:
        num_qubits = int(data["num_qubits"])
        raw_edges = data["edges"]
    except KeyError as exc:
        raise HardwareError(f"missing required field {exc.args[0]!r}") from exc
    edges = []
    for item in raw_edges:
        if len(item) != 2:
            raise HardwareError(f"bad edge entry {item!r}")
        edges.append(normalize_edge(int(item[0]), int(item[1])))
    edge_error = {}
    for key, val in (data.get("edge_error") or {}).items():
        edge_error[_parse_edge_key(key)] = float(val)
    t1 = {int(q): float(v) for q, v in (data.get("t1") or {}).items()}
    t2 = {int(q): float(v) for q, v in (data.get("t2") or {}).items()}
    sqe = {int(q): float(v) for q, v in (data.get("single_qubit_error") or {}).items()}
    graph = CouplingGraph(
        num_qubits,
        edges,
        edge_error=edge_error,
        t1=t1,
        t2=t2,
        gate_time_cx=float(data.get("gate_time_cx", 1.0)),
        single_qubit_error=sqe,
    )
    records = []
    for rec in data.get("crosstalk") or []:
        if not isinstance(rec, dict):
            raise HardwareError(f"bad crosstalk record {rec!r}")
        unknown = set(rec) - _XT_FIELDS
        if unknown:
            raise HardwareError(f"unknown crosstalk field(s): {sorted(unknown)}")
        try:
            records.append(
                CrosstalkRecord(
                    e1=normalize_edge(int(rec["e1"][0]), int(rec["e1"][1])),
                    e2=normalize_edge(int(rec["e2"][0]), int(rec["e2"][1])),
                    e1_given_e2=float(rec["e1_given_e2"]),
                    e2_given_e1=float(rec["e2_given_e1"]),
                )
            )
        except KeyError as exc:
            raise HardwareError(f"crosstalk record missing {exc.args[0]!r}") from exc
    return graph, CrosstalkProfile(graph, records)


def load_hardware_file(path: str) -> tuple[CouplingGraph, CrosstalkProfile]:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise HardwareError(f"{path}: invalid JSON ({exc})") from exc
    return load_hardware(data)
