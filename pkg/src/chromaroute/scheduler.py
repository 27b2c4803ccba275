"""Layer-by-layer scheduler built on coloring the candidate set graph.

Each iteration assembles the candidate set graph for the current frontier,
colors it (in-flight SWAPs pinned to the first color), picks one color
class by a ranked tie-break chain, and commits that class as the next
layer.  SWAPs occupy their qubits for three consecutive layers; the
logical-to-physical mapping changes when a routing SWAP finishes.  Every
crosstalk pair actually committed is written to a ledger at the layer
where the later of the two operations starts, and the ledger total can
never exceed the configured allowance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .csg import (
    Csg,
    InProgressSwap,
    PendingPair,
    SwapCandidate,
    build_csg,
    executable_pairs,
    useful_swaps,
)
from .errors import HardwareError, InvariantError, StallError, VerificationError
from .hardware import CouplingGraph, CrosstalkProfile, Edge, Mapping, normalize_edge
from .ir import PAULI_POST_LABEL, PAULI_PRE_LABEL, Gate, LogicalCircuit, PauliProgram, frontier

SWAP_DURATION = 3


@dataclass
class Op:
    """One scheduled operation on physical qubits.  ``qubits`` keeps the
    control/target order for directed gates; ``slice_index`` is 1..3 for
    the three layers of a SWAP."""

    kind: str
    qubits: tuple[int, ...]
    gate_id: int | None = None
    param: float | None = None
    label: str | None = None
    slice_index: int | None = None

    def phys_edge(self) -> Edge | None:
        if len(self.qubits) == 2:
            return normalize_edge(self.qubits[0], self.qubits[1])
        return None

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind, "qubits": list(self.qubits)}
        if self.gate_id is not None:
            d["gate_id"] = self.gate_id
        if self.param is not None:
            d["param"] = self.param
        if self.label is not None:
            d["label"] = self.label
        if self.slice_index is not None:
            d["slice"] = self.slice_index
        return d


@dataclass(frozen=True)
class LedgerEntry:
    layer: int
    edges: tuple[Edge, Edge]
    excess: float

    def to_dict(self) -> dict:
        return {
            "layer": self.layer,
            "edges": [list(self.edges[0]), list(self.edges[1])],
            "excess": self.excess,
        }


@dataclass
class ScheduledCircuit:
    num_physical: int
    layers: list[list[Op]]
    crosstalk_ledger: list[LedgerEntry]
    initial_mapping: Mapping
    final_mapping: Mapping

    @property
    def depth_cx(self) -> int:
        return len(self.layers)

    @property
    def swap_count(self) -> int:
        n = sum(1 for layer in self.layers for op in layer if op.kind == "swap" and op.slice_index == 1)
        return n

    def ledger_total(self) -> float:
        return sum(e.excess for e in self.crosstalk_ledger)

    def to_json_dict(self) -> dict:
        return {
            "num_physical": self.num_physical,
            "depth_cx": self.depth_cx,
            "swap_count": self.swap_count,
            "layers": [[op.to_dict() for op in layer] for layer in self.layers],
            "crosstalk_ledger": [e.to_dict() for e in self.crosstalk_ledger],
            "initial_mapping": self.initial_mapping.as_dict(),
            "final_mapping": self.final_mapping.as_dict(),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "ScheduledCircuit":
        def mapping_from(d: dict) -> Mapping:
            placement = [d[k] for k in sorted(d, key=int)]
            return Mapping(len(placement), data["num_physical"], placement)

        layers = []
        for layer in data["layers"]:
            ops = []
            for od in layer:
                ops.append(
                    Op(
                        kind=od["kind"],
                        qubits=tuple(od["qubits"]),
                        gate_id=od.get("gate_id"),
                        param=od.get("param"),
                        label=od.get("label"),
                        slice_index=od.get("slice"),
                    )
                )
            layers.append(ops)
        ledger = [
            LedgerEntry(
                layer=ed["layer"],
                edges=(tuple(ed["edges"][0]), tuple(ed["edges"][1])),
                excess=ed["excess"],
            )
            for ed in data["crosstalk_ledger"]
        ]
        return cls(
            num_physical=data["num_physical"],
            layers=layers,
            crosstalk_ledger=ledger,
            initial_mapping=mapping_from(data["initial_mapping"]),
            final_mapping=mapping_from(data["final_mapping"]),
        )


@dataclass
class ColorClass:
    color: int
    members: list[int]  # sorted vertex ids


def welsh_powell(csg: Csg, pinned: set[int] | None = None) -> list[ColorClass]:
    """Greedy coloring, highest degree first, with in-flight SWAPs forced
    into color 0 before anything else is considered.  Later vertices may
    still join color 0 when nothing pins them apart.  ``pinned`` overrides
    which vertex ids start in color 0 (default: the in-flight SWAPs)."""
    if pinned is None:
        pinned = {v.vertex_id for v in csg.vertices if v.kind == "inprogress"}
    colors: dict[int, int] = {}
    for v in csg.vertices:
        if v.vertex_id in pinned:
            colors[v.vertex_id] = 0
    order = sorted(
        (v for v in csg.vertices if v.vertex_id not in colors),
        key=lambda v: (-csg.degree(v.vertex_id), v.vertex_id),
    )
    for v in order:
        taken = {colors[n] for n in csg.neighbors(v.vertex_id) if n in colors}
        c = 0
        while c in taken:
            c += 1
        colors[v.vertex_id] = c
    by_color: dict[int, list[int]] = {}
    for vid, c in colors.items():
        by_color.setdefault(c, []).append(vid)
    return [ColorClass(color=c, members=sorted(vids)) for c, vids in sorted(by_color.items())]


@dataclass
class SelectionContext:
    pinned: bool = False
    last_helped: frozenset = field(default_factory=frozenset)
    criticality: dict = field(default_factory=dict)
    tie_breaker: object = None  # callable(list[ColorClass]) -> ColorClass | None
    top_k: int = 3


def class_allowance_usage(csg: Csg, cls: ColorClass) -> float:
    members = set(cls.members)
    return sum(cost for i, j, cost in csg.permitted_pairs if i in members and j in members)


def _class_metrics(csg: Csg, cls: ColorClass, ctx: SelectionContext) -> tuple:
    verts = [csg.vertices[i] for i in cls.members]
    cgates = sum(1 for v in verts if v.kind == "cgate")
    continuing = sum(
        1 for v in verts if v.kind == "swap" and (v.helps & ctx.last_helped)
    )
    usage = class_allowance_usage(csg, cls)
    crit = 0
    for v in verts:
        if v.kind == "cgate":
            crit += ctx.criticality.get(v.gate_key, 0)
        elif v.helps:
            crit += max(ctx.criticality.get(k, 0) for k in v.helps)
    return (-len(cls.members), -cgates, -continuing, usage, -crit, min(cls.members))


def rank_and_select(csg: Csg, classes: list[ColorClass], ctx: SelectionContext) -> ColorClass:
    """Pick the color class to commit next.

    With SWAPs in flight the class holding them (color 0) is committed
    unconditionally: an interrupted SWAP is not a thing.  Otherwise the
    classes are cut down to the ``top_k`` largest and ranked by member
    count, cgate count, continued-help count, allowance usage, summed
    criticality, and finally lowest vertex id.  A caller-supplied
    ``tie_breaker`` gets a shot at any tie that survives the first four
    keys.
    """
    if not classes:
        raise InvariantError("no color classes to select from")
    if ctx.pinned:
        for cls in classes:
            if cls.color == 0:
                return cls
        raise InvariantError("in-flight SWAPs present but color 0 missing")
    short = sorted(classes, key=lambda c: (-len(c.members), min(c.members)))[: ctx.top_k]
    metrics = {cls.color: _class_metrics(csg, cls, ctx) for cls in short}
    best4 = min(metrics[c.color][:4] for c in short)
    tied = [c for c in short if metrics[c.color][:4] == best4]
    if len(tied) > 1 and ctx.tie_breaker is not None:
        chosen = ctx.tie_breaker(tied)
        if chosen is not None:
            return chosen
    return min(short, key=lambda c: metrics[c.color])


class _Flight:
    __slots__ = ("edge", "remaining", "helps", "gate_key", "started_layer")

    def __init__(self, edge: Edge, helps: frozenset, gate_key=None, started_layer: int = 0):
        self.edge = edge
        self.remaining = SWAP_DURATION
        self.helps = helps
        self.gate_key = gate_key
        self.started_layer = started_layer


class ScheduleState:
    """Mutable engine shared by the circuit compiler and the ansatz
    synthesizer: opens a layer, places operations with crosstalk charging,
    closes the layer advancing in-flight SWAPs."""

    def __init__(
        self,
        hw: CouplingGraph,
        profile: CrosstalkProfile,
        mapping: Mapping,
        allowance: float = 0.0,
        allowance_units: str = "error",
    ):
        self.hw = hw
        self.profile = profile
        self.mapping = mapping
        self.allowance = allowance
        self.allowance_units = allowance_units
        self.layers: list[list[Op]] = []
        self.ledger: list[LedgerEntry] = []
        self.flights: list[_Flight] = []
        self.last_completed_edges: set[Edge] = set()
        self.last_helped: frozenset = frozenset()
        self._cur: list[Op] | None = None
        self._cur_edges: set[Edge] = set()
        self._cur_busy: set[int] = set()

    def allowance_used(self) -> float:
        if self.allowance_units == "pairs":
            return float(len(self.ledger))
        return sum(e.excess for e in self.ledger)

    def allowance_left(self) -> float:
        return max(self.allowance - self.allowance_used(), 0.0)

    def in_progress(self) -> list[InProgressSwap]:
        return [
            InProgressSwap(
                edge=f.edge,
                remaining_time=f.remaining,
                helps=f.helps,
                started_layer=f.started_layer,
            )
            for f in self.flights
        ]

    def open_layer(self) -> int:
        if self._cur is not None:
            raise InvariantError("layer already open")
        self._cur = []
        self._cur_edges = set()
        self._cur_busy = set()
        layer_idx = len(self.layers)
        for f in self.flights:
            sl = SWAP_DURATION - f.remaining + 1
            op = Op(
                kind="swap",
                qubits=f.edge,
                gate_id=f.gate_key if isinstance(f.gate_key, int) else None,
                slice_index=sl,
            )
            self._cur.append(op)
            self._cur_edges.add(f.edge)
            self._cur_busy.update(f.edge)
        return layer_idx

    def qubit_free(self, phys: int) -> bool:
        return phys not in self._cur_busy

    def place(self, op: Op) -> None:
        if self._cur is None:
            raise InvariantError("no open layer")
        for q in op.qubits:
            if q in self._cur_busy:
                raise InvariantError(f"physical qubit {q} scheduled twice in layer {len(self.layers)}")
            if not 0 <= q < self.hw.num_qubits:
                raise InvariantError(f"physical qubit {q} out of range")
        edge = op.phys_edge()
        if edge is not None:
            if not self.hw.has_edge(*edge):
                raise InvariantError(f"operation on non-adjacent qubits {edge}")
            self._charge(edge)
            self._cur_edges.add(edge)
        self._cur.append(op)
        self._cur_busy.update(op.qubits)

    def start_swap(self, edge: Edge, helps: frozenset = frozenset(), gate_key=None) -> None:
        edge = normalize_edge(*edge)
        f = _Flight(edge, helps, gate_key=gate_key, started_layer=len(self.layers))
        self.place(
            Op(
                kind="swap",
                qubits=edge,
                gate_id=gate_key if isinstance(gate_key, int) else None,
                slice_index=1,
            )
        )
        self.flights.append(f)

    def charge_preview(self, edge: Edge) -> float:
        """Budget delta (error mass, or pair count) that placing a two-qubit
        op on ``edge`` into the open layer would cost."""
        total = 0.0
        for other in self._cur_edges:
            if set(edge) & set(other):
                continue
            rec = self.profile.record_for(edge, other)
            if rec is None:
                continue
            if self.allowance_units == "pairs":
                total += 1.0
            else:
                total += self.profile.excess_error(edge, other)
        return total

    def _charge(self, edge: Edge) -> None:
        layer_idx = len(self.layers)
        for other in sorted(self._cur_edges):
            rec = self.profile.record_for(edge, other)
            if rec is None:
                continue
            try:
                excess = self.profile.excess_error(edge, other)
            except HardwareError:
                if self.allowance_units != "pairs":
                    raise
                # counting pairs, not error mass; devices without isolated
                # rates can still be budgeted this way
                excess = 0.0
            pair = tuple(sorted((edge, other)))
            self.ledger.append(LedgerEntry(layer=layer_idx, edges=pair, excess=excess))
        if self.allowance_used() > self.allowance + 1e-9:
            raise InvariantError(
                f"crosstalk ledger {self.allowance_used():.6g} exceeds allowance {self.allowance:.6g}"
            )

    def close_layer(self) -> tuple[bool, list[_Flight]]:
        """Commit the open layer.  Returns (layer appended?, completed
        flights).  An empty layer is dropped rather than padded in."""
        if self._cur is None:
            raise InvariantError("no open layer")
        ops = self._cur
        self._cur = None
        if not ops:
            return False, []
        self.layers.append(ops)
        helped: set = set()
        completed: list[_Flight] = []
        for f in self.flights:
            helped.update(f.helps)
            f.remaining -= 1
            if f.remaining == 0:
                completed.append(f)
        self.flights = [f for f in self.flights if f.remaining > 0]
        self.last_completed_edges = set()
        for f in completed:
            if f.gate_key is None:
                self.mapping.apply_swap(*f.edge)
                self.last_completed_edges.add(f.edge)
        self.last_helped = frozenset(helped)
        return True, completed


def _pending_pairs(circuit: LogicalCircuit, executed: set[int], in_flight: set[int]) -> tuple[list[PendingPair], list[Gate]]:
    two_q: list[PendingPair] = []
    singles: list[Gate] = []
    for g in frontier(circuit, executed):
        if g.gate_id in in_flight:
            continue
        if g.kind == "u":
            singles.append(g)
        else:
            two_q.append(PendingPair(g.gate_id, (g.qubits[0], g.qubits[1])))
    return two_q, singles


def compile_circuit(
    circuit: LogicalCircuit,
    hw: CouplingGraph,
    profile: CrosstalkProfile,
    initial_mapping: Mapping | None = None,
    allowance: float = 0.0,
    allowance_units: str = "error",
    on_iteration=None,
) -> ScheduledCircuit:
    """Map and schedule a logical circuit onto hardware.

    Inserts SWAPs as needed, never lets the crosstalk ledger exceed
    ``allowance``, and raises StallError when no progress is possible for
    longer than the qubit count allows."""
    if circuit.num_qubits > hw.num_qubits:
        raise InvariantError(
            f"circuit needs {circuit.num_qubits} qubits, device has {hw.num_qubits}"
        )
    if initial_mapping is None:
        initial_mapping = Mapping(circuit.num_qubits, hw.num_qubits)
    state = ScheduleState(hw, profile, initial_mapping.copy(), allowance, allowance_units)
    executed: set[int] = set()
    in_flight: set[int] = set()
    criticality = circuit.criticality()
    idle = 0
    gates_idle = 0
    escape_target = None
    iterations = 0
    hard_cap = 50 * (len(circuit.gates) + hw.num_qubits + 10)
    while len(executed) < len(circuit.gates):
        iterations += 1
        if iterations > hard_cap:
            raise StallError(f"no convergence after {iterations} iterations")
        state.open_layer()
        two_q, singles = _pending_pairs(circuit, executed, in_flight)
        cgates = executable_pairs(two_q, state.mapping, hw)
        in_prog = state.in_progress()
        # Candidate SWAPs are judged against the mapping that will hold once
        # the in-flight routing SWAPs land, not the one of this instant.
        # Judging against the current mapping lets a new SWAP "help" by
        # undoing an in-flight one, and two such SWAPs can chase each other
        # forever.
        drained = state.mapping.copy()
        for f in state.flights:
            if f.gate_key is None:
                drained.apply_swap(*f.edge)
        if escape_target is not None and all(p.key != escape_target for p in two_q):
            escape_target = None
        if escape_target is None and gates_idle > hw.num_qubits and two_q:
            # SWAPs helping different gates can keep cancelling each other
            # without any gate ever running.  Drop to single-minded routing:
            # drain the flights, then walk the most critical gate in, one
            # SWAP at a time, which reduces its distance every three layers.
            escape_target = min(
                two_q, key=lambda p: (-criticality.get(p.key, 0), p.key)
            ).key
        if escape_target is not None:
            if state.flights:
                swaps = []
            else:
                focus = [p for p in two_q if p.key == escape_target]
                swaps = useful_swaps(focus, drained, hw)
                if swaps:
                    swaps = [
                        min(
                            swaps,
                            key=lambda s: (hw.edge_error.get(s.edge, 0.0), s.edge),
                        )
                    ]
        else:
            swaps = useful_swaps(
                two_q, drained, hw, excluded_edges=state.last_completed_edges
            )
        csg = build_csg(
            cgates,
            swaps,
            in_prog,
            two_q,
            state.mapping,
            hw,
            profile,
            state.allowance_left(),
            allowance_units,
        )
        progress = False
        gates_before = len(executed)
        selected = None
        if csg.vertices:
            classes = welsh_powell(csg)
            ctx = SelectionContext(
                pinned=bool(in_prog),
                last_helped=frozenset(k for k in state.last_helped if k not in executed),
                criticality=criticality,
            )
            selected = rank_and_select(csg, classes, ctx)
            for vid in selected.members:
                v = csg.vertices[vid]
                if v.kind == "cgate":
                    g = circuit.gate(v.gate_key)
                    if g.kind == "swap":
                        state.start_swap(v.edge, gate_key=g.gate_id)
                        in_flight.add(g.gate_id)
                    else:
                        state.place(
                            Op(
                                kind=g.kind,
                                qubits=(state.mapping.phys(g.qubits[0]), state.mapping.phys(g.qubits[1])),
                                gate_id=g.gate_id,
                                param=g.param,
                            )
                        )
                        executed.add(g.gate_id)
                    progress = True
                elif v.kind == "swap":
                    state.start_swap(v.edge, helps=v.helps)
                    progress = True
        for g in singles:
            p = state.mapping.phys(g.qubits[0])
            if state.qubit_free(p):
                state.place(Op(kind="u", qubits=(p,), gate_id=g.gate_id, label=g.label))
                executed.add(g.gate_id)
                progress = True
        _, completed = state.close_layer()
        for f in completed:
            if f.gate_key is not None:
                executed.add(f.gate_key)
                in_flight.discard(f.gate_key)
                progress = True
        if on_iteration is not None:
            on_iteration(
                {
                    "iteration": iterations,
                    "csg": csg,
                    "selected": selected,
                    "executed": set(executed),
                    "mapping": state.mapping.copy(),
                    "allowance_left": state.allowance_left(),
                }
            )
        gates_idle = 0 if len(executed) > gates_before else gates_idle + 1
        if progress:
            idle = 0
        else:
            idle += 1
            if idle > hw.num_qubits:
                raise StallError(
                    f"no gate executed and no SWAP started for {idle} iterations"
                )
    return ScheduledCircuit(
        num_physical=hw.num_qubits,
        layers=state.layers,
        crosstalk_ledger=state.ledger,
        initial_mapping=initial_mapping,
        final_mapping=state.mapping.copy(),
    )


def expand_two_local(program: PauliProgram) -> LogicalCircuit:
    """Rewrite a strictly two-local Pauli program as a gate circuit: each
    string becomes an rzz on its two active qubits, wrapped in basis
    changes where the operator is X or Y."""
    gates: list[Gate] = []
    gid = 0

    def add(kind, qubits, param=None, label=None):
        nonlocal gid
        gates.append(Gate(gate_id=gid, kind=kind, qubits=tuple(qubits), param=param, label=label))
        gid += 1

    for s in program.strings:
        active = s.non_identity()
        if len(active) != 2:
            raise InvariantError(
                f"expand_two_local needs exactly two active operators per string, got {s.operators!r}"
            )
        for q in active:
            op = s.operators[q]
            if op in PAULI_PRE_LABEL:
                add("u", (q,), label=PAULI_PRE_LABEL[op])
        qa, qb = active
        add("rzz", (qa, qb), param=s.coefficient)
        for q in active:
            op = s.operators[q]
            if op in PAULI_POST_LABEL:
                add("u", (q,), label=PAULI_POST_LABEL[op])
    return LogicalCircuit(num_qubits=program.num_qubits, gates=gates)


def verify_routing(
    sched: ScheduledCircuit,
    hw: CouplingGraph,
    profile: CrosstalkProfile,
    circuit: LogicalCircuit | None = None,
    allowance: float = math.inf,
    allowance_units: str = "error",
) -> bool:
    """Independent replay of a schedule.

    Walks the layers with its own mapping copy, checking adjacency, qubit
    exclusivity, SWAP slice bookkeeping, the crosstalk ledger (both
    completeness and the allowance bound), and the final mapping.  With the
    source ``circuit`` it additionally checks gate identity, dependence
    order, and completeness; synthesized schedules carry no gate ids, so
    they verify structurally.  Raises VerificationError on the first
    violation."""
    mapping = sched.initial_mapping.copy()
    executed: set[int] = set()
    gate_of = {g.gate_id: g for g in circuit.gates} if circuit is not None else {}
    open_swaps: dict[Edge, int] = {}  # edge -> expected next slice
    swap_gate_edge: dict[Edge, int | None] = {}
    expected_ledger: list[tuple[int, tuple[Edge, Edge], float]] = []
    active_prev: dict[Edge, int] = {}  # edges continuing from earlier layers

    for li, layer in enumerate(sched.layers):
        busy: set[int] = set()
        started_edges: list[Edge] = []
        layer_edges: set[Edge] = set()
        for op in layer:
            for q in op.qubits:
                if not 0 <= q < sched.num_physical:
                    raise VerificationError(f"layer {li}: qubit {q} out of range")
                if q in busy:
                    raise VerificationError(f"layer {li}: qubit {q} used twice")
                busy.add(q)
            edge = op.phys_edge()
            if edge is not None:
                if not hw.has_edge(*edge):
                    raise VerificationError(f"layer {li}: {op.kind} on non-adjacent {edge}")
                layer_edges.add(edge)
            if op.kind == "swap":
                if op.slice_index == 1:
                    if edge in open_swaps:
                        raise VerificationError(f"layer {li}: SWAP restarted on {edge}")
                    if op.gate_id is not None and circuit is not None:
                        g = gate_of.get(op.gate_id)
                        if g is None or g.kind != "swap":
                            raise VerificationError(f"layer {li}: SWAP gate id {op.gate_id} unknown")
                        for p in circuit.predecessors[g.gate_id]:
                            if p not in executed:
                                raise VerificationError(
                                    f"layer {li}: gate {g.gate_id} before its predecessor {p}"
                                )
                        want = normalize_edge(mapping.phys(g.qubits[0]), mapping.phys(g.qubits[1]))
                        if edge != want:
                            raise VerificationError(
                                f"layer {li}: SWAP gate {g.gate_id} on {edge}, mapping says {want}"
                            )
                    open_swaps[edge] = 2
                    swap_gate_edge[edge] = op.gate_id
                    started_edges.append(edge)
                else:
                    if open_swaps.get(edge) != op.slice_index:
                        raise VerificationError(
                            f"layer {li}: SWAP slice {op.slice_index} on {edge} out of order"
                        )
                    if swap_gate_edge.get(edge) != op.gate_id:
                        raise VerificationError(f"layer {li}: SWAP on {edge} changed identity")
                    open_swaps[edge] = op.slice_index + 1
            elif op.kind in ("cx", "rzz") and circuit is not None:
                g = gate_of.get(op.gate_id)
                if g is None or g.kind != op.kind:
                    raise VerificationError(f"layer {li}: unknown gate id {op.gate_id}")
                for p in circuit.predecessors[g.gate_id]:
                    if p not in executed:
                        raise VerificationError(
                            f"layer {li}: gate {g.gate_id} before its predecessor {p}"
                        )
                want = (mapping.phys(g.qubits[0]), mapping.phys(g.qubits[1]))
                if tuple(op.qubits) != want:
                    raise VerificationError(
                        f"layer {li}: gate {g.gate_id} placed on {op.qubits}, mapping says {want}"
                    )
                if g.gate_id in executed:
                    raise VerificationError(f"layer {li}: gate {g.gate_id} executed twice")
                executed.add(g.gate_id)
            elif op.kind == "u" and circuit is not None:
                g = gate_of.get(op.gate_id)
                if g is not None:
                    for p in circuit.predecessors[g.gate_id]:
                        if p not in executed:
                            raise VerificationError(
                                f"layer {li}: gate {g.gate_id} before its predecessor {p}"
                            )
                    if (op.qubits[0],) != (mapping.phys(g.qubits[0]),):
                        raise VerificationError(f"layer {li}: gate {g.gate_id} on wrong qubit")
                    executed.add(g.gate_id)
        # continuing swap edges must occupy their qubits
        for edge, nxt in open_swaps.items():
            if edge not in layer_edges and nxt <= SWAP_DURATION:
                raise VerificationError(f"layer {li}: SWAP on {edge} went missing mid-flight")
        # expected crosstalk entries: every profile pair where at least one
        # side starts here, charged once
        charged_pairs: set[tuple[Edge, Edge]] = set()
        for edge in started_edges + [
            op.phys_edge() for op in layer if op.kind in ("cx", "rzz") and op.phys_edge()
        ]:
            if edge is None:
                continue
            for other in layer_edges:
                if other == edge or set(edge) & set(other):
                    continue
                if profile.record_for(edge, other) is None:
                    continue
                pair = tuple(sorted((edge, other)))
                if pair in charged_pairs:
                    continue
                # both new: charge once; one continuing: charge at the new one
                if other in active_prev and edge in active_prev:
                    continue
                charged_pairs.add(pair)
                try:
                    excess = profile.excess_error(edge, other)
                except HardwareError:
                    if allowance_units != "pairs":
                        raise
                    excess = 0.0
                expected_ledger.append((li, pair, excess))
        # close out finished swaps, then roll actives forward
        for edge in [e for e, nxt in open_swaps.items() if nxt > SWAP_DURATION]:
            gid = swap_gate_edge.pop(edge)
            if gid is None:
                mapping.apply_swap(*edge)
            else:
                if circuit is not None:
                    g = gate_of.get(gid)
                    if g is None or g.kind != "swap":
                        raise VerificationError(f"layer {li}: SWAP gate id {gid} unknown")
                executed.add(gid)
            del open_swaps[edge]
        active_prev = {e: 1 for e in open_swaps}

    if open_swaps:
        raise VerificationError(f"unfinished SWAPs at end of schedule: {sorted(open_swaps)}")
    if circuit is not None:
        missing = {g.gate_id for g in circuit.gates} - executed
        if missing:
            raise VerificationError(f"gates never executed: {sorted(missing)}")
    got = [(e.layer, e.edges, e.excess) for e in sched.crosstalk_ledger]
    if sorted(got) != sorted(expected_ledger):
        raise VerificationError(
            f"crosstalk ledger mismatch: schedule has {sorted(got)}, replay expects {sorted(expected_ledger)}"
        )
    total = float(len(got)) if allowance_units == "pairs" else sum(x for _, _, x in got)
    if total > allowance + 1e-9:
        raise VerificationError(f"ledger total {total:.6g} exceeds allowance {allowance:.6g}")
    if mapping.as_dict() != sched.final_mapping.as_dict():
        raise VerificationError("final mapping does not match replay")
    return True
